from dataclasses import dataclass, field
from typing import Iterator, Optional

from tvgp_bandit.utils.utils import Timer


@dataclass
class Step:
    """One timed unit of work (an experiment run, an ε fit, a check suite...)."""

    name: str
    level: int = 0
    timer: Timer = field(default_factory=Timer)
    children: list["Step"] = field(default_factory=list)
    succeeded: Optional[bool] = None

    def add_child(self, step: "Step") -> None:
        step.level = self.level + 1
        self.children.append(step)

    def finish(self, succeeded: bool) -> None:
        self.timer.stop_timer()
        self.succeeded = succeeded

    def walk(self) -> Iterator["Step"]:
        """Depth-first iteration in execution order, self first."""
        yield self
        for child in self.children:
            yield from child.walk()

    def __repr__(self) -> str:
        lines = []
        for step in self.walk():
            lines.append(f"{'  ' * step.level}{step.name}: {step.timer.elapsed:.3f}s")
        return "\n".join(lines)


def find_step(root: Step, name: str) -> Optional[Step]:
    for step in root.walk():
        if step.name == name:
            return step
    return None


def _indent(step: Step) -> str:
    return "===" * max(step.level - 1, 0)


def format_step_start(step: Step) -> str:
    return f"{_indent(step)}  ▶️  {step.name}"


def format_step_end(step: Step) -> str:
    emoji = "✅" if step.succeeded else "❌"
    return f"{_indent(step)}  {emoji} {step.name} {step.timer.elapsed:.2f}s"
