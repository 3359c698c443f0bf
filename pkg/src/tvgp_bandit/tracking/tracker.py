import pandas as pd

from tvgp_bandit.tracking.step import Step


class StepTracker:
    """Stack of currently open steps below a synthetic root."""

    def __init__(self):
        self.root = Step(name="root")
        self.stack = [self.root]

    def current(self) -> Step:
        return self.stack[-1]

    def push(self, step: Step) -> None:
        self.current().add_child(step)
        self.stack.append(step)

    def pop(self) -> Step:
        if len(self.stack) == 1:
            raise RuntimeError("Cannot pop the root step")
        return self.stack.pop()

    def reset(self) -> None:
        self.root = Step(name="root")
        self.stack = [self.root]

    def timing_table(self) -> pd.DataFrame:
        """Finished steps as a (step, level, seconds, ok) table."""
        rows = [
            {
                "step": step.name,
                "level": step.level,
                "seconds": step.timer.elapsed,
                "ok": step.succeeded,
            }
            for step in self.root.walk()
            if step is not self.root and step.succeeded is not None
        ]
        return pd.DataFrame(rows, columns=["step", "level", "seconds", "ok"])


# GLOBAL instance; each worker process gets its own copy
step_tracker = StepTracker()
