from contextlib import contextmanager
from functools import wraps
from typing import Callable, Iterator, Optional, Union

from loguru import logger

from tvgp_bandit.tracking.step import Step, format_step_end, format_step_start
from tvgp_bandit.tracking.tracker import step_tracker

StepName = Union[str, Callable[..., str]]


def resolve_step_name(
    name: StepName,
    args: Optional[tuple] = None,
    kwargs: Optional[dict] = None,
) -> str:
    """
    Resolve a step name, which can either be a string or a callable.

    If `name` is a callable it is called with the wrapped function's `args` and
    `kwargs` (so names can mention e.g. the algorithm or ε being run). A callable
    that raises yields a placeholder name instead of breaking the wrapped call.

    :param name: The step name to resolve
    :param args: Positional arguments of the wrapped call
    :param kwargs: Keyword arguments of the wrapped call
    :return: The resolved step name
    """
    if callable(name):
        try:
            return name(*(args or ()), **(kwargs or {}))
        except Exception as e:
            return f"<error evaluating step name: {e}>"
    return name


@contextmanager
def track_step_and_log_cm(name: StepName) -> Iterator[Step]:
    step = Step(name=resolve_step_name(name))
    step_tracker.push(step)
    logger.info(format_step_start(step))
    success = True
    try:
        yield step
    except Exception:
        success = False
        raise
    finally:
        step.finish(success)
        step_tracker.pop()
        log = logger.info if success else logger.error
        log(format_step_end(step))


def track_step_and_log(name: StepName):
    def decorator(fn):
        @wraps(fn)
        def wrapper(*args, **kwargs):
            with track_step_and_log_cm(resolve_step_name(name, args=args, kwargs=kwargs)):
                return fn(*args, **kwargs)

        return wrapper

    return decorator
