import functools
import logging
import time

logger = logging.getLogger(__name__)


def timer(func):
    """Log the wall time of ``func`` at INFO level."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        try:
            return func(*args, **kwargs)
        finally:
            logger.info("%s took %.3f s", func.__qualname__, time.perf_counter() - start)
    return wrapper
