"""Fallback for deeply nested inputs.

The evaluators recurse on formula structure. Pure functions decorated with
:func:`deep_safe` run normally; if they hit ``RecursionError`` they are rerun
once in a helper thread with a large stack and a raised recursion limit.
"""

import functools
import sys
import threading

_STACK_BYTES = 512 * 1024 * 1024
_DEEP_LIMIT = 200_000
_lock = threading.Lock()


def _run_deep(fn, args, kwargs):
    result = {}

    def target():
        try:
            result["value"] = fn(*args, **kwargs)
        except BaseException as exc:  # re-raised in the caller's thread
            result["error"] = exc

    with _lock:
        old_limit = sys.getrecursionlimit()
        old_stack = threading.stack_size()
        sys.setrecursionlimit(max(old_limit, _DEEP_LIMIT))
        threading.stack_size(_STACK_BYTES)
        try:
            worker = threading.Thread(target=target, name="hmlkit-deep")
            worker.start()
            worker.join()
        finally:
            threading.stack_size(old_stack)
            sys.setrecursionlimit(old_limit)
    if "error" in result:
        raise result["error"]
    return result["value"]


def deep_safe(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except RecursionError:
            if threading.current_thread().name == "hmlkit-deep":
                raise
            return _run_deep(fn, args, kwargs)

    return wrapper
