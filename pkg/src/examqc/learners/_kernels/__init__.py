"""Split-search kernels: compiled extension with a pure-numpy fallback.

Both expose best_split_gini / best_split_gbt with identical semantics and
identical arithmetic ordering, so trees built on either backend match.
EXAMQC_KERNEL=pure|fast forces a backend; by default the compiled one is
used when importable.
"""
from __future__ import annotations

import os

from . import pure


class KernelError(RuntimeError):
    pass


def _load_fast():
    from . import _fast  # noqa: F401  compiled at install time
    return _fast


def get_kernel():
    forced = os.environ.get("EXAMQC_KERNEL", "").strip().lower()
    if forced == "pure":
        return pure
    if forced == "fast":
        try:
            return _load_fast()
        except ImportError as exc:
            raise KernelError(
                "EXAMQC_KERNEL=fast but the compiled kernel is not "
                "available") from exc
    if forced:
        raise KernelError(f"unknown EXAMQC_KERNEL value {forced!r}")
    try:
        return _load_fast()
    except ImportError:
        return pure


def backend_name() -> str:
    return get_kernel().NAME
