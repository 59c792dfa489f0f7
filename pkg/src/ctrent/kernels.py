"""Kernel backend selection.

The compiled extension is preferred when importable; the NumPy fallback
is used otherwise. Set ``CTRENT_KERNELS=python`` (or ``=c``) to force a
specific backend. Both backends produce bit-identical arrays, so the
choice never affects results, only speed.
"""

from __future__ import annotations

import os

from . import _pykernels


def _select():
    choice = os.environ.get("CTRENT_KERNELS", "auto").strip().lower()
    if choice in ("auto", "", "c"):
        try:
            from . import _ckernels

            return _ckernels, "c"
        except ImportError:
            if choice == "c":
                raise ImportError(
                    "CTRENT_KERNELS=c requested but the compiled kernel "
                    "extension is not importable"
                ) from None
    elif choice not in ("python", "py"):
        raise ValueError(f"unrecognized CTRENT_KERNELS value: {choice!r}")
    return _pykernels, "python"


_impl, BACKEND = _select()

delta_signmag = _impl.delta_signmag
fold_words = _impl.fold_words
pack_symbols = _impl.pack_symbols
count_symbols = _impl.count_symbols
joint_counts16 = _impl.joint_counts16
sliding_joint_counts16 = _impl.sliding_joint_counts16
