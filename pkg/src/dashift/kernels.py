"""Backend selection for the batched kernels.

The compiled ``_ckernels`` extension is used when it was built; otherwise,
or when ``DASHIFT_PURE_PYTHON=1`` is set, the numpy fallback is used.
"""
import os

from . import _pykernels

CROSS_ENTROPY = _pykernels.CROSS_ENTROPY
ZERO_ONE = _pykernels.ZERO_ONE

_impl = _pykernels
BACKEND = "python"
if os.environ.get("DASHIFT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

expected_losses = _impl.expected_losses
hdh_sup = _impl.hdh_sup
