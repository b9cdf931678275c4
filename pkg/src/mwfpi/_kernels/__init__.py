"""Kernel backend selection: compiled cascade when the extension built,
numpy fallback otherwise.  Set MWFPI_PURE=1 to force the fallback."""

import os

from . import cascade_np

if os.environ.get("MWFPI_PURE", "").strip() not in ("", "0"):
    cascade_chain = cascade_np.cascade_chain
    BACKEND = "numpy (forced)"
else:
    try:
        from ._cascade import cascade_chain

        BACKEND = "compiled"
    except ImportError:
        cascade_chain = cascade_np.cascade_chain
        BACKEND = "numpy"


def backend_name() -> str:
    return BACKEND
