"""Kernel backend selection: compiled extension with interpreted fallback.

``import _kernel`` picks up the compiled extension when it was built (the
.so shadows the .py source); otherwise the same file runs interpreted.
Both produce bit-identical results. The choice can be forced with the
``CV2X_SIM_BACKEND`` environment variable or a ``backend=`` argument
("c" requires the extension, "py" forces the interpreted source).
"""

from __future__ import annotations

import importlib.util
import os

from . import _kernel

_interpreted = None


def kernel_is_compiled(mod=None) -> bool:
    mod = mod or _kernel
    return mod.__file__.endswith((".so", ".pyd"))


def interpreted_kernel():
    """Load the kernel source as plain Python, bypassing any extension."""
    global _interpreted
    if not kernel_is_compiled():
        return _kernel
    if _interpreted is None:
        path = os.path.join(os.path.dirname(__file__), "_kernel.py")
        spec = importlib.util.spec_from_file_location(
            "cv2x_aoi.engine._kernel_interpreted", path
        )
        _interpreted = importlib.util.module_from_spec(spec)
        spec.loader.exec_module(_interpreted)
    return _interpreted


def get_kernel(backend: str = "auto"):
    if backend == "auto":
        backend = os.environ.get("CV2X_SIM_BACKEND", "auto")
    if backend in ("auto", ""):
        return _kernel
    if backend == "c":
        if not kernel_is_compiled():
            raise RuntimeError(
                "compiled kernel requested but the extension is not built; "
                "run `pip install -e . --no-build-isolation` or "
                "`python setup.py build_ext --inplace`"
            )
        return _kernel
    if backend == "py":
        return interpreted_kernel()
    raise ValueError(f"unknown backend {backend!r} (auto, c or py)")
