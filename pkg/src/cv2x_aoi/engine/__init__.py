from .backend import get_kernel, interpreted_kernel, kernel_is_compiled
from .runner import run
from .sweep import run_sweep

__all__ = ["get_kernel", "interpreted_kernel", "kernel_is_compiled",
           "run", "run_sweep"]
