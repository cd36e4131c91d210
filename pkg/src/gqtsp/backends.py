"""Kernel backend selection: compiled extension if available, NumPy otherwise."""

from gqtsp import _kernels_py

try:
    from gqtsp import _kernels_c
    HAVE_COMPILED = True
except ImportError:
    _kernels_c = None
    HAVE_COMPILED = False

_DEFAULT = _kernels_c if HAVE_COMPILED else _kernels_py


def get_backend(name: str = "auto"):
    """Return a kernel module: "auto", "compiled" or "python"."""
    if name == "auto":
        return _DEFAULT
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernels are not built; reinstall with a C toolchain")
        return _kernels_c
    raise ValueError(f"unknown backend {name!r}")


def backend_name(module) -> str:
    return "compiled" if getattr(module, "COMPILED", False) else "python"
