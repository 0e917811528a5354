"""Ordering kernel selection: compiled extension when built, else pure Python.

Both implementations share one contract and one test suite; BACKEND
records which one is active so benchmarks and bug reports can say.
"""

try:
    from . import _order_cy as _impl
    BACKEND = "cython"
except ImportError:  # extension not built
    from . import _order_py as _impl
    BACKEND = "python"

from . import _order_py

hpwl_x = _impl.hpwl_x
exhaustive_search = _impl.exhaustive_search

__all__ = ["BACKEND", "hpwl_x", "exhaustive_search", "_order_py"]
