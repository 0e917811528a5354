"""cellgrid: an interactive grid layout engine for small cells.

Netlists come in as SPICE, geometry lives on integer routing tracks,
and every edit flows through a small command language so sessions can
be replayed, undone, and driven over HTTP or by a language model.
"""

__version__ = "0.1.0"
