"""Kernel backend selection.

Prefers the compiled extension; falls back to the pure-Python mirror when
the extension is missing or when GAUGEMEASURE_PURE is set in the
environment.  Both backends expose the same functions and produce
identical output arrays.
"""

import os

if os.environ.get("GAUGEMEASURE_PURE"):
    from . import _pure as impl

    BACKEND = "python"
else:
    try:
        from . import _core as impl  # type: ignore[attr-defined]

        BACKEND = "c"
    except ImportError:
        from . import _pure as impl

        BACKEND = "python"

ml_series_point = impl.ml_series_point
exp_ref_rows = impl.exp_ref_rows
ml_ref_rows = impl.ml_ref_rows
exp_escape_rows = impl.exp_escape_rows
ml_escape_rows = impl.ml_escape_rows

ESCAPE_UNDECIDED = 0
ESCAPE_BOUNDED = 1
ESCAPE_ESCAPING = 2
