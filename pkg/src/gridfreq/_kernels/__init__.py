"""Kernel selection: compiled Cython core when available, numpy fallback otherwise.

Set NUMERIC_PURE_PYTHON=1 to force the fallback (useful for debugging and for
the kernel equivalence tests). `COMPILED` records which path was taken.
"""

import os

if os.environ.get("NUMERIC_PURE_PYTHON") == "1":
    from gridfreq._kernels import _fallback as _impl

    COMPILED = False
else:
    try:
        from gridfreq._kernels import _core as _impl  # type: ignore[no-redef]

        COMPILED = True
    except ImportError:
        from gridfreq._kernels import _fallback as _impl  # type: ignore[no-redef]

        COMPILED = False

pq_energy_2d = _impl.pq_energy_2d
pq_energy_grad_2d = _impl.pq_energy_grad_2d
pq_cell_weights_2d = _impl.pq_cell_weights_2d
cut_perimeter_2d = _impl.cut_perimeter_2d

__all__ = [
    "COMPILED",
    "pq_energy_2d",
    "pq_energy_grad_2d",
    "pq_cell_weights_2d",
    "cut_perimeter_2d",
]
