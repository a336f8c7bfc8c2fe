"""Polynomial rootfinding by a structured shifted QR iteration.

The companion matrix is permuted into a CMV-like band plus a rank-one
correction; each QR sweep then costs O(n) operations.
"""

from .companion import build_permutation, companion_dense, companion_setup, initial_state
from .dense_oracle import dense_eigenvalues, dense_qr, dense_qr_step, vandermonde_condition
from .metrics import RootReport, compute_nne, match_roots, summarize
from .poly import (
    Polynomial,
    PolynomialError,
    gen_P1,
    gen_P2,
    gen_P3,
    gen_P4,
    gen_P5,
    gen_P6,
    read_coefficients,
    roots_P1,
    scaled_residual,
    strip_zero_roots,
    write_coefficients,
)
from .state import StructuredState, reconstruct_entry
from .structqr import (
    SolveOptions,
    available_backends,
    deflate,
    get_backend,
    qr_sweep,
    set_backend,
    solve,
    wilkinson_shift,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
