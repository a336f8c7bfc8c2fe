"""Root matching and accuracy statistics (err, nne, werr, averit)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

EPS = float(np.finfo(float).eps)


@dataclass
class RootReport:
    roots: np.ndarray
    sweeps: int
    averit: float
    converged: bool = True
    flags: list = field(default_factory=list)
    per_root_err: Optional[np.ndarray] = None
    err: Optional[float] = None
    nne: Optional[float] = None
    werr: Optional[float] = None

    @property
    def n(self) -> int:
        return len(self.roots)


def match_roots(computed, reference) -> np.ndarray:
    """Greedy global matching; returns distances in order of pairing."""
    a = np.asarray(computed, dtype=complex).ravel()
    b = np.asarray(reference, dtype=complex).ravel()
    if a.size != b.size:
        raise ValueError(f"cannot match {a.size} computed roots against {b.size} reference roots")
    n = a.size
    d = np.abs(a[:, None] - b[None, :])
    order = np.argsort(d, axis=None, kind="stable")
    used_a = np.zeros(n, dtype=bool)
    used_b = np.zeros(n, dtype=bool)
    out = []
    for flat in order:
        i, j = divmod(int(flat), n)
        if used_a[i] or used_b[j]:
            continue
        used_a[i] = used_b[j] = True
        out.append(d[i, j])
        if len(out) == n:
            break
    return np.array(out)


def nne_norm_terms(p) -> float:
    """``||Ahat_0||_inf + ||f_0 / sigma||_inf + ||w_0||_inf`` of the starting representation."""
    from .companion import companion_setup
    from .state import band_from_dense

    c = p.as_array()
    if c[0] == 0:
        return math.inf
    setup = companion_setup(p)
    band = band_from_dense(setup.permuted_dense())
    w0 = setup.phat
    f0 = setup.apply_uhat(w0)
    sigma = -np.conj(c[0]) / np.conj(c[-1])
    return float(
        np.abs(band).sum(axis=1).max() + np.abs(f0 / sigma).max() + np.abs(w0).max()
    )


def compute_nne(p, state0, cond: float) -> float:
    """Expected error bound ``(norm terms) * cond * eps``.

    ``state0`` may be the s=0 :class:`StructuredState`; when ``None`` the terms
    are rebuilt from ``p``.
    """
    if math.isinf(cond):
        return math.inf
    if state0 is None:
        terms = nne_norm_terms(p)
    else:
        terms = (
            state0.band_norm_inf()
            + float(np.abs(state0.f / state0.sigma).max())
            + float(np.abs(state0.w).max())
        )
    return terms * cond * EPS


def summarize(report: RootReport, reference, p, state0=None) -> RootReport:
    """Attach err/nne/werr (and per-root errors) to a solver report."""
    from .dense_oracle import vandermonde_condition

    reference = np.asarray(reference, dtype=complex)
    per = match_roots(report.roots, reference)
    err = float(per.mean()) if per.size else 0.0
    flags = list(report.flags)
    cond = vandermonde_condition(reference)
    nne = compute_nne(p, state0, cond)
    if math.isinf(nne) or nne == 0.0:
        werr = 0.0
        flags.append("nne not finite; werr set to 0")
    else:
        werr = err / nne
    if per.size > 1:
        gaps = np.abs(reference[:, None] - reference[None, :])
        np.fill_diagonal(gaps, np.inf)
        if gaps.min() < 10.0 * per.max():
            flags.append("reference roots closer than 10x max error; matching may be ambiguous")
    return replace(report, per_root_err=per, err=err, nne=nne, werr=werr, flags=flags)
