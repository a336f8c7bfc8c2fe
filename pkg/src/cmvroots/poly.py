"""Polynomials, evaluation, and the test families used by the benchmarks.

Coefficients are stored in increasing degree order: ``coeffs[j]`` multiplies
``z**j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from pathlib import Path
from typing import Iterator, Sequence, Union

import numpy as np

_MASK64 = (1 << 64) - 1


class PolynomialError(ValueError):
    """Raised for malformed or degenerate polynomial input."""


@dataclass(frozen=True)
class Polynomial:
    coeffs: tuple

    def __init__(self, coeffs: Sequence[complex]):
        c = tuple(complex(x) for x in coeffs)
        if len(c) == 0:
            raise PolynomialError("empty coefficient list")
        if len(c) > 1 and c[-1] == 0:
            raise PolynomialError("leading coefficient is zero")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def as_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)

    def __call__(self, z: complex) -> complex:
        return evaluate(self, z)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __repr__(self) -> str:
        return f"Polynomial(degree={self.degree})"


def evaluate(p: Polynomial, z: complex) -> complex:
    """Horner evaluation of ``p`` at ``z``."""
    acc = 0j
    for c in reversed(p.coeffs):
        acc = acc * z + c
    return acc


def scaled_residual(p: Polynomial, z: complex) -> float:
    """Backward-error style residual ``|p(z)| / sum_j |c_j| |z|**j``.

    For ``|z| > 1`` numerator and denominator are divided by ``|z|**n`` and the
    reversed polynomial is evaluated at ``1/z``, which avoids overflow.
    """
    z = complex(z)
    coeffs = p.coeffs
    if abs(z) > 1.0:
        coeffs = coeffs[::-1]
        z = 1.0 / z
    az = abs(z)
    acc = 0.0
    val = 0j
    for c in reversed(coeffs):
        acc = acc * az + abs(c)
        val = val * z + c
    if acc == 0.0:
        return 0.0
    return abs(val) / acc


def max_scaled_residual(p: Polynomial, roots) -> float:
    return max((scaled_residual(p, r) for r in roots), default=0.0)


def strip_zero_roots(p: Polynomial) -> tuple[Polynomial, int]:
    """Split ``p = z**m * q`` with ``q(0) != 0``.

    When ``p`` is a monomial the returned ``q`` is the constant polynomial
    (degree 0), which callers treat as having no further roots.
    """
    m = 0
    while m < p.degree and p.coeffs[m] == 0:
        m += 1
    if m == 0:
        return p, 0
    return Polynomial(p.coeffs[m:]), m


# ---------------------------------------------------------------------------
# deterministic uniform stream


class SplitMix64:
    """splitmix64 generator; reproducible across languages."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        x = self.state
        x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
        return x ^ (x >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * (1.0 / (1 << 53))
        return lo + (hi - lo) * u


# ---------------------------------------------------------------------------
# test families


def gen_P1(n: int) -> Polynomial:
    """``1 + (n/(n+1) + (n+1)/n) z**n + z**(2n)``; roots on two nearby circles."""
    _check_positive(n)
    c = [0.0] * (2 * n + 1)
    c[0] = 1.0
    c[n] = n / (n + 1) + (n + 1) / n
    c[2 * n] = 1.0
    return Polynomial(c)


def roots_P1(n: int) -> np.ndarray:
    """Closed-form roots of :func:`gen_P1`: n-th roots of ``-n/(n+1)`` and ``-(n+1)/n``."""
    _check_positive(n)
    k = np.arange(n)
    unit = np.exp(1j * np.pi * (2 * k + 1) / n)
    r1 = (n / (n + 1)) ** (1.0 / n)
    r2 = ((n + 1) / n) ** (1.0 / n)
    return np.concatenate([r1 * unit, r2 * unit])


def gen_P2(n: int) -> Polynomial:
    _check_positive(n)
    c = [0.0] * (2 * n + 1)
    for j in range(n):
        c[j] = (n + j) / n
        c[2 * n - j] = (n + j) / n
    c[n] = (n + 1) / n
    return Polynomial(c)


def gen_P3(n: int, lam: float) -> Polynomial:
    """Antipalindromic ``(1-l)z^(n+1) - (l+1)z^n + (l+1)z - (1-l)``."""
    _check_positive(n)
    if not 0.0 < lam < 1.0:
        raise PolynomialError("lambda must lie in (0, 1)")
    c = [0.0] * (n + 2)
    c[0] -= 1.0 - lam
    c[1] += lam + 1.0
    c[n] -= lam + 1.0
    c[n + 1] += 1.0 - lam
    return Polynomial(c)


def bernoulli_numbers(m: int) -> list[float]:
    """b_0..b_m from ``sum_{k<=j} C(j+1, k) b_k = 0`` (so ``b_1 = -1/2``)."""
    b = [1.0]
    for j in range(1, m + 1):
        s = 0.0
        for k in range(j):
            s += comb(j + 1, k) * b[k]
        b.append(-s / (j + 1))
    return b


def gen_P4(kind: str, n: int) -> Polynomial:
    if n < 1:
        raise PolynomialError("degree must be at least 1")
    if kind == "bernoulli":
        b = bernoulli_numbers(n)
        return Polynomial([comb(n, j) * b[n - j] for j in range(n + 1)])
    if kind == "chebyshev":
        t0, t1 = np.array([1.0]), np.array([0.0, 1.0])
        for _ in range(n - 1):
            nxt = np.zeros(len(t1) + 1)
            nxt[1:] = 2.0 * t1
            nxt[: len(t0)] -= t0
            t0, t1 = t1, nxt
        return Polynomial(t1)
    if kind == "exp":
        c, term = [], 1.0
        for j in range(n + 1):
            c.append(term)
            term *= 2.0 / (j + 1)
        return Polynomial(c)
    raise PolynomialError(f"unknown P4 kind {kind!r}")


def _random_coeffs(n: int, rng: SplitMix64) -> list[float]:
    while True:
        c = []
        for _ in range(n + 1):
            a = rng.uniform(-1.0, 1.0)
            e = rng.uniform(-3.0, 3.0)
            c.append(a * 10.0**e)
        if c[0] != 0.0 and c[-1] != 0.0:
            return c


def gen_P5(n: int, seed: int) -> Polynomial:
    """Random coefficients ``a_j * 10**e_j``, ``a ~ U[-1,1]``, ``e ~ U[-3,3]``."""
    _check_positive(n)
    return Polynomial(_random_coeffs(n, SplitMix64(seed)))


def gen_P6(n: int, seed: int) -> Polynomial:
    """Palindromic ``s(z) s(1/z) z**n`` with ``s`` drawn as in :func:`gen_P5`."""
    _check_positive(n)
    s = _random_coeffs(n, SplitMix64(seed))
    return Polynomial(palindromize(s))


def palindromize(s: Sequence[float]) -> list:
    s = np.asarray(s)
    return list(np.convolve(s, s[::-1]))


def _check_positive(n: int) -> None:
    if n < 1:
        raise PolynomialError("n must be at least 1")


# ---------------------------------------------------------------------------
# coefficient files


def parse_coefficients(lines: Iterator[str]) -> list[complex]:
    """Parse ``re im`` lines (``#`` comments and blank lines skipped).

    A single float per line is accepted as a real coefficient.
    """
    out = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if len(parts) == 1:
                out.append(complex(float(parts[0]), 0.0))
            elif len(parts) == 2:
                out.append(complex(float(parts[0]), float(parts[1])))
            else:
                raise ValueError("expected 're im'")
        except ValueError as exc:
            raise PolynomialError(f"line {lineno}: cannot parse {line!r} ({exc})") from None
    if not out:
        raise PolynomialError("no coefficients found")
    return out


def read_coefficients(path: Union[str, Path]) -> list[complex]:
    with open(path) as fh:
        return parse_coefficients(iter(fh))


def write_coefficients(path: Union[str, Path], coeffs: Sequence[complex]) -> None:
    with open(path, "w") as fh:
        fh.write("# re im, coefficient of z**k on line k+1\n")
        for c in coeffs:
            c = complex(c)
            fh.write(f"{c.real:.17g} {c.imag:.17g}\n")
