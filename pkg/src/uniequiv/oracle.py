"""Ground-truth machinery for tests: planted instances, Haar unitaries
restricted to an algebra, and exact rational nullspace dimensions.

NO instances are built only through invariant violation (a rescaled top
singular value) so their verdicts never depend on the randomized solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import MatrixAlgebra, factor_algebra, full_algebra
from .errors import InputError
from .solver import UepInstance

__all__ = [
    "GaussianRational",
    "random_yes_instance",
    "random_no_instance",
    "haar_unitary_in_algebra",
    "exact_nullspace_dimension",
    "algebra_from_kind",
]


@dataclass(frozen=True)
class GaussianRational:
    """Complex number with exact rational real and imaginary parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __add__(self, other):
        other = _coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        other = _coerce(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __mul__(self, other):
        other = _coerce(other)
        return GaussianRational(self.re * other.re - self.im * other.im,
                                self.re * other.im + self.im * other.re)

    def __truediv__(self, other):
        other = _coerce(other)
        denom = other.re * other.re + other.im * other.im
        if denom == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational((self.re * other.re + self.im * other.im) / denom,
                                (self.im * other.re - self.re * other.im) / denom)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __bool__(self) -> bool:
        return self.re != 0 or self.im != 0


def _coerce(value) -> GaussianRational:
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussianRational(Fraction(value))
    if isinstance(value, float):
        return GaussianRational(Fraction(value))  # exact binary expansion
    if isinstance(value, complex):
        return GaussianRational(Fraction(value.real), Fraction(value.imag))
    raise InputError(f"cannot coerce {type(value).__name__} to GaussianRational")


def exact_nullspace_dimension(M) -> int:
    """Nullity of a matrix over the Gaussian rationals by exact elimination.

    Entries may be GaussianRational, int, Fraction, float or complex (floats
    convert exactly via their binary expansion).
    """
    rows = [[_coerce(e) for e in row] for row in M]
    if not rows:
        return 0
    ncols = len(rows[0])
    if any(len(row) != ncols for row in rows):
        raise InputError("ragged matrix")
    rank = 0
    for col in range(ncols):
        pivot_row = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if pivot_row is None:
            continue
        rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
        pivot = rows[rank][col]
        for r in range(rank + 1, len(rows)):
            if rows[r][col]:
                factor = rows[r][col] / pivot
                rows[r] = [rows[r][c] - factor * rows[rank][c] for c in range(ncols)]
        rank += 1
    return ncols - rank


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_unitary_in_algebra(G: MatrixAlgebra, seed) -> np.ndarray:
    """Haar-random unitary inside the algebra (full or factor kinds only)."""
    rng = _as_rng(seed)
    if G.kind == "full":
        return _haar_unitary(G.dim, rng)
    if G.kind == "factor":
        a, b = G.factor_shape
        return np.kron(_haar_unitary(a, rng), np.eye(b, dtype=complex))
    raise InputError(f"no canonical Haar measure for algebra kind {G.kind!r}")


def _haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def _ginibre(d1: int, d2: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((d1, d2)) + 1j * rng.standard_normal((d1, d2))) / np.sqrt(2.0)


def algebra_from_kind(kind, d: int) -> MatrixAlgebra:
    """Build an algebra from a kind descriptor: "full" or ("factor", a, b) with a*b = d."""
    if kind == "full":
        return full_algebra(d)
    if isinstance(kind, (tuple, list)) and len(kind) == 3 and kind[0] == "factor":
        a, b = int(kind[1]), int(kind[2])
        if a * b != d:
            raise InputError(f"factor shape {a}x{b} does not tile dimension {d}")
        return factor_algebra(a, b)
    raise InputError(f"unsupported algebra kind {kind!r}")


def random_yes_instance(d1: int, d2: int, m: int, g1_kind="full", g2_kind="full",
                        seed: int = 0):
    """Planted instance Y_i = U0 X_i V0^dag; returns (instance, (U0, V0))."""
    if d1 < 1 or d2 < 1 or m < 0:
        raise InputError("need d1, d2 >= 1 and m >= 0")
    rng = _as_rng(seed)
    G1 = algebra_from_kind(g1_kind, d1)
    G2 = algebra_from_kind(g2_kind, d2)
    Xs = [_ginibre(d1, d2, rng) for _ in range(m + 1)]
    U0 = haar_unitary_in_algebra(G1, rng)
    V0 = haar_unitary_in_algebra(G2, rng)
    pairs = tuple((X, U0 @ X @ V0.conj().T) for X in Xs)
    inst = UepInstance(d1=d1, d2=d2, pairs=pairs, G1=G1, G2=G2)
    worst = max(np.linalg.norm(U0 @ X @ V0.conj().T - Y) for X, Y in pairs)
    if worst > 1e-12 * max(1.0, max(np.linalg.norm(Y) for _, Y in pairs)):
        raise AssertionError("planted witness failed its own residual check")
    return inst, (U0, V0)


def random_no_instance(d1: int, d2: int, m: int, seed: int = 0) -> UepInstance:
    """Instance whose first pair has provably mismatched singular values."""
    inst, _ = random_yes_instance(d1, d2, m, seed=seed)
    X0, Y0 = inst.pairs[0]
    u, s, vh = np.linalg.svd(Y0)
    s = s.copy()
    s[0] *= 2.0  # top singular value doubled: the multisets now differ
    Y0_bad = (u[:, :s.size] * s) @ vh[:s.size]
    pairs = ((X0, Y0_bad),) + inst.pairs[1:]
    return UepInstance(d1=d1, d2=d2, pairs=pairs, G1=inst.G1, G2=inst.G2)
