"""The core decision procedure for simultaneous unitary equivalence.

Given pairs (X_i, Y_i) and algebras G1, G2, decide whether unitaries
U in G1, V in G2 exist with U X_i V^dag = Y_i for all i. The quadratic
problem is linearized into the system

    A X_i = Y_i B,   X_i B^dag = A^dag Y_i,   A, A^dag in G1,  B, B^dag in G2,

whose invertible solutions are exactly the certificates: the unitary factors
U = A (A^dag A)^(-1/2), V = B (B^dag B)^(-1/2) then solve the original
equations and stay inside the algebras. Invertible elements of the solution
space are found by randomized polynomial identity testing (Schwartz-Zippel).

The adjoint equation is antilinear in the complex parameters, so the system
is solved over split real/imaginary unknowns and the solution set is a
real-linear space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .algebra import MatrixAlgebra, full_algebra, membership_constraints, span_residual, verify_algebra
from .errors import DegenerateCandidateError, InputError, InvalidAlgebraError, NotPositiveDefiniteError
from .linalg import (
    MatrixPolynomial,
    Tolerances,
    as_complex_matrix,
    frobenius,
    inverse_sqrt_psd,
    nullspace_basis,
    singular_value_ratio,
    singular_values,
)

__all__ = [
    "UepInstance",
    "SolutionSpace",
    "SamplerConfig",
    "UepVerdict",
    "LinearSystem",
    "singular_value_prefilter",
    "build_linear_system",
    "solve_solution_space",
    "sample_invertible",
    "per_trial_failure_bound",
    "extract_unitaries",
    "decide_uep",
    "decide_invertible_equivalence",
    "uep_instance_full",
]


@dataclass(frozen=True, eq=False)
class UepInstance:
    d1: int
    d2: int
    pairs: tuple  # ((X_i, Y_i), ...) with X_i, Y_i of shape (d1, d2)
    G1: MatrixAlgebra
    G2: MatrixAlgebra

    def __post_init__(self) -> None:
        if self.d1 < 1 or self.d2 < 1:
            raise InputError("dimensions must be positive")
        pairs = tuple(
            (as_complex_matrix(X, f"pairs[{i}].X"), as_complex_matrix(Y, f"pairs[{i}].Y"))
            for i, (X, Y) in enumerate(self.pairs)
        )
        if not pairs:
            raise InputError("an instance needs at least one matrix pair")
        shape = (self.d1, self.d2)
        for i, (X, Y) in enumerate(pairs):
            if X.shape != shape or Y.shape != shape:
                raise InputError(f"pairs[{i}] has shape {X.shape}/{Y.shape}, expected {shape}")
        if self.G1.dim != self.d1 or self.G2.dim != self.d2:
            raise InputError("algebra ambient dimensions must match d1, d2")
        object.__setattr__(self, "pairs", pairs)


@dataclass(frozen=True, eq=False)
class SolutionSpace:
    """Real-linear basis of candidate pairs (A_j, B_j) solving the linearized system."""

    basis: tuple  # ((A_j, B_j), ...)
    real_dimension: int
    d1: int
    d2: int


@dataclass(frozen=True)
class SamplerConfig:
    """Randomized search configuration.

    Coefficients are drawn uniformly from the integers {1, ..., sample_max};
    each trial uses the child seed (seed, trial_index) so trials are
    independent and the whole run is reproducible.
    """

    sample_max: int = 1_000_000
    trials: int = 32
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sample_max < 2:
            raise InputError("sample_max must be at least 2")
        if self.trials < 1:
            raise InputError("trials must be positive")
        if self.seed < 0:
            raise InputError("seed must be a non-negative integer")


@dataclass(eq=False)
class UepVerdict:
    verdict: str                 # "YES" | "NO" | "INCONCLUSIVE"
    certainty: str               # "exact" | "probabilistic"
    U: np.ndarray | None = None
    V: np.ndarray | None = None
    residual: float = 0.0
    trials_used: int = 0
    failure_bound: float = 0.0
    solution_dimension: int | None = None
    certificate_kind: str = "unitary"
    detail: str = ""
    aux: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class LinearSystem:
    matrix: np.ndarray           # real constraint matrix
    instance: UepInstance
    n_params: int                # 2 * (|G1 basis| + |G2 basis|)

    def params_to_pair(self, x: np.ndarray):
        g1 = self.instance.G1.size
        g2 = self.instance.G2.size
        sA = x[:g1] + 1j * x[g1:2 * g1]
        sB = x[2 * g1:2 * g1 + g2] + 1j * x[2 * g1 + g2:]
        A = np.tensordot(sA, np.stack(self.instance.G1.basis), axes=1)
        B = np.tensordot(sB, np.stack(self.instance.G2.basis), axes=1)
        return A, B


def singular_value_prefilter(pairs, tol: Tolerances = Tolerances()):
    """Per-pair singular-value comparison; a mismatch rules out equivalence.

    Returns (True, None) on pass, (False, first_offending_index) on fail.
    """
    for idx, (X, Y) in enumerate(pairs):
        sx = singular_values(X)
        sy = singular_values(Y)
        if sx.shape != sy.shape:
            return False, idx
        scale = max(1.0, float(sx[0]) if sx.size else 0.0, float(sy[0]) if sy.size else 0.0)
        if sx.size and np.max(np.abs(sx - sy)) > tol.residual_abs * scale:
            return False, idx
    return True, None


def _realvec_adjoint(M: np.ndarray) -> np.ndarray:
    Md = M.conj().T
    return np.concatenate([Md.real.ravel(), Md.imag.ravel()])


def _chi_prime_residual(inst: UepInstance, A, B, memb1, memb2) -> np.ndarray:
    parts = []
    for X, Y in inst.pairs:
        R1 = A @ X - Y @ B
        R2 = X @ B.conj().T - A.conj().T @ Y
        parts.extend([R1.real.ravel(), R1.imag.ravel(), R2.real.ravel(), R2.imag.ravel()])
    if memb1 is not None and memb1.shape[0]:
        parts.append(memb1 @ _realvec_adjoint(A))
    if memb2 is not None and memb2.shape[0]:
        parts.append(memb2 @ _realvec_adjoint(B))
    return np.concatenate(parts)


def build_linear_system(inst: UepInstance, tol: Tolerances = Tolerances()) -> LinearSystem:
    """Real-linear constraint matrix of the linearized system.

    Unknowns are the split real/imaginary coordinates of A over G1's basis
    followed by those of B over G2's basis. For star-closed algebras the
    adjoint-membership constraints are vacuous and omitted.
    """
    for name, G in (("G1", inst.G1), ("G2", inst.G2)):
        report = verify_algebra(G, tol)
        if not (report.unital and report.multiplicatively_closed):
            raise InvalidAlgebraError(
                f"{name} is not a usable algebra: unital={report.unital}, "
                f"multiplicatively_closed={report.multiplicatively_closed}"
            )
    memb1 = None if verify_algebra(inst.G1, tol).star_closed else membership_constraints(inst.G1)
    memb2 = None if verify_algebra(inst.G2, tol).star_closed else membership_constraints(inst.G2)
    n = 2 * (inst.G1.size + inst.G2.size)
    system = LinearSystem(matrix=np.zeros((0, n)), instance=inst, n_params=n)
    columns = []
    for l in range(n):
        e = np.zeros(n)
        e[l] = 1.0
        A, B = system.params_to_pair(e)
        columns.append(_chi_prime_residual(inst, A, B, memb1, memb2))
    matrix = np.column_stack(columns)
    return LinearSystem(matrix=matrix, instance=inst, n_params=n)


def solve_solution_space(system: LinearSystem, tol: Tolerances = Tolerances()) -> SolutionSpace:
    ns = nullspace_basis(system.matrix, tol)
    basis = tuple(system.params_to_pair(ns[:, j]) for j in range(ns.shape[1]))
    return SolutionSpace(basis=basis, real_dimension=ns.shape[1],
                         d1=system.instance.d1, d2=system.instance.d2)


def per_trial_failure_bound(d1: int, d2: int, sample_max: int) -> float:
    """Schwartz-Zippel bound for one trial: degree of |det(A (+) B)|^2 over |X|.

    The tight degree of the tested polynomial in the sampled reals is
    2 * (d1 + d2); the bound is clipped at 1.
    """
    return min(1.0, 2.0 * (d1 + d2) / float(sample_max))


def draw_candidate(space: SolutionSpace, cfg: SamplerConfig, trial: int):
    """The (A, B) combination for one trial; deterministic given (seed, trial)."""
    rng = np.random.default_rng([int(cfg.seed), int(trial)])
    coeffs = rng.integers(1, cfg.sample_max + 1, size=space.real_dimension).astype(float)
    A = sum(c * Aj for c, (Aj, _) in zip(coeffs, space.basis))
    B = sum(c * Bj for c, (_, Bj) in zip(coeffs, space.basis))
    return A, B


class SampleResult(NamedTuple):
    A: np.ndarray
    B: np.ndarray
    trials_used: int


def sample_invertible(space: SolutionSpace, cfg: SamplerConfig,
                      tol: Tolerances = Tolerances(), start_trial: int = 0):
    """Search the solution space for a pair with both blocks invertible.

    Returns the first hit, or None after all trials fail; in the latter case
    the caller reports the failure bound per_trial_bound ** trials.
    """
    if space.real_dimension < 1:
        raise InputError("sample_invertible needs a non-trivial solution space")
    for t in range(start_trial, cfg.trials):
        A, B = draw_candidate(space, cfg, t)
        if (singular_value_ratio(A) > tol.rank_rel
                and singular_value_ratio(B) > tol.rank_rel):
            return SampleResult(A=A, B=B, trials_used=t + 1)
    return None


def extract_unitaries(A, B, tol: Tolerances = Tolerances()):
    """Unitary factors U = A (A^dag A)^(-1/2), V = B (B^dag B)^(-1/2)."""
    A = as_complex_matrix(A, "A")
    B = as_complex_matrix(B, "B")
    try:
        U = A @ inverse_sqrt_psd(A.conj().T @ A, tol)
        V = B @ inverse_sqrt_psd(B.conj().T @ B, tol)
    except NotPositiveDefiniteError as exc:
        raise DegenerateCandidateError(f"candidate pair is numerically singular: {exc}") from exc
    return U, V


def _unitarity_defect(U: np.ndarray) -> float:
    return frobenius(U.conj().T @ U - np.eye(U.shape[0]))


def _max_pair_residual(U, V, pairs) -> float:
    Vd = V.conj().T
    return max(frobenius(U @ X @ Vd - Y) / max(1.0, frobenius(Y)) for X, Y in pairs)


def decide_uep(inst: UepInstance, cfg: SamplerConfig = SamplerConfig(),
               tol: Tolerances = Tolerances()) -> UepVerdict:
    """Full decision pipeline; YES verdicts carry a verified (U, V) certificate."""
    ok, idx = singular_value_prefilter(inst.pairs, tol)
    if not ok:
        return UepVerdict(verdict="NO", certainty="exact",
                          detail=f"singular values differ at pair index {idx}")
    system = build_linear_system(inst, tol)
    space = solve_solution_space(system, tol)
    if space.real_dimension == 0:
        return UepVerdict(verdict="NO", certainty="exact", solution_dimension=0,
                          detail="linearized system has only the trivial solution")
    eps = per_trial_failure_bound(inst.d1, inst.d2, cfg.sample_max)
    start = 0
    while True:
        found = sample_invertible(space, cfg, tol, start_trial=start)
        if found is None:
            return UepVerdict(
                verdict="NO", certainty="probabilistic",
                trials_used=cfg.trials, failure_bound=eps ** cfg.trials,
                solution_dimension=space.real_dimension,
                detail="no invertible element found by randomized search",
            )
        try:
            U, V = extract_unitaries(found.A, found.B, tol)
        except DegenerateCandidateError:
            start = found.trials_used
            continue
        break
    residual = _max_pair_residual(U, V, inst.pairs)
    defects = (
        _unitarity_defect(U),
        _unitarity_defect(V),
        span_residual(inst.G1, U),
        span_residual(inst.G2, V),
    )
    if residual <= tol.residual_abs and max(defects) <= tol.residual_abs:
        return UepVerdict(
            verdict="YES", certainty="probabilistic", U=U, V=V,
            residual=residual, trials_used=found.trials_used, failure_bound=0.0,
            solution_dimension=space.real_dimension,
        )
    return UepVerdict(
        verdict="INCONCLUSIVE", certainty="probabilistic", U=U, V=V,
        residual=residual, trials_used=found.trials_used,
        solution_dimension=space.real_dimension,
        detail=(
            "numerical breakdown: sampled certificate failed verification "
            f"(residual={residual:.3e}, max defect={max(defects):.3e})"
        ),
    )


def _numerical_rank(M, tol: Tolerances) -> int:
    s = singular_values(M)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol.rank_rel * s[0]))


def decide_invertible_equivalence(P: MatrixPolynomial, Q: MatrixPolynomial,
                                  cfg: SamplerConfig = SamplerConfig(),
                                  tol: Tolerances = Tolerances()) -> UepVerdict:
    """Decide whether invertible A, B exist with A X_i B^(-1) = Y_i for all i.

    Constraints are only A X_i = Y_i B, which is complex-linear, so the
    solution space is computed over complex parameters directly. Coefficient
    ranks are invariant under the equivalence and serve as an exact prefilter.
    """
    if P.shape != Q.shape or P.degree != Q.degree:
        raise InputError("matrix polynomials must share shape and degree")
    d1, d2 = P.shape
    pairs = tuple(zip(P.coefficients, Q.coefficients))
    for idx, (X, Y) in enumerate(pairs):
        if _numerical_rank(X, tol) != _numerical_rank(Y, tol):
            return UepVerdict(verdict="NO", certainty="exact", certificate_kind="invertible",
                              detail=f"coefficient ranks differ at index {idx}")
    gA, gB = d1 * d1, d2 * d2
    n = gA + gB

    def params_to_pair(z):
        return z[:gA].reshape(d1, d1), z[gA:].reshape(d2, d2)

    columns = []
    for l in range(n):
        e = np.zeros(n, dtype=complex)
        e[l] = 1.0
        A, B = params_to_pair(e)
        columns.append(np.concatenate([(A @ X - Y @ B).ravel() for X, Y in pairs]))
    matrix = np.column_stack(columns)
    _, s, vh = np.linalg.svd(matrix)
    smax = float(s[0]) if s.size else 0.0
    rank = 0 if smax == 0.0 else int(np.sum(s > tol.rank_rel * smax))
    null = vh[rank:].conj().T
    dim = null.shape[1]
    if dim == 0:
        return UepVerdict(verdict="NO", certainty="exact", solution_dimension=0,
                          certificate_kind="invertible",
                          detail="linear system has only the trivial solution")
    basis = [params_to_pair(null[:, j]) for j in range(dim)]
    eps = per_trial_failure_bound(d1, d2, cfg.sample_max)
    for t in range(cfg.trials):
        rng = np.random.default_rng([int(cfg.seed), int(t)])
        coeffs = rng.integers(1, cfg.sample_max + 1, size=dim).astype(float)
        A = sum(c * Aj for c, (Aj, _) in zip(coeffs, basis))
        B = sum(c * Bj for c, (_, Bj) in zip(coeffs, basis))
        if singular_value_ratio(A) <= tol.rank_rel or singular_value_ratio(B) <= tol.rank_rel:
            continue
        residual = max(
            frobenius(np.linalg.solve(B.T, (A @ X).T).T - Y) / max(1.0, frobenius(Y))
            for X, Y in pairs
        )
        if residual <= tol.residual_abs:
            return UepVerdict(verdict="YES", certainty="probabilistic", U=A, V=B,
                              residual=residual, trials_used=t + 1, failure_bound=0.0,
                              solution_dimension=dim, certificate_kind="invertible")
        return UepVerdict(verdict="INCONCLUSIVE", certainty="probabilistic", U=A, V=B,
                          residual=residual, trials_used=t + 1,
                          solution_dimension=dim, certificate_kind="invertible",
                          detail="sampled invertible pair failed the residual check")
    return UepVerdict(verdict="NO", certainty="probabilistic",
                      trials_used=cfg.trials, failure_bound=eps ** cfg.trials,
                      solution_dimension=dim, certificate_kind="invertible",
                      detail="no invertible element found by randomized search")


def uep_instance_full(d1: int, d2: int, pairs) -> UepInstance:
    """Convenience constructor with both algebras full."""
    return UepInstance(d1=d1, d2=d2, pairs=tuple(pairs),
                       G1=full_algebra(d1), G2=full_algebra(d2))
