"""Quantum-information layer: bipartite states and their equivalence reductions.

A bipartite pure state with amplitudes indexed (i, j) -> i*d2 + j is
identified with the d1 x d2 matrix psi = reshape(amplitudes). Under this
convention (A (x) B)|psi> corresponds to A psi B^T, which is the keystone
identity the whole module is built on: the solver's right unitary W (with
U psi W^dag = phi) converts to the physical local unitary V = conj(W).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import product

import numpy as np

from .algebra import factor_algebra
from .errors import InputError, NotGenericError, PhaseResolutionError
from .linalg import Tolerances, as_complex_matrix, frobenius, hermitian_eigendecomposition
from .solver import (
    SamplerConfig,
    UepInstance,
    UepVerdict,
    decide_uep,
    singular_value_prefilter,
    uep_instance_full,
)

__all__ = [
    "PureState",
    "DensityOperator",
    "pure_state",
    "density_operator",
    "state_to_matrix",
    "matrix_to_state",
    "simultaneous_lu_pure",
    "unilocal_mixed_equivalence",
    "generic_mixed_lu",
    "resolve_eigenvector_phases",
    "singular_value_prefilter",
]


@dataclass(frozen=True, eq=False)
class PureState:
    d1: int
    d2: int
    amplitudes: np.ndarray  # length d1*d2, unit norm


@dataclass(frozen=True, eq=False)
class DensityOperator:
    d1: int
    d2: int
    matrix: np.ndarray  # (d1*d2) x (d1*d2), Hermitian, unit trace, PSD


def pure_state(d1: int, d2: int, amplitudes) -> PureState:
    v = np.asarray(amplitudes, dtype=complex).ravel()
    if v.size != d1 * d2:
        raise InputError(f"expected {d1 * d2} amplitudes, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise InputError("amplitudes contain non-finite entries")
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise InputError("the zero vector is not a state")
    if abs(norm - 1.0) > 1e-10:
        warnings.warn(f"state norm {norm!r} differs from 1; rescaling", stacklevel=2)
        v = v / norm
    return PureState(d1=d1, d2=d2, amplitudes=v)


def density_operator(d1: int, d2: int, matrix) -> DensityOperator:
    M = as_complex_matrix(matrix, "density matrix")
    d = d1 * d2
    if M.shape != (d, d):
        raise InputError(f"density matrix must be {d} x {d}, got {M.shape}")
    if frobenius(M - M.conj().T) > 1e-10 * max(1.0, frobenius(M)):
        raise InputError("density matrix is not Hermitian")
    if abs(np.trace(M).real - 1.0) > 1e-10 or abs(np.trace(M).imag) > 1e-10:
        raise InputError(f"density matrix trace {np.trace(M)} differs from 1")
    w = np.linalg.eigvalsh((M + M.conj().T) / 2.0)
    if w[0] < -1e-10:
        raise InputError(f"density matrix has negative eigenvalue {w[0]:.3e}")
    return DensityOperator(d1=d1, d2=d2, matrix=M)


def state_to_matrix(s: PureState) -> np.ndarray:
    return s.amplitudes.reshape(s.d1, s.d2)


def matrix_to_state(M, d1: int | None = None, d2: int | None = None) -> PureState:
    M = as_complex_matrix(M, "state matrix")
    return pure_state(d1 or M.shape[0], d2 or M.shape[1], M.ravel())


def _check_uniform(states, what: str):
    dims = {(s.d1, s.d2) for s in states}
    if len(dims) != 1:
        raise InputError(f"{what} have mixed dimensions: {sorted(dims)}")
    return dims.pop()


def _simultaneous_lu_matrices(Xs, Ys, cfg: SamplerConfig, tol: Tolerances) -> UepVerdict:
    """Solver on matricized states; on YES, converts W -> physical V = conj(W)."""
    d1, d2 = Xs[0].shape
    inst = uep_instance_full(d1, d2, tuple(zip(Xs, Ys)))
    verdict = decide_uep(inst, cfg, tol)
    if verdict.verdict == "YES":
        verdict.V = np.conj(verdict.V)
    return verdict


def simultaneous_lu_pure(states_in, states_out, cfg: SamplerConfig = SamplerConfig(),
                         tol: Tolerances = Tolerances()) -> UepVerdict:
    """Simultaneous local-unitary equivalence of two lists of pure states.

    On YES the certificate (U, V) satisfies (U (x) V)|psi_i> = |phi_i>.
    """
    if len(states_in) != len(states_out) or not states_in:
        raise InputError("state lists must be non-empty and of equal length")
    d_in = _check_uniform(states_in, "input states")
    d_out = _check_uniform(states_out, "output states")
    if d_in != d_out:
        raise InputError(f"input dimensions {d_in} differ from output dimensions {d_out}")
    Xs = [state_to_matrix(s) for s in states_in]
    Ys = [state_to_matrix(s) for s in states_out]
    verdict = _simultaneous_lu_matrices(Xs, Ys, cfg, tol)
    if verdict.verdict == "YES":
        local = np.kron(verdict.U, verdict.V)
        verdict.residual = max(
            float(np.linalg.norm(local @ si.amplitudes - so.amplitudes))
            for si, so in zip(states_in, states_out)
        )
    return verdict


def unilocal_mixed_equivalence(rhos, sigmas, cfg: SamplerConfig = SamplerConfig(),
                               tol: Tolerances = Tolerances()) -> UepVerdict:
    """Simultaneous (U (x) I) rho_i (U (x) I)^dag = sigma_i for one unitary U.

    Both algebras are {M (x) I_b}; the appended identity pair forces the left
    and right solver unitaries to coincide. Any number of non-acting parties
    is supported by folding them into the single d2 factor.
    """
    if len(rhos) != len(sigmas) or not rhos:
        raise InputError("density operator lists must be non-empty and of equal length")
    d1, d2 = _check_uniform(list(rhos) + list(sigmas), "density operators")
    d = d1 * d2
    eye = np.eye(d, dtype=complex)
    pairs = tuple((r.matrix, s.matrix) for r, s in zip(rhos, sigmas)) + ((eye, eye),)
    G = factor_algebra(d1, d2)
    inst = UepInstance(d1=d, d2=d, pairs=pairs, G1=G, G2=G)
    verdict = decide_uep(inst, cfg, tol)
    if verdict.verdict != "YES":
        return verdict
    U_full, V_full = verdict.U, verdict.V
    # read off the a x a factor of M (x) I_b by averaging the diagonal blocks
    M = np.zeros((d1, d1), dtype=complex)
    for j in range(d1):
        for k in range(d1):
            M[j, k] = np.mean(np.diag(U_full[j * d2:(j + 1) * d2, k * d2:(k + 1) * d2]))
    big = np.kron(M, np.eye(d2, dtype=complex))
    residual = max(
        frobenius(big @ r.matrix @ big.conj().T - s.matrix) / max(1.0, frobenius(s.matrix))
        for r, s in zip(rhos, sigmas)
    )
    verdict.U = M
    verdict.V = None
    verdict.residual = residual
    verdict.aux = {"U_full": U_full, "V_full": V_full,
                   "uv_gap": frobenius(U_full - V_full)}
    if residual > tol.residual_abs:
        verdict.verdict = "INCONCLUSIVE"
        verdict.detail = f"extracted factor failed the direct check (residual={residual:.3e})"
    return verdict


def _quartic_traces(mats) -> np.ndarray:
    """T[i, j, k] = tr(m_i^dag m_j m_k^dag m_i); invariant up to lam_j conj(lam_k)."""
    n = len(mats)
    P = np.empty((n, n), dtype=object)
    for a in range(n):
        for b in range(n):
            P[a, b] = mats[a].conj().T @ mats[b]
    T = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                T[i, j, k] = np.trace(P[i, j] @ P[k, i])
    return T


def _resolve_phase_components(psis, phis, tol: Tolerances,
                              denom_tol: float = 1e-6, mag_tol: float = 1e-4):
    """Per-index phases lam_j with U psi_j V^dag = lam_j phi_j, up to one free
    phase per connected component of the trace graph.

    Returns (lambdas, components); components are index lists, each gauged to
    lam = 1 at its smallest index, ordered by that index.
    """
    n = len(psis)
    Tpsi = _quartic_traces(psis)
    Tphi = _quartic_traces(phis)
    lambdas = np.ones(n, dtype=complex)
    resolved = [False] * n
    components = []
    for root in range(n):
        if resolved[root]:
            continue
        comp = [root]
        resolved[root] = True
        lambdas[root] = 1.0
        frontier = [root]
        while frontier:
            k = frontier.pop(0)
            for j in range(n):
                if resolved[j]:
                    continue
                for i in range(n):
                    denom = Tphi[i, j, k]
                    if abs(denom) <= denom_tol:
                        continue
                    ratio = Tpsi[i, j, k] / denom
                    if abs(abs(ratio) - 1.0) > mag_tol:
                        continue  # unusable edge: non-equivalence or noise
                    lambdas[j] = (ratio / abs(ratio)) * lambdas[k]
                    resolved[j] = True
                    comp.append(j)
                    frontier.append(j)
                    break
        components.append(sorted(comp))
    return lambdas, components


def resolve_eigenvector_phases(psis, phis, tol: Tolerances = Tolerances()):
    """Rescale phis so that a single (U, V) can map psi_j -> rescaled phi_j.

    Raises PhaseResolutionError when the trace graph is disconnected (the
    remaining phases then require the grid fallback in generic_mixed_lu).
    """
    if len(psis) != len(phis):
        raise InputError("lists must have equal length")
    lambdas, components = _resolve_phase_components(psis, phis, tol)
    if len(components) > 1:
        raise PhaseResolutionError(
            f"phase graph is disconnected into {len(components)} components"
        )
    return [lam * phi for lam, phi in zip(lambdas, phis)]


def generic_mixed_lu(rho: DensityOperator, sigma: DensityOperator,
                     cfg: SamplerConfig = SamplerConfig(),
                     tol: Tolerances = Tolerances(),
                     phase_grid: int = 12) -> UepVerdict:
    """LU equivalence (U (x) V) rho (U (x) V)^dag = sigma for generic states.

    Requires all eigenvalue gaps above degenerate_gap. Eigenvectors are
    matricized into pure-state sets, per-vector phases are aligned via the
    quartic-trace identity, and the simultaneous pure-state solver finishes
    the job; YES verdicts are re-verified directly on the density matrices.
    """
    if (rho.d1, rho.d2) != (sigma.d1, sigma.d2):
        raise InputError("density operators have mismatched dimensions")
    d1, d2 = rho.d1, rho.d2
    w_r, Q_r = hermitian_eigendecomposition(rho.matrix, tol)
    w_s, Q_s = hermitian_eigendecomposition(sigma.matrix, tol)
    for name, w in (("rho", w_r), ("sigma", w_s)):
        if w.size > 1 and np.min(w[:-1] - w[1:]) <= tol.degenerate_gap:
            raise NotGenericError(f"{name} has eigenvalue gaps <= {tol.degenerate_gap}")
    if np.max(np.abs(w_r - w_s)) > tol.residual_abs:
        return UepVerdict(verdict="NO", certainty="exact",
                          detail="eigenvalue spectra differ")
    n = w_r.size
    psis = [Q_r[:, i].reshape(d1, d2) for i in range(n)]
    phis = [Q_s[:, i].reshape(d1, d2) for i in range(n)]
    lambdas, components = _resolve_phase_components(psis, phis, tol)

    def run(aligned_phis) -> UepVerdict:
        v = _simultaneous_lu_matrices(psis, aligned_phis, cfg, tol)
        if v.verdict != "YES":
            return v
        local = np.kron(v.U, v.V)
        resid = frobenius(local @ rho.matrix @ local.conj().T - sigma.matrix)
        resid /= max(1.0, frobenius(sigma.matrix))
        v.residual = resid
        if resid > tol.residual_abs:
            v.verdict = "INCONCLUSIVE"
            v.detail = f"certificate failed the density-matrix check (residual={resid:.3e})"
        return v

    if len(components) == 1:
        return run([lam * phi for lam, phi in zip(lambdas, phis)])

    # disconnected phase graph: grid over one free phase per extra component
    free = components[1:]
    grid = np.exp(2j * np.pi * np.arange(phase_grid) / phase_grid)
    last = None
    for combo in product(range(phase_grid), repeat=len(free)):
        phases = lambdas.copy()
        for comp, gidx in zip(free, combo):
            phases[comp] = phases[comp] * grid[gidx]
        verdict = run([lam * phi for lam, phi in zip(phases, phis)])
        if verdict.verdict == "YES":
            verdict.aux["phase_grid_combo"] = combo
            return verdict
        last = verdict
    last = last or UepVerdict(verdict="INCONCLUSIVE", certainty="probabilistic")
    last.verdict = "INCONCLUSIVE"
    last.detail = (
        f"phase graph disconnected into {len(components)} components; "
        f"grid fallback with K={phase_grid} exhausted without a certificate"
    )
    return last
