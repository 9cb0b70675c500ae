import numpy as np
import pytest

from uniequiv import (
    InputError,
    InvalidAlgebraError,
    MatrixPolynomial,
    SamplerConfig,
    Tolerances,
    UepInstance,
    build_linear_system,
    decide_invertible_equivalence,
    decide_uep,
    extract_unitaries,
    full_algebra,
    matrix_algebra,
    sample_invertible,
    singular_value_prefilter,
    solve_solution_space,
    uep_instance_full,
)
from uniequiv.oracle import random_yes_instance
from uniequiv.solver import SolutionSpace, draw_candidate, per_trial_failure_bound

from conftest import ginibre

CFG = SamplerConfig(seed=17)


def _space(inst, tol=Tolerances()):
    return solve_solution_space(build_linear_system(inst, tol), tol)


class TestBuildSystem:
    def test_scalar_instance(self):
        inst = uep_instance_full(1, 1, [(np.array([[2.0]]), np.array([[2.0]]))])
        system = build_linear_system(inst)
        assert system.matrix.shape == (4, 4)
        space = solve_solution_space(system)
        assert space.real_dimension == 2
        # the span must contain (1, 1) and (i, i)
        stacked = np.column_stack([
            [A[0, 0].real, A[0, 0].imag, B[0, 0].real, B[0, 0].imag]
            for A, B in space.basis
        ])
        for target in ([1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0]):
            x, *_ = np.linalg.lstsq(stacked, np.asarray(target), rcond=None)
            assert np.linalg.norm(stacked @ x - target) < 1e-10

    def test_zero_pairs_leave_everything_free(self):
        Z = np.zeros((2, 2))
        inst = uep_instance_full(2, 2, [(Z, Z)])
        space = _space(inst)
        assert space.real_dimension == 2 * (4 + 4)

    def test_identity_pair_forces_equal_blocks(self):
        I2 = np.eye(2)
        inst = uep_instance_full(2, 2, [(I2, I2)])
        space = _space(inst)
        assert space.real_dimension == 2 * 4
        for A, B in space.basis:
            assert np.linalg.norm(A - B) < 1e-10

    def test_rejects_unverified_algebra(self):
        bad = matrix_algebra([np.array([[0.0, 1.0], [0.0, 0.0]])])
        inst = UepInstance(d1=2, d2=2, pairs=((np.eye(2), np.eye(2)),),
                           G1=bad, G2=full_algebra(2))
        with pytest.raises(InvalidAlgebraError):
            build_linear_system(inst)

    def test_basis_pairs_satisfy_equations(self, rng):
        inst, _ = random_yes_instance(3, 2, 2, seed=5)
        space = _space(inst)
        assert space.real_dimension >= 2
        for A, B in space.basis:
            scale = max(1.0, np.linalg.norm(A), np.linalg.norm(B))
            for X, Y in inst.pairs:
                assert np.linalg.norm(A @ X - Y @ B) <= 1e-8 * scale
                assert np.linalg.norm(X @ B.conj().T - A.conj().T @ Y) <= 1e-8 * scale

    def test_real_linearity_of_solutions(self, rng):
        inst, _ = random_yes_instance(2, 3, 1, seed=8)
        space = _space(inst)
        a, b = rng.standard_normal(2)
        (A1, B1), (A2, B2) = space.basis[0], space.basis[1]
        A, B = a * A1 + b * A2, a * B1 + b * B2
        scale = max(1.0, np.linalg.norm(A), np.linalg.norm(B))
        for X, Y in inst.pairs:
            assert np.linalg.norm(A @ X - Y @ B) <= 1e-8 * scale
            assert np.linalg.norm(X @ B.conj().T - A.conj().T @ Y) <= 1e-8 * scale


class TestSampler:
    def test_identity_span_succeeds_first_trial(self):
        basis = ((np.eye(2), np.eye(2)), (1j * np.eye(2), 1j * np.eye(2)))
        space = SolutionSpace(basis=basis, real_dimension=2, d1=2, d2=2)
        result = sample_invertible(space, CFG)
        assert result is not None and result.trials_used == 1

    def test_shared_kernel_never_invertible(self):
        E11 = np.diag([1.0, 0.0]).astype(complex)
        space = SolutionSpace(basis=((E11, E11),), real_dimension=1, d1=2, d2=2)
        assert sample_invertible(space, CFG) is None

    def test_forced_zero_block(self):
        # X = (1), Y = (0): A X = Y B forces A = 0 and X B^dag = A^dag Y
        # forces B = 0 as well, so the space is trivial
        inst = uep_instance_full(1, 1, [(np.array([[1.0]]), np.array([[0.0]]))])
        space = _space(inst)
        assert space.real_dimension == 0
        verdict = decide_uep(inst, CFG)
        assert verdict.verdict == "NO" and verdict.certainty == "exact"

    def test_probabilistic_no_reports_bound(self, monkeypatch):
        # exhausted sampling must surface the Schwartz-Zippel bound
        import uniequiv.solver as solver_mod
        monkeypatch.setattr(solver_mod, "sample_invertible", lambda *a, **kw: None)
        inst, _ = random_yes_instance(2, 3, 0, seed=91)
        verdict = decide_uep(inst, CFG)
        assert verdict.verdict == "NO" and verdict.certainty == "probabilistic"
        assert verdict.trials_used == CFG.trials
        assert verdict.failure_bound == pytest.approx(
            per_trial_failure_bound(2, 3, CFG.sample_max) ** CFG.trials
        )

    def test_draw_is_deterministic(self):
        basis = ((np.eye(2), np.eye(2)), (1j * np.eye(2), 1j * np.eye(2)))
        space = SolutionSpace(basis=basis, real_dimension=2, d1=2, d2=2)
        A1, B1 = draw_candidate(space, CFG, 0)
        A2, B2 = draw_candidate(space, CFG, 0)
        assert np.array_equal(A1, A2) and np.array_equal(B1, B2)


class TestExtract:
    def test_positive_scalings(self):
        U, V = extract_unitaries(2 * np.eye(3), 3 * np.eye(2))
        assert np.allclose(U, np.eye(3), atol=1e-12)
        assert np.allclose(V, np.eye(2), atol=1e-12)

    def test_positive_diagonal(self):
        U, _ = extract_unitaries(np.diag([1.0, 2.0]), np.eye(2))
        assert np.allclose(U, np.eye(2), atol=1e-12)

    def test_full_pipeline_on_yes_instance(self):
        inst, _ = random_yes_instance(3, 3, 2, seed=21)
        space = _space(inst)
        found = sample_invertible(space, CFG)
        U, V = extract_unitaries(found.A, found.B)
        assert np.linalg.norm(U.conj().T @ U - np.eye(3)) <= 1e-8
        assert np.linalg.norm(V.conj().T @ V - np.eye(3)) <= 1e-8
        for X, Y in inst.pairs:
            assert np.linalg.norm(U @ X @ V.conj().T - Y) <= 1e-8 * max(1.0, np.linalg.norm(Y))

    def test_roundtrip_extracted_pair_solves_system(self):
        # the extracted (U, V) must itself solve the linearized system
        inst, _ = random_yes_instance(2, 4, 1, seed=33)
        space = _space(inst)
        found = sample_invertible(space, CFG)
        U, V = extract_unitaries(found.A, found.B)
        for X, Y in inst.pairs:
            assert np.linalg.norm(U @ X - Y @ V) <= 1e-8
            assert np.linalg.norm(X @ V.conj().T - U.conj().T @ Y) <= 1e-8


class TestDecide:
    def test_swapped_diagonal_is_yes(self):
        inst = uep_instance_full(2, 2, [(np.diag([1.0, 2.0]), np.diag([2.0, 1.0]))])
        verdict = decide_uep(inst, CFG)
        assert verdict.verdict == "YES"
        assert verdict.residual <= 1e-8

    def test_rank_mismatch_is_exact_no(self):
        inst = uep_instance_full(2, 2, [(np.eye(2), np.diag([1.0, 0.0]))])
        verdict = decide_uep(inst, CFG)
        assert verdict.verdict == "NO" and verdict.certainty == "exact"

    @pytest.mark.parametrize("seed", range(8))
    def test_random_yes_instances(self, seed):
        rng = np.random.default_rng(seed)
        d1, d2 = rng.integers(1, 6, size=2)
        m = int(rng.integers(0, 5))
        inst, _ = random_yes_instance(int(d1), int(d2), m, seed=seed + 100)
        verdict = decide_uep(inst, SamplerConfig(seed=seed))
        assert verdict.verdict == "YES"
        assert verdict.residual <= 1e-8
        assert np.linalg.norm(verdict.U.conj().T @ verdict.U - np.eye(int(d1))) <= 1e-8
        assert np.linalg.norm(verdict.V.conj().T @ verdict.V - np.eye(int(d2))) <= 1e-8

    def test_scaling_invariance(self):
        inst, _ = random_yes_instance(2, 3, 1, seed=55)
        scaled = UepInstance(
            d1=2, d2=3,
            pairs=tuple((3.0 * X, 3.0 * Y) for X, Y in inst.pairs),
            G1=inst.G1, G2=inst.G2,
        )
        v1 = decide_uep(inst, CFG)
        v2 = decide_uep(scaled, CFG)
        assert v1.verdict == v2.verdict == "YES"
        assert v1.solution_dimension == v2.solution_dimension

    def test_identity_pair_trick_equalizes_unitaries(self):
        # appending (I, I) forces U = V, turning UEP into similarity
        rng = np.random.default_rng(77)
        from conftest import haar
        W = haar(3, rng)
        Xs = [ginibre(3, 3, rng) for _ in range(2)]
        pairs = [(X, W @ X @ W.conj().T) for X in Xs] + [(np.eye(3), np.eye(3))]
        inst = uep_instance_full(3, 3, pairs)
        verdict = decide_uep(inst, CFG)
        assert verdict.verdict == "YES"
        assert np.linalg.norm(verdict.U - verdict.V) <= 1e-7


class TestPrefilter:
    def test_identical_pairs_pass(self, rng):
        X = ginibre(2, 3, rng)
        ok, idx = singular_value_prefilter([(X, X)])
        assert ok and idx is None

    def test_rank_mismatch_fails_at_index(self):
        ok, idx = singular_value_prefilter([(np.eye(2), np.eye(2)), (np.eye(2), np.diag([1.0, 0.0]))])
        assert not ok and idx == 1

    def test_yes_instances_always_pass(self):
        for seed in range(10):
            inst, _ = random_yes_instance(3, 2, 2, seed=seed)
            ok, _ = singular_value_prefilter(inst.pairs)
            assert ok


class TestInvertibleEquivalence:
    def test_equal_polynomials(self, rng):
        P = MatrixPolynomial(tuple(ginibre(2, 3, rng) for _ in range(3)))
        verdict = decide_invertible_equivalence(P, P, CFG)
        assert verdict.verdict == "YES"
        assert verdict.certificate_kind == "invertible"
        assert verdict.residual <= 1e-10

    def test_scalar_rescaling(self):
        E11 = np.zeros((2, 2)); E11[0, 0] = 1.0
        P = MatrixPolynomial((np.zeros((2, 2)), E11))
        Q = MatrixPolynomial((np.zeros((2, 2)), 5.0 * E11))
        verdict = decide_invertible_equivalence(P, Q, CFG)
        assert verdict.verdict == "YES"
        A, B = verdict.U, verdict.V
        for X, Y in zip(P.coefficients, Q.coefficients):
            assert np.linalg.norm(A @ X - Y @ B) <= 1e-6 * max(1.0, np.linalg.norm(A @ X))

    def test_rank_profile_mismatch_is_no(self, rng):
        P = MatrixPolynomial((np.eye(2), np.eye(2)))           # ranks (2, 2)
        Q = MatrixPolynomial((np.diag([1.0, 0.0]), np.eye(2)))  # ranks (1, 2)
        verdict = decide_invertible_equivalence(P, Q, CFG)
        assert verdict.verdict == "NO"
        assert verdict.certainty == "exact"

    def test_planted_invertible_pair(self, rng):
        A = ginibre(3, 3, rng) + 2 * np.eye(3)
        B = ginibre(2, 2, rng) + 2 * np.eye(2)
        P = MatrixPolynomial(tuple(ginibre(3, 2, rng) for _ in range(3)))
        Q = MatrixPolynomial(tuple(A @ C @ np.linalg.inv(B) for C in P.coefficients))
        verdict = decide_invertible_equivalence(P, Q, CFG)
        assert verdict.verdict == "YES" and verdict.residual <= 1e-8

    def test_rejects_shape_mismatch(self, rng):
        P = MatrixPolynomial((ginibre(2, 2, rng),))
        Q = MatrixPolynomial((ginibre(2, 3, rng),))
        with pytest.raises(InputError):
            decide_invertible_equivalence(P, Q, CFG)
