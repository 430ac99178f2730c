import numpy as np
import pytest

from schwarz1d import catalog, decompose
from schwarz1d.exceptions import SingularMatrixError
from schwarz1d.interface import (
    InterfaceLU,
    MatrixFreeOperator,
    MatrixOperator,
    Preconditioner,
    build_d,
    build_L,
    build_preconditioner,
    solve_interface_fixed_pc,
    solve_interface_krylov,
    solve_interface_lu,
)
from schwarz1d.schwarz import apply_R, classical_iterate, initial_guess, left_index, right_index

from conftest import prepared_cluster, small_domain


def minus_one_pattern(n_sub):
    L = np.zeros((2 * n_sub - 2, 2 * n_sub - 2))
    for j in range(n_sub):
        if j > 0:
            L[right_index(j - 1), left_index(j)] = -1
        if j < n_sub - 1:
            L[left_index(j + 1), right_index(j)] = -1
    return L


def test_p_zero_gives_minus_one_pattern():
    dec = decompose(small_domain(), 4)
    with prepared_cluster(dec, p=0.0) as cl:
        assert np.array_equal(build_L(cl), minus_one_pattern(4))
        assert not build_d(cl).any()


def test_basis_column_oracle(cluster4):
    L = build_L(cluster4)
    R0 = apply_R(cluster4, np.zeros(6))[0]
    for m in range(6):
        e = np.zeros(6)
        e[m] = 1.0
        assert np.max(np.abs(L[:, m] - (apply_R(cluster4, e)[0] - R0))) <= 1e-11


def test_d_is_R_of_zero(cluster4):
    assert np.max(np.abs(build_d(cluster4) - apply_R(cluster4, np.zeros(6))[0])) <= 1e-11


def test_d_vanishes_for_zero_data():
    dec = decompose(small_domain(), 3)
    with prepared_cluster(dec, u=[np.zeros(m.n_nodes) for m in dec.meshes]) as cl:
        assert not build_d(cl).any()


def test_affine_identity(cluster4, rng):
    L, d = build_L(cluster4), build_d(cluster4)
    for _ in range(5):
        g = rng.normal(size=6) * 10 + 1j * rng.normal(size=6)
        err = np.max(np.abs(apply_R(cluster4, g)[0] - (L @ g + d)))
        assert err <= 1e-10 * (1 + np.max(np.abs(g)))


@pytest.mark.parametrize("n_sub", [2, 3, 6])
def test_sparsity(n_sub):
    dec = decompose(small_domain(), n_sub)
    with prepared_cluster(dec, p=3.0) as cl:
        L = build_L(cl)
    # 4 entries per interior subdomain block, 2 for each end block
    assert np.count_nonzero(L) == 4 * n_sub - 6
    assert np.count_nonzero(np.diag(L)) == 0


def test_time_independent_L_is_constant():
    dec = decompose(small_domain(), 4)
    u1 = [np.ones(m.n_nodes) for m in dec.meshes]
    with prepared_cluster(dec, "neg_x2", n=1) as a, prepared_cluster(dec, "neg_x2", n=7, u=u1) as b:
        assert np.array_equal(build_L(a), build_L(b))
    with prepared_cluster(dec, "5tx", n=1) as a, prepared_cluster(dec, "5tx", n=7) as b:
        assert not np.array_equal(build_L(a), build_L(b))


def test_nonlinear_has_no_affine_splitting():
    dec = decompose(small_domain(), 2)
    with prepared_cluster(dec, "x2_10_cubic") as cl:
        with pytest.raises(ValueError):
            build_d(cl)
        with pytest.raises(ValueError):
            MatrixFreeOperator(cl)


def test_lu_basics(cluster4, rng):
    d = rng.normal(size=6) + 1j
    np.testing.assert_array_equal(solve_interface_lu(np.zeros((6, 6)), d), d)
    L = build_L(cluster4)
    d = build_d(cluster4)
    g = solve_interface_lu(L, d)
    assert np.linalg.norm(g - L @ g - d) <= 1e-10 * np.linalg.norm(d)
    np.testing.assert_array_equal(InterfaceLU(L).solve(d), g)
    assert InterfaceLU(np.zeros((0, 0))).solve(np.zeros(0)).size == 0


def test_lu_matches_iterative_limit():
    dec = decompose(small_domain(), 2)
    with prepared_cluster(dec, p=10.0) as cl:
        g_lu = solve_interface_lu(build_L(cl), build_d(cl))
        g_fp, _, _ = classical_iterate(cl, np.zeros(2), 1e-13)
    assert np.linalg.norm(g_lu - g_fp) <= 1e-8 * np.linalg.norm(g_lu)


def test_singular_interface():
    with pytest.raises(SingularMatrixError):
        InterfaceLU(np.eye(3))


def test_solver_equivalence(cluster4):
    L, d = build_L(cluster4), build_d(cluster4)
    ref = solve_interface_lu(L, d)
    g0 = initial_guess("random", 6, 0)
    sols = [classical_iterate(cluster4, g0, 1e-12)[0]]
    for method in ("gmres", "bicgstab"):
        sols.append(solve_interface_krylov(MatrixOperator(L), d, method, tol=1e-12, g0=g0)[0])
        op = MatrixFreeOperator(cluster4)
        sols.append(solve_interface_krylov(op, op.d, method, tol=1e-12, g0=g0)[0])
    for g in sols:
        assert np.linalg.norm(g - ref) <= 1e-7 * np.linalg.norm(ref)


def test_matrix_free_operator_matches_explicit(cluster4, rng):
    L = build_L(cluster4)
    op, mat = MatrixFreeOperator(cluster4), MatrixOperator(L)
    g = rng.normal(size=6) + 1j * rng.normal(size=6)
    np.testing.assert_allclose(op(g), mat(g), rtol=0, atol=1e-11)
    assert op.applications == 1 and mat.applications == 1


def test_krylov_identity_one_iteration(rng):
    d = rng.normal(size=5) + 1j * rng.normal(size=5)
    for method in ("gmres", "bicgstab"):
        g, k = solve_interface_krylov(MatrixOperator(np.zeros((5, 5))), d, method)
        assert k == 1
        np.testing.assert_allclose(g, d, rtol=1e-14)


def test_krylov_count_includes_initial_residual():
    # a 2x2 system converges in two Krylov steps; the nonzero guess costs one more
    dec = decompose(small_domain(), 2)
    with prepared_cluster(dec, p=45.0) as cl:
        L, d = build_L(cl), build_d(cl)
    g0 = initial_guess("random", 2, 0)
    assert solve_interface_krylov(MatrixOperator(L), d, "gmres", g0=g0)[1] == 3
    assert solve_interface_krylov(MatrixOperator(L), d, "gmres", g0=None)[1] == 2
    with pytest.raises(ValueError):
        solve_interface_krylov(MatrixOperator(L), d, "cg")


def test_preconditioner_roundtrip(rng):
    dec = decompose(small_domain(), 5)
    P = build_preconditioner(dec, 0.001, 20.0)
    y = rng.normal(size=8) + 1j * rng.normal(size=8)
    z = P.apply(y)
    assert np.linalg.norm(P.matrix() @ z - y) <= 1e-10 * np.linalg.norm(y)
    assert P.applications == 1


def test_preconditioner_free_equation_is_exact():
    dec = decompose(small_domain(), 4)
    P = build_preconditioner(dec, 0.001, 20.0)
    with prepared_cluster(dec, "zero", p=20.0) as cl:
        A = np.eye(6) - build_L(cl)
    B = np.column_stack([P.apply(A[:, m]) for m in range(6)])
    assert np.max(np.abs(B - np.eye(6))) <= 1e-10


def test_preconditioner_singular_at_p_zero():
    with pytest.raises(SingularMatrixError):
        build_preconditioner(decompose(small_domain(), 3), 0.001, 0.0)


def test_exact_preconditioner_converges_fast(cluster4, rng):
    P = Preconditioner(build_L(cluster4))
    for seed in range(3):
        g, k, _ = solve_interface_fixed_pc(cluster4, P, initial_guess("random", 6, seed), 1e-9)
        assert k <= 2


def test_fixed_pc_nonlinear():
    dec = decompose(small_domain(), 3)
    P = build_preconditioner(dec, 0.001, 10.0)
    with prepared_cluster(dec, "x2_10_cubic", p=10.0) as cl:
        g_pc, k_pc, _ = solve_interface_fixed_pc(cl, P, initial_guess("random", 4, 0), 1e-11)
        g_cl, k_cl, _ = classical_iterate(cl, initial_guess("random", 4, 0), 1e-11)
    assert k_pc < k_cl
    assert np.linalg.norm(g_pc - g_cl) <= 1e-8 * np.linalg.norm(g_cl)
