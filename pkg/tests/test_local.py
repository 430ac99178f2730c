import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schwarz1d import catalog
from schwarz1d.exceptions import ConvergenceError, SingularMatrixError
from schwarz1d.fem import Tridiag, build_local_system
from schwarz1d.local import factorize, factorize_matrix, local_rhs, solve_local_linear, solve_local_nonlinear
from schwarz1d.mesh import SubMesh


def crand(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def local(n=5, h=0.2, index=1, n_sub=3, dt=0.01, p=4.0, w=None, rng=None):
    m = SubMesh(index, n_sub, h * np.arange(n), h)
    w = np.zeros(n) if w is None else w
    return build_local_system(m, w, dt, p)


def test_identity_and_diagonal():
    n = 6
    eye = Tridiag(np.zeros(n - 1), np.ones(n, dtype=complex), np.zeros(n - 1))
    b = np.arange(n) + 1j
    np.testing.assert_array_equal(factorize_matrix(eye).solve(b), b)
    d = Tridiag(np.zeros(n - 1), np.full(n, 2j), np.zeros(n - 1))
    np.testing.assert_allclose(factorize_matrix(d).solve(b), b / 2j, rtol=1e-15)


def test_random_tridiagonal_vs_dense(rng):
    n = 6
    T = Tridiag(crand(rng, n - 1), crand(rng, n) + 4.0, crand(rng, n - 1))
    b = crand(rng, n)
    x = factorize_matrix(T).solve(b)
    A = T.to_dense()
    assert np.linalg.norm(A @ x - b) <= 1e-12 * np.linalg.norm(b)
    np.testing.assert_allclose(x, np.linalg.solve(A, b), rtol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**32 - 1))
def test_thomas_property(n, seed):
    r = np.random.default_rng(seed)
    lo, up = crand(r, n - 1), crand(r, n - 1)
    diag = crand(r, n) + 2.5 * (1 + np.abs(np.concatenate([[0], lo])) + np.abs(np.concatenate([up, [0]])))
    T = Tridiag(lo, diag, up)
    b = crand(r, n)
    x = factorize_matrix(T).solve(b)
    assert np.linalg.norm(T.to_dense() @ x - b) <= 1e-12 * np.linalg.norm(b)


def test_singular_pivot_detected():
    T = Tridiag(np.ones(2), np.array([0.0, 1.0, 1.0]), np.ones(2))
    with pytest.raises(SingularMatrixError):
        factorize_matrix(T)


def test_linear_zero_data():
    sys = local()
    v = solve_local_linear(factorize(sys), sys, np.zeros(5))
    assert not v.any()


def test_linear_vs_dense_oracle(rng):
    sys = local(w=rng.normal(size=5))
    u, l, r = crand(rng, 5), complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
    v = solve_local_linear(factorize(sys), sys, u, l, r)
    A = sys.robin_matrix().to_dense()
    b = (2j / sys.dt) * sys.mass.to_dense() @ u
    b[0] -= l
    b[-1] -= r
    np.testing.assert_allclose(v, np.linalg.solve(A, b), rtol=1e-12, atol=1e-12)


def test_linear_in_data(rng):
    sys = local(n=9, w=rng.normal(size=9))
    fac = factorize(sys)
    a = (crand(rng, 9), *crand(rng, 2))
    b = (crand(rng, 9), *crand(rng, 2))
    alpha, beta = 0.7 - 0.2j, -1.3 + 0.5j
    mix = [alpha * x + beta * y for x, y in zip(a, b)]
    lhs = solve_local_linear(fac, sys, *mix)
    rhs = alpha * solve_local_linear(fac, sys, *a) + beta * solve_local_linear(fac, sys, *b)
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * np.linalg.norm(rhs)


def test_factor_reuse_bitwise(rng):
    sys = local(n=7)
    u = crand(rng, 7)
    fac = factorize(sys)
    first = solve_local_linear(fac, sys, u, 1.0, 2.0)
    again = solve_local_linear(fac, sys, u, 1.0, 2.0)
    fresh = solve_local_linear(factorize(sys), sys, u, 1.0, 2.0)
    assert np.array_equal(first, again) and np.array_equal(first, fresh)


def test_nonlinear_zero_f_is_linear(rng):
    sys = local(n=7)
    fac = factorize(sys)
    u = crand(rng, 7)
    v, q = solve_local_nonlinear(fac, sys, u, 0.3, -0.1j, lambda z: np.zeros(z.size))
    assert q == 1
    np.testing.assert_array_equal(v, solve_local_linear(fac, sys, u, 0.3, -0.1j))


def test_nonlinear_zero_data():
    sys = local(n=7)
    f = lambda z: -np.abs(z) ** 2
    v, q = solve_local_nonlinear(factorize(sys), sys, np.zeros(7), 0.0, 0.0, f)
    assert q == 1 and not v.any()


def test_nonlinear_residual(rng):
    x = np.linspace(0, 1, 21)
    m = SubMesh(1, 3, x, x[1] - x[0])
    spec = catalog("x2_10_cubic")
    sys = build_local_system(m, spec.linear(0.0, x), 0.001, 5.0)
    f = lambda z: -np.abs(z) ** 2
    tol = 1e-12
    u = 0.8 * np.exp(1j * x)
    v, q = solve_local_nonlinear(factorize(sys), sys, u, 0.2, 0.1j, f, tol=tol)
    assert q > 1
    b = local_rhs(sys, u) - sys.mass.matvec(f(v) * v)
    b[0] -= 0.2
    b[-1] -= 0.1j
    res = sys.robin_matrix().matvec(v) - b
    # the residual equals A (zeta^q - zeta^{q+1}); scale by ||A||_inf
    anorm = np.max(np.abs(sys.robin_matrix().to_dense()).sum(axis=1))
    assert np.max(np.abs(res)) <= 10 * tol * anorm * max(1.0, np.max(np.abs(v)))


def test_nonlinear_non_convergence():
    sys = local(n=5, dt=10.0)
    with pytest.raises(ConvergenceError), np.errstate(all="ignore"):
        solve_local_nonlinear(factorize(sys), sys, np.ones(5, dtype=complex), 0, 0, lambda z: -1e6 * np.abs(z) ** 2, max_q=5)
    with pytest.raises(ValueError):
        solve_local_nonlinear(factorize(sys), sys, np.ones(5), 0, 0, lambda z: 0 * z, tol=0)


def test_rhs_shape_checked():
    sys = local()
    with pytest.raises(ValueError):
        local_rhs(sys, np.zeros(4))
