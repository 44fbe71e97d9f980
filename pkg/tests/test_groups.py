import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import cgauss
from kahlerprod import groups
from kahlerprod.errors import GroupError, ShapeError
from kahlerprod.groups import Torus, Unitary

seeds = st.integers(0, 2**32 - 1)


@pytest.mark.parametrize("G", [Unitary(1), Unitary(2), Unitary(3), Torus.hopf(3), Torus.from_matrix([[1, 0], [1, 2]])])
def test_basis_coordinates_roundtrip(G):
    basis = groups.algebra_basis(G)
    assert len(basis) == G.dim
    for i, e in enumerate(basis):
        c = groups.algebra_coords(G, e)
        np.testing.assert_array_equal(c, np.eye(G.dim)[i])
    coeffs = np.arange(1.0, G.dim + 1)
    np.testing.assert_allclose(groups.algebra_coords(G, groups.from_coords(G, coeffs)), coeffs)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_exp_of_skew_is_unitary(seed):
    G = Unitary(3)
    rng = np.random.default_rng(seed)
    u = groups.exp(G, groups.random_algebra(G, rng))
    np.testing.assert_allclose(u.conj().T @ u, np.eye(3), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_action_is_a_left_action(seed):
    rng = np.random.default_rng(seed)
    for G, shape in ((Unitary(2), (4, 2)), (Torus.from_matrix([[1, 0], [0, 1], [1, 1]]), (3,))):
        q = cgauss(rng, shape)
        g1, g2 = groups.random_element(G, rng), groups.random_element(G, rng)
        lhs = groups.act(G, g2, groups.act(G, g1, q))
        rhs = groups.act(G, groups.compose(G, g2, g1), q)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)
        np.testing.assert_allclose(groups.act(G, groups.identity(G), q), q, atol=1e-15)


def test_action_is_complex_linear_isometry(rng):
    G = Unitary(2)
    u = groups.random_element(G, rng)
    a, b = cgauss(rng, (4, 2)), cgauss(rng, (4, 2))
    np.testing.assert_allclose(groups.act(G, u, 1j * a), 1j * groups.act(G, u, a), atol=1e-14)
    h = np.trace(groups.act(G, u, a) @ groups.act(G, u, b).conj().T)
    assert np.isclose(h, np.trace(a @ b.conj().T), atol=1e-13)


@pytest.mark.parametrize("G,shape", [(Unitary(2), (3, 2)), (Torus.from_matrix([[1], [2], [-1]]), (3,))])
def test_generator_is_velocity_of_flow(G, shape, rng):
    q = cgauss(rng, shape)
    xi = groups.random_algebra(G, rng)
    h = 1e-6
    fd = (groups.flow(G, xi, h, q) - groups.flow(G, xi, -h, q)) / (2 * h)
    np.testing.assert_allclose(fd, groups.generator(G, xi, q), atol=1e-8)


def test_unitary_generator_convention(rng):
    # A ξ is the velocity of t ↦ act(exp(-tξ), A)
    G = Unitary(2)
    q = cgauss(rng, (3, 2))
    xi = groups.random_algebra(G, rng)
    h = 1e-6
    fd = (groups.act(G, groups.exp(G, -h * xi), q) - groups.act(G, groups.exp(G, h * xi), q)) / (2 * h)
    np.testing.assert_allclose(fd, groups.generator(G, xi, q), atol=1e-8)


def test_bracket_and_adjoint(rng):
    G = Unitary(3)
    xi, eta = groups.random_algebra(G, rng), groups.random_algebra(G, rng)
    z = groups.bracket(G, xi, eta)
    np.testing.assert_allclose(z, -z.conj().T, atol=1e-14)
    np.testing.assert_allclose(z, -groups.bracket(G, eta, xi))
    u = groups.random_element(G, rng)
    # Ad is a Lie algebra automorphism
    np.testing.assert_allclose(groups.adjoint(G, u, z),
                               groups.bracket(G, groups.adjoint(G, u, xi), groups.adjoint(G, u, eta)), atol=1e-12)
    np.testing.assert_array_equal(groups.bracket(Torus.hopf(2), np.ones(1), np.ones(1)), np.zeros(1))


def test_validation_errors():
    G = Unitary(2)
    with pytest.raises(GroupError):
        groups.check_skew(G, np.eye(2))
    with pytest.raises(GroupError):
        groups.check_unitary(G, 2 * np.eye(2))
    with pytest.raises(ShapeError):
        groups.act(G, np.eye(2), np.ones((3, 3)))
    with pytest.raises(ShapeError):
        groups.act(Torus.hopf(3), np.zeros(1), np.ones(2))
    with pytest.raises(GroupError):
        Torus(((1.5,),))
    with pytest.raises(GroupError):
        Unitary(0)
    with pytest.raises(GroupError):
        groups.bracket(G, np.zeros((2, 2)), np.zeros((2, 2)), Unitary(3))


def test_circle_weights():
    np.testing.assert_array_equal(groups.circle_weights(Torus.hopf(3), np.ones(1), 3), [1, 1, 1])
    G = Torus.from_matrix([[1, 0], [2, 1]])
    np.testing.assert_array_equal(groups.circle_weights(G, np.ones(2), 2), [1, 3])
    U = Unitary(2)
    np.testing.assert_array_equal(groups.circle_weights(U, groups.circle_generator(U), 8), np.ones(8))
    with pytest.raises(GroupError):
        groups.circle_weights(U, np.diag([1j, 2j]), 8)
    with pytest.raises(GroupError):
        groups.circle_weights(Torus.hopf(2), np.array([0.5]), 2)


def test_circle_has_period_one(rng):
    for G, shape in ((Unitary(2), (4, 2)), (Torus.hopf(3), (3,))):
        q = cgauss(rng, shape)
        zeta = groups.circle_generator(G)
        np.testing.assert_allclose(groups.flow(G, zeta, 1.0, q), q, atol=1e-12)
        assert np.linalg.norm(groups.flow(G, zeta, 0.5, q) - q) > 1.0


def test_torus_equal_mod_integers():
    assert groups.torus_equal([0.25, 1.0], [1.25, 0.0])
    assert not groups.torus_equal([0.25], [0.5])
