import threading

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import cgauss, instance
from kahlerprod import groups, moment
from kahlerprod.ambient import AmbientSpace
from kahlerprod.errors import GroupError, IllConditioned, NonFreePoint, SingularLevelPoint
from kahlerprod.gallery import sphere_level, stiefel_level, torus_in_stiefel_level
from kahlerprod.groups import Torus, Unitary
from kahlerprod.moment import LevelSet, MomentMap

LEVELS = {
    "sphere": lambda: sphere_level(3),
    "stiefel": lambda: stiefel_level(2, 4),
    "stiefel-torus": lambda: torus_in_stiefel_level(3, 4, 2),
}


@pytest.fixture(params=sorted(LEVELS))
def level(request):
    return LEVELS[request.param]()


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_unitary_moment_is_equivariant(seed):
    rng = np.random.default_rng(seed)
    m = MomentMap(Unitary(3), AmbientSpace.matrices(5, 3))
    a = cgauss(rng, (5, 3))
    u = groups.random_element(m.group, rng)
    assert moment.check_equivariance(m, a, u) <= 1e-12 * max(1.0, np.linalg.norm(a) ** 2)


def test_torus_moment_is_invariant(rng):
    m = torus_in_stiefel_level(3, 4, 2).moment
    a = cgauss(rng, (4, 3))
    assert moment.check_equivariance(m, a, groups.random_element(m.group, rng)) < 1e-12


def test_moment_values():
    m = MomentMap(Unitary(2), AmbientSpace.matrices(3, 2))
    a = np.zeros((3, 2), dtype=complex)
    a[0, 0] = a[1, 1] = 1
    np.testing.assert_allclose(m(a), 1j * np.eye(2))
    s = sphere_level(2)
    assert s.residual(np.array([1, 0], dtype=complex)) < 1e-15


def test_liouville_and_hamiltonian_identities(level, rng):
    q = level.sample(rng)
    xi = groups.random_algebra(level.group, rng)
    scale = max(1.0, np.linalg.norm(q) ** 2)
    assert moment.liouville_residual(level.moment, q, xi) < 1e-12 * scale
    v = cgauss(rng, q.shape)
    assert moment.hamiltonian_residual(level.moment, q, xi, v) < 1e-11 * scale


def test_differential_matches_finite_differences(level, rng):
    q = cgauss(rng, level.ambient.shape)
    v = cgauss(rng, level.ambient.shape)
    h = 1e-6
    G = level.group
    fd = (groups.algebra_coords(G, level.moment(q + h * v)) - groups.algebra_coords(G, level.moment(q - h * v))) / (2 * h)
    D = level.differential(q)
    np.testing.assert_allclose(D @ level.ambient.realify(v), fd, atol=1e-7)


def test_samples_are_on_level_and_regular(level, rng):
    for _ in range(5):
        q = level.sample(rng)
        assert level.contains(q)
        assert moment.regularity(level, q) > 1e-3


def test_splitting_invariants(level, rng):
    q = level.sample(rng)
    s = level.split(q)
    V, H, P = s.vertical_frame, s.horizontal_frame, s.tangent_proj
    assert V.shape[1] == level.group.dim
    assert V.shape[1] + H.shape[1] == level.dim
    np.testing.assert_allclose(P @ P, P, atol=1e-12)
    np.testing.assert_allclose(V.T @ H, 0, atol=1e-12)
    np.testing.assert_allclose(P @ H, H, atol=1e-12)
    np.testing.assert_allclose(P @ V, V, atol=1e-12)
    np.testing.assert_allclose(level.differential(q) @ V, 0, atol=1e-12)
    # H is J-invariant
    Jm = level.ambient.complex_structure_matrix()
    np.testing.assert_allclose(s.horizontal_proj @ Jm @ H, Jm @ H, atol=1e-12)
    rk = moment.reduced_kahler_data(s)
    assert rk.compatibility_residual() < 1e-12
    assert rk.square_residual() < 1e-12


def test_vertical_coordinates_recover_generators(level, rng):
    q = level.sample(rng)
    s = level.split(q)
    coeffs = rng.standard_normal(level.group.dim)
    w = s.vertical_vector(coeffs) + s.horizontal_part(level.random_tangent(q, rng))
    np.testing.assert_allclose(s.vertical_coordinates(w), coeffs, atol=1e-10)


def test_random_tangent_is_tangent(level, rng):
    q = level.sample(rng)
    v = level.random_tangent(q, rng)
    assert level.tangency_residual(q, v) < 1e-12


def test_singular_point_raises():
    s = sphere_level(2)
    with pytest.raises(SingularLevelPoint):
        s.split(np.zeros(2, dtype=complex))
    st = stiefel_level(2, 3)
    a = np.zeros((3, 2), dtype=complex)
    a[0, 0] = 1
    with pytest.raises(SingularLevelPoint):
        st.split(a)


def test_nonfree_and_ill_conditioned():
    with pytest.raises(NonFreePoint):
        moment.orthonormalize(np.array([[1.0, 2.0], [0.0, 0.0]]))
    gens = np.array([[1.0, 1.0], [0.0, 1e-9]])
    with pytest.raises(IllConditioned):
        moment.solve_gram(gens, gens.T @ gens, np.ones(2))


def test_non_fixed_level_rejected():
    m = MomentMap(Unitary(2), AmbientSpace.matrices(3, 2))
    with pytest.raises(GroupError):
        LevelSet(m, 1j * np.diag([1.0, 2.0]), "stiefel", "stiefel")


def test_split_cache_is_consistent_across_threads(rng):
    acs = instance("stiefel:2,4").acs
    points = [acs.n1.sample(rng) for _ in range(8)]
    cache = moment.SplitCache(acs.n1, maxsize=4)
    out = {}

    def work(i):
        out[i] = [cache(p).horizontal_frame for p in points]

    threads = [threading.Thread(target=work, args=(i,)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for i in range(1, 4):
        for a, b in zip(out[0], out[i]):
            np.testing.assert_array_equal(a, b)
