import numpy as np
import pytest

from conftest import instance
from kahlerprod import gallery, groups, moment
from kahlerprod.campaign import truncation_probe
from kahlerprod.errors import ConfigError, GroupError

DIMS = {
    "sphere:1,2": (3, 5),
    "sphere:0,0": (1, 1),
    "stiefel:2,4": (12, 12),
    "stiefel:1,3": (5, 5),
    "stiefel-torus:2,4,1": (15, 15),
    "stiefel-torus:2,4,2": (14, 14),
    "calabi-eckmann:1,6": (3, 11),
}


@pytest.mark.parametrize("name,dims", sorted(DIMS.items()))
def test_dimensions(name, dims):
    inst = instance(name)
    assert inst.factor_dims == dims
    assert inst.dim == sum(dims)


@pytest.mark.parametrize("name", sorted(DIMS))
def test_instance_invariants(name, rng):
    acs = instance(name).acs
    for _ in range(3):
        q = acs.sample_point(rng)
        assert acs.level_residual(q) <= 1e-10
        for N, p in zip(acs.factors, (q.p1, q.p2)):
            assert moment.regularity(N, p) > 1e-3
            gens = N.ambient.realify_many(N.generators(p))
            assert np.linalg.matrix_rank(gens) == N.group.dim
            s = N.split(p)
            assert s.vertical_frame.shape[1] + s.horizontal_frame.shape[1] == N.dim
        w = acs.random_tangent(q, rng)
        assert (acs.apply(q, acs.apply(q, w)) + w).norm() <= 1e-12 * w.norm()


def test_stiefel_samples_are_orthonormal_frames(rng):
    acs = instance("stiefel-torus:2,4,2").acs
    q = acs.sample_point(rng)
    np.testing.assert_allclose(q.p1.conj().T @ q.p1, np.eye(2), atol=1e-12)


def test_sphere_1_3_1_matches_sphere_instance():
    a, b = instance("stiefel-torus:1,3,1"), instance("stiefel:1,3")
    assert a.factor_dims == b.factor_dims == (5, 5)
    assert a.abelian and b.abelian


def test_abelian_flags():
    assert instance("sphere:1,2").abelian
    assert instance("stiefel-torus:2,4,2").abelian
    assert not instance("stiefel:2,4").abelian
    assert instance("sphere:1,2").is_circle


@pytest.mark.parametrize("bad", ["torus:1,2", "sphere:1", "sphere:a,b", "stiefel-torus:2,4",
                                 "calabi-eckmann:1,2,3", "sphere:-1,2"])
def test_bad_names(bad):
    with pytest.raises(ConfigError):
        gallery.parse_instance(bad)


def test_invalid_parameters():
    with pytest.raises(GroupError):
        gallery.parse_instance("stiefel:3,2")
    with pytest.raises(GroupError):
        gallery.parse_instance("stiefel-torus:2,4,3")


def test_calabi_eckmann_default_truncation():
    inst = gallery.parse_instance("calabi-eckmann:1")
    assert inst.acs.n2.ambient.complex_dim == gallery.DEFAULT_TRUNCATION


def test_truncation_probe_profiles_agree():
    out = truncation_probe(1, 8, seed=1, samples=8)
    assert set(out) == {"8", "16"}
    for prof in out.values():
        assert prof["j-squared"] <= 1e-12
        assert prof["nijenhuis"] <= 1e-5


def test_circle_is_period_one(rng):
    inst = instance("stiefel:2,4")
    q = inst.acs.sample_point(rng)
    np.testing.assert_allclose(groups.flow(inst.group, inst.circle(), 1.0, q.p1), q.p1, atol=1e-12)
