"""The almost complex structure J = (J₁ ⊕ T₁) ⊕ (J₂ ⊕ T₂) on N₁ × N₂."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import groups
from .errors import GroupError
from .moment import LevelSet, SplitCache, Splitting, solve_gram


@dataclass(frozen=True, eq=False)
class ProductPoint:
    p1: np.ndarray
    p2: np.ndarray

    def norm(self) -> float:
        return float(np.sqrt(np.linalg.norm(self.p1) ** 2 + np.linalg.norm(self.p2) ** 2))


@dataclass(frozen=True, eq=False)
class ProductTangent:
    v1: np.ndarray
    v2: np.ndarray

    def __add__(self, other: ProductTangent) -> ProductTangent:
        return ProductTangent(self.v1 + other.v1, self.v2 + other.v2)

    def __sub__(self, other: ProductTangent) -> ProductTangent:
        return ProductTangent(self.v1 - other.v1, self.v2 - other.v2)

    def __neg__(self) -> ProductTangent:
        return ProductTangent(-self.v1, -self.v2)

    def __mul__(self, c: float) -> ProductTangent:
        return ProductTangent(c * self.v1, c * self.v2)

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> ProductTangent:
        return ProductTangent(self.v1 / c, self.v2 / c)

    def norm(self) -> float:
        return float(np.sqrt(np.linalg.norm(self.v1) ** 2 + np.linalg.norm(self.v2) ** 2))

    def flat(self) -> np.ndarray:
        return np.concatenate([self.v1.ravel(), self.v2.ravel()])

    @classmethod
    def zeros_like(cls, q: ProductPoint) -> ProductTangent:
        return cls(np.zeros_like(q.p1, dtype=complex), np.zeros_like(q.p2, dtype=complex))


@dataclass(frozen=True)
class Decomposition:
    h1: np.ndarray
    a: np.ndarray
    h2: np.ndarray
    b: np.ndarray


class ProductACS:
    """J on N₁ × N₂ for one group G acting on both factors.

    ``basis`` is the Lie algebra basis used to read off vertical coefficients;
    J itself does not depend on it.
    """

    def __init__(self, n1: LevelSet, n2: LevelSet, basis=None):
        if not groups.same_algebra(n1.group, n2.group):
            raise GroupError(f"factors carry different groups: {n1.group} vs {n2.group}")
        self.n1 = n1
        self.n2 = n2
        self.basis = tuple(groups.algebra_basis(n1.group) if basis is None else basis)
        self._splits = (SplitCache(n1, self.basis), SplitCache(n2, self.basis))

    @property
    def factors(self) -> tuple[LevelSet, LevelSet]:
        return self.n1, self.n2

    @property
    def group(self):
        return self.n1.group

    @property
    def dim(self) -> int:
        return self.n1.dim + self.n2.dim

    def split(self, q: ProductPoint) -> tuple[Splitting, Splitting]:
        return self._splits[0](q.p1), self._splits[1](q.p2)

    def _gens(self, factor: int, p) -> np.ndarray:
        N = self.factors[factor]
        return N.ambient.realify_many(groups.generator(N.group, xi, p) for xi in self.basis)

    def generator_field(self, factor: int, xi, q: ProductPoint) -> ProductTangent:
        N = self.factors[factor]
        gen = groups.generator(N.group, xi, (q.p1, q.p2)[factor])
        out = ProductTangent.zeros_like(q)
        return ProductTangent(gen, out.v2) if factor == 0 else ProductTangent(out.v1, gen)

    def _vertical(self, factor: int, p, w) -> tuple[np.ndarray, np.ndarray]:
        """(horizontal part, vertical coefficients) of a tangent vector w at p."""
        N = self.factors[factor]
        gens = self._gens(factor, p)
        w_real = N.ambient.realify(w)
        coeffs = solve_gram(gens, gens.T @ gens, w_real)
        return N.ambient.complexify(w_real - gens @ coeffs), coeffs

    def _vertical_vector(self, factor: int, p, coeffs) -> np.ndarray:
        N = self.factors[factor]
        return N.ambient.complexify(self._gens(factor, p) @ coeffs)

    def decompose(self, q: ProductPoint, w: ProductTangent) -> Decomposition:
        h1, a = self._vertical(0, q.p1, w.v1)
        h2, b = self._vertical(1, q.p2, w.v2)
        return Decomposition(h1, a, h2, b)

    def apply(self, q: ProductPoint, w: ProductTangent) -> ProductTangent:
        d = self.decompose(q, w)
        return ProductTangent(
            1j * d.h1 - self._vertical_vector(0, q.p1, d.b),
            1j * d.h2 + self._vertical_vector(1, q.p2, d.a),
        )

    def project(self, q: ProductPoint, w: ProductTangent) -> ProductTangent:
        return ProductTangent(self.n1.project(q.p1, w.v1), self.n2.project(q.p2, w.v2))

    def sample_point(self, rng: np.random.Generator) -> ProductPoint:
        return ProductPoint(self.n1.sample(rng), self.n2.sample(rng))

    def random_tangent(self, q: ProductPoint, rng: np.random.Generator) -> ProductTangent:
        return ProductTangent(self.n1.random_tangent(q.p1, rng), self.n2.random_tangent(q.p2, rng))

    def retract(self, q: ProductPoint, w: ProductTangent) -> ProductPoint:
        return ProductPoint(self.n1.retract(q.p1, w.v1), self.n2.retract(q.p2, w.v2))

    def level_residual(self, q: ProductPoint) -> float:
        return max(self.n1.residual(q.p1), self.n2.residual(q.p2))

    def tangency_residual(self, q: ProductPoint, w: ProductTangent) -> float:
        return max(self.n1.tangency_residual(q.p1, w.v1), self.n2.tangency_residual(q.p2, w.v2))


def decompose(acs: ProductACS, q: ProductPoint, w: ProductTangent) -> Decomposition:
    return acs.decompose(q, w)


def apply_J(acs: ProductACS, q: ProductPoint, w: ProductTangent) -> ProductTangent:
    return acs.apply(q, w)


def reassemble(acs: ProductACS, q: ProductPoint, d: Decomposition) -> ProductTangent:
    return ProductTangent(
        d.h1 + acs._vertical_vector(0, q.p1, d.a),
        d.h2 + acs._vertical_vector(1, q.p2, d.b),
    )


def j_squared_residuals(acs: ProductACS, q: ProductPoint, samples: int, rng: np.random.Generator):
    """Relative residuals ‖J(Jw) + w‖/‖w‖ with the sampled tangents."""
    out = []
    for _ in range(samples):
        w = acs.random_tangent(q, rng)
        r = (acs.apply(q, acs.apply(q, w)) + w).norm() / w.norm()
        out.append((r, w))
    return out


def check_J_squared(acs: ProductACS, q: ProductPoint, samples: int = 100, rng=None) -> float:
    rng = np.random.default_rng(0) if rng is None else rng
    return max(r for r, _ in j_squared_residuals(acs, q, samples, rng))
