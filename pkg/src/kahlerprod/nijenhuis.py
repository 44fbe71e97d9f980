"""Finite-difference Lie brackets on N₁ × N₂ and the Nijenhuis tensor of J."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import groups
from .product import ProductACS, ProductPoint, ProductTangent

# [ξ_N, η_N] = BRACKET_SIGN · [ξ, η]_N for the generator convention of groups.generator.
# Fixed against the exact generator of the bracket in tests/test_nijenhuis.py.
BRACKET_SIGN = 1.0

EPS_CBRT = np.finfo(float).eps ** (1 / 3)


@dataclass(frozen=True, eq=False)
class GeneratorField:
    """ξ_N on factor 1 or 2, zero on the other factor."""

    xi: np.ndarray
    factor: int


@dataclass(frozen=True, eq=False)
class ProjectedConstant:
    """Tangent projection of a fixed ambient direction on one factor."""

    u: np.ndarray
    factor: int


@dataclass(frozen=True, eq=False)
class JImage:
    inner: VectorField


@dataclass(frozen=True, eq=False)
class SumField:
    terms: tuple[VectorField, ...]


VectorField = GeneratorField | ProjectedConstant | JImage | SumField


@dataclass(frozen=True)
class BracketConfig:
    """Central differences along retractions with step ``step``.

    ``step=None`` picks eps^{1/3} · (1 + ‖q‖).
    """

    step: float | None = None

    def __post_init__(self):
        if self.step is not None and not self.step > 0:
            raise ValueError("bracket step must be positive")

    def step_at(self, q: ProductPoint) -> float:
        return self.step if self.step is not None else EPS_CBRT * (1.0 + q.norm())


def _check_factor(factor: int) -> int:
    if factor not in (1, 2):
        raise ValueError(f"factor must be 1 or 2, got {factor}")
    return factor - 1


def evaluate(acs: ProductACS, field: VectorField, q: ProductPoint) -> ProductTangent:
    if isinstance(field, GeneratorField):
        return acs.generator_field(_check_factor(field.factor), field.xi, q)
    if isinstance(field, ProjectedConstant):
        f = _check_factor(field.factor)
        N = acs.factors[f]
        zero = ProductTangent.zeros_like(q)
        if f == 0:
            return ProductTangent(N.project(q.p1, field.u), zero.v2)
        return ProductTangent(zero.v1, N.project(q.p2, field.u))
    if isinstance(field, JImage):
        return acs.apply(q, evaluate(acs, field.inner, q))
    if isinstance(field, SumField):
        out = ProductTangent.zeros_like(q)
        for term in field.terms:
            out = out + evaluate(acs, term, q)
        return out
    raise TypeError(f"not a vector field spec: {field!r}")


def directional_derivative(acs: ProductACS, Y: VectorField, q: ProductPoint, direction: ProductTangent,
                           h: float) -> ProductTangent:
    """(Y(R(q, h d)) - Y(R(q, -h d))) / 2h."""
    forward = evaluate(acs, Y, acs.retract(q, direction * h))
    backward = evaluate(acs, Y, acs.retract(q, direction * (-h)))
    return (forward - backward) / (2 * h)


def lie_bracket(acs: ProductACS, X: VectorField, Y: VectorField, q: ProductPoint,
                cfg: BracketConfig | None = None) -> ProductTangent:
    """[X, Y](q) ≈ D_{X(q)} Y - D_{Y(q)} X, projected onto T_q(N₁ × N₂)."""
    h = (cfg or BracketConfig()).step_at(q)
    x = evaluate(acs, X, q)
    y = evaluate(acs, Y, q)
    raw = directional_derivative(acs, Y, q, x, h) - directional_derivative(acs, X, q, y, h)
    return acs.project(q, raw)


def nijenhuis_tensor(acs: ProductACS, X: VectorField, Y: VectorField, q: ProductPoint,
                     cfg: BracketConfig | None = None) -> ProductTangent:
    """N_J(X, Y) = [JX, JY] - [X, Y] - J[JX, Y] - J[X, JY]."""
    JX, JY = JImage(X), JImage(Y)
    return (lie_bracket(acs, JX, JY, q, cfg)
            - lie_bracket(acs, X, Y, q, cfg)
            - acs.apply(q, lie_bracket(acs, JX, Y, q, cfg))
            - acs.apply(q, lie_bracket(acs, X, JY, q, cfg)))


def vertical_oracle(acs: ProductACS, xi, eta, q: ProductPoint) -> ProductTangent:
    """Exact N_J(ξ_{N₁}, η_{N₂}).

    [JY₁, Y₂] = (0, [ξ_N, η_N]) and [Y₁, JY₂] = (-[ξ_N, η_N], 0), so
    N_J = -J(-[ξ_N, η_N](p₁), [ξ_N, η_N](p₂)).
    """
    zeta = BRACKET_SIGN * groups.bracket(acs.group, xi, eta)
    inner = ProductTangent(
        -groups.generator(acs.n1.group, zeta, q.p1),
        groups.generator(acs.n2.group, zeta, q.p2),
    )
    return -acs.apply(q, inner)
