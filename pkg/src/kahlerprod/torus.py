"""The ℂ-action Ψ mixing two circle actions, its holomorphy, and its period lattice.

Ψ(a+ib, (x, y)) = (e^{2πi(A₁₁a + A₂₁b)}.x, e^{2πi(A₁₂a + A₂₂b)}.y) for an integer
mixing matrix A.  The orbit maps z ↦ Ψ(z, q) are J-holomorphic exactly when
A₂₁ = -A₁₂ and A₂₂ = A₁₁; for other invertible A the orbits are still
J-invariant surfaces, and Ψ_z commutes with J for every A.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

import numpy as np

from . import groups
from .errors import DegenerateMixing
from .product import ProductACS, ProductPoint, ProductTangent

DEFAULT_MIXING = ((1, 1), (1, -1))
# the nearest mixing whose orbit maps are J-holomorphic
HOLOMORPHIC_MIXING = ((1, 1), (-1, 1))
IDENTITY_MIXING = ((1, 0), (0, 1))


def _mixing(A) -> tuple[tuple[int, int], tuple[int, int]]:
    arr = np.asarray(A)
    if arr.shape != (2, 2):
        raise ValueError(f"mixing matrix must be 2x2, got shape {arr.shape}")
    if not np.all(np.equal(np.mod(arr, 1), 0)):
        raise ValueError("mixing matrix must have integer entries")
    return tuple(tuple(int(x) for x in row) for row in arr)


def det2(A) -> int:
    (a, b), (c, d) = _mixing(A)
    return a * d - b * c


def is_holomorphic_mixing(A) -> bool:
    (a11, a12), (a21, a22) = _mixing(A)
    return a21 == -a12 and a22 == a11


@dataclass(frozen=True, eq=False)
class PsiAction:
    """Ψ on the product of ``acs``, built from the period-1 circle ``circle`` in G."""

    acs: ProductACS
    mixing: tuple[tuple[int, int], tuple[int, int]] = DEFAULT_MIXING
    circle: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "mixing", _mixing(self.mixing))
        if self.circle is None:
            object.__setattr__(self, "circle", groups.circle_generator(self.acs.group))

    @property
    def det(self) -> int:
        return det2(self.mixing)

    def phases(self, z: complex) -> tuple[float, float]:
        (a11, a12), (a21, a22) = self.mixing
        a, b = z.real, z.imag
        return a11 * a + a21 * b, a12 * a + a22 * b

    def push(self, z: complex, w: ProductTangent) -> ProductTangent:
        """dΨ_z, which is the same linear rotation as Ψ_z."""
        f1, f2 = self.phases(complex(z))
        G1, G2 = self.acs.n1.group, self.acs.n2.group
        return ProductTangent(groups.flow(G1, self.circle, f1, w.v1), groups.flow(G2, self.circle, f2, w.v2))

    def orbit_velocities(self, z: complex, q: ProductPoint) -> tuple[ProductTangent, ProductTangent]:
        """(dΨ_q(1), dΨ_q(i)) at the parameter z, attached at Ψ(z, q)."""
        moved = psi_apply(self, z, q)
        (a11, a12), (a21, a22) = self.mixing
        g1 = groups.generator(self.acs.n1.group, self.circle, moved.p1)
        g2 = groups.generator(self.acs.n2.group, self.circle, moved.p2)
        return ProductTangent(a11 * g1, a12 * g2), ProductTangent(a21 * g1, a22 * g2)


def psi_apply(act: PsiAction, z: complex, q: ProductPoint) -> ProductPoint:
    f1, f2 = act.phases(complex(z))
    G1, G2 = act.acs.n1.group, act.acs.n2.group
    return ProductPoint(groups.flow(G1, act.circle, f1, q.p1), groups.flow(G2, act.circle, f2, q.p2))


def check_orbit_holomorphy(act: PsiAction, q: ProductPoint, z: complex = 0j) -> float:
    """‖dΨ_q(i) - J dΨ_q(1)‖ at parameter z."""
    u1, u2 = act.orbit_velocities(z, q)
    moved = psi_apply(act, z, q)
    return (u2 - act.acs.apply(moved, u1)).norm()


def check_orbit_antiholomorphy(act: PsiAction, q: ProductPoint, z: complex = 0j) -> float:
    """‖dΨ_q(i) + J dΨ_q(1)‖: zero when the orbit map is J-antiholomorphic."""
    u1, u2 = act.orbit_velocities(z, q)
    moved = psi_apply(act, z, q)
    return (u2 + act.acs.apply(moved, u1)).norm()


def orbit_invariance_residual(act: PsiAction, q: ProductPoint, z: complex = 0j) -> float:
    """Distance of J dΨ(1) from span{dΨ(1), dΨ(i)}, relative to ‖dΨ(1)‖."""
    u1, u2 = act.orbit_velocities(z, q)
    Ju1 = act.acs.apply(psi_apply(act, z, q), u1)
    basis = np.stack([_real(u1), _real(u2)], axis=1)
    target = _real(Ju1)
    coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
    return float(np.linalg.norm(basis @ coef - target) / u1.norm())


def _real(w: ProductTangent) -> np.ndarray:
    f = w.flat()
    return np.concatenate([f.real, f.imag])


def translation_holomorphy_residuals(act: PsiAction, z: complex, q: ProductPoint, tangents) -> list[float]:
    moved = psi_apply(act, z, q)
    acs = act.acs
    return [(act.push(z, acs.apply(q, w)) - acs.apply(moved, act.push(z, w))).norm() for w in tangents]


def check_translation_holomorphy(act: PsiAction, z: complex, q: ProductPoint, samples: int = 20,
                                 rng: np.random.Generator | None = None) -> float:
    """max ‖dΨ_z(J w) - J dΨ_z(w)‖ over random tangents w at q."""
    rng = np.random.default_rng(0) if rng is None else rng
    tangents = [act.acs.random_tangent(q, rng) for _ in range(samples)]
    return max(translation_holomorphy_residuals(act, z, q, tangents))


# --- period lattice ---------------------------------------------------------------

Vec = tuple[Fraction, Fraction]


def _det(u: Vec, v: Vec) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def _norm2(u: Vec) -> Fraction:
    return u[0] * u[0] + u[1] * u[1]


@dataclass(frozen=True)
class Lattice2D:
    """Lattice in ℂ ≅ ℝ² with exact rational generators."""

    v1: Vec
    v2: Vec

    def __post_init__(self):
        if _det(self.v1, self.v2) == 0:
            raise ValueError("lattice generators are linearly dependent")

    @property
    def covolume(self) -> Fraction:
        return abs(_det(self.v1, self.v2))

    @property
    def generators(self) -> tuple[complex, complex]:
        return complex(*map(float, self.v1)), complex(*map(float, self.v2))

    def coordinates(self, x: Vec) -> tuple[Fraction, Fraction]:
        d = _det(self.v1, self.v2)
        return _det(x, self.v2) / d, _det(self.v1, x) / d

    def contains(self, x) -> bool:
        x = _as_vec(x)
        s, t = self.coordinates(x)
        return s.denominator == 1 and t.denominator == 1

    def reduce(self, z: complex) -> complex:
        """Representative of z in the cell {s v₁ + t v₂ : 0 ≤ s, t < 1}."""
        M = np.array([[float(self.v1[0]), float(self.v2[0])], [float(self.v1[1]), float(self.v2[1])]])
        s, t = np.linalg.solve(M, [z.real, z.imag])
        s, t = s - np.floor(s), t - np.floor(t)
        # snap values that are 1 - O(eps) back to 0
        s = 0.0 if s > 1 - 1e-12 else s
        t = 0.0 if t > 1 - 1e-12 else t
        x, y = M @ [s, t]
        return complex(x, y)

    def distance(self, z: complex) -> float:
        """Euclidean distance from z to the nearest lattice point."""
        r = self.reduce(z)
        g1, g2 = self.generators
        return min(abs(r - (i * g1 + j * g2)) for i in (0, 1) for j in (0, 1))


def _as_vec(x) -> Vec:
    if isinstance(x, tuple):
        return Fraction(x[0]), Fraction(x[1])
    if isinstance(x, complex):
        return Fraction(x.real).limit_denominator(10**6), Fraction(x.imag).limit_denominator(10**6)
    return Fraction(x), Fraction(0)


def stabilizer_basis(A) -> tuple[Vec, Vec]:
    """Columns of (Aᵀ)⁻¹ = adj(Aᵀ)/det A, an unreduced basis of the period lattice."""
    (a11, a12), (a21, a22) = _mixing(A)
    d = a11 * a22 - a12 * a21
    if d == 0:
        raise DegenerateMixing("degenerate mixing: det A = 0")
    # Aᵀ = [[a11, a21], [a12, a22]]; adj(Aᵀ) = [[a22, -a21], [-a12, a11]]
    return (Fraction(a22, d), Fraction(-a12, d)), (Fraction(-a21, d), Fraction(a11, d))


def in_period_lattice(A, x: Vec) -> bool:
    """Aᵀ (a, b) ∈ ℤ², checked exactly."""
    (a11, a12), (a21, a22) = _mixing(A)
    a, b = x
    return (a11 * a + a21 * b).denominator == 1 and (a12 * a + a22 * b).denominator == 1


def period_lattice(A) -> Lattice2D:
    """{a+ib : Ψ_{a+ib} = id} with a reduced pair of generators.

    ℤ² is contained in the lattice, so both successive minima are ≤ 1 and the
    reduced pair is found among lattice points of the box [-1, 1]²; those have
    integer coordinates at most 2·max|A_ij| in the adjugate basis.
    """
    b1, b2 = stabilizer_basis(A)
    R = 2 * max(abs(x) for row in _mixing(A) for x in row)
    points = set()
    for m, n in iproduct(range(-R, R + 1), repeat=2):
        p = (m * b1[0] + n * b2[0], m * b1[1] + n * b2[1])
        if p != (0, 0) and abs(p[0]) <= 1 and abs(p[1]) <= 1:
            points.add(p)
    ordered = sorted(points, key=lambda p: (_norm2(p), -p[0], -p[1]))
    covol = abs(_det(b1, b2))
    v1 = ordered[0]
    for v2 in ordered[1:]:
        if abs(_det(v1, v2)) == covol:
            return Lattice2D(v1, v2)
    raise AssertionError("no reduced basis found in the search box")


@dataclass(frozen=True)
class ContainmentReport:
    claim: tuple[Vec, Vec]
    contained: bool
    equal: bool
    witness: Vec | None

    @property
    def verdict(self) -> str:
        if self.equal:
            return "equal"
        if self.contained:
            return "contained"
        return "NOT contained"


def claimed_lattice(A, denominators: tuple[int, int] | None = None) -> tuple[Vec, Vec]:
    """(ℤ/c) + i(ℤ/d); defaults to c = d = |det A|."""
    if denominators is None or denominators == (0, 0):
        p = abs(det2(A))
        denominators = (p, p)
    c, d = denominators
    if c <= 0 or d <= 0:
        raise ValueError("claim denominators must be positive")
    return (Fraction(1, c), Fraction(0)), (Fraction(0), Fraction(1, d))


def check_lattice_claim(A, denominators: tuple[int, int] | None = None) -> ContainmentReport:
    lattice = period_lattice(A)
    claim = claimed_lattice(A, denominators)
    witness = next((g for g in claim if not lattice.contains(g)), None)
    contained = witness is None
    equal = contained and abs(_det(*claim)) == lattice.covolume
    return ContainmentReport(claim, contained, equal, witness)


def vec_to_complex(v: Vec) -> complex:
    return complex(float(v[0]), float(v[1]))


def format_vec(v: Vec) -> str:
    re, im = v
    if im == 0:
        return str(re)
    if re == 0:
        return f"{im}i"
    sign = "+" if im > 0 else "-"
    return f"{re}{sign}{abs(im)}i"


def lattice_residual(act: PsiAction, lattice: Lattice2D, q: ProductPoint) -> float:
    out = 0.0
    for g in lattice.generators:
        moved = psi_apply(act, g, q)
        out = max(out, ProductTangent(moved.p1 - q.p1, moved.p2 - q.p2).norm())
    return out
