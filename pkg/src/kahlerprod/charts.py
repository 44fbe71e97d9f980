"""Horizontal slices, the chart Φ(t₁, t₂, z) = Ψ_z(Σ₁(t₁), Σ₂(t₂)) and transitions.

Charts need a circle group acting on each factor by scalar phases, and a
level set that is a round sphere in its ambient (Hopf spheres, the p = 1
torus in U(k)); slice inversion is then closed form.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import groups
from .errors import ChartError, NotOnOrbit, PhaseUnobservable
from .moment import LevelSet
from .product import ProductPoint, ProductTangent
from .torus import Lattice2D, PsiAction, period_lattice, psi_apply

ORBIT_TOL = 1e-6
FD_STEP = 1e-6


@dataclass(frozen=True, eq=False)
class Slice:
    """t ↦ retract(base, Σ_a t_a e_a) for the horizontal frame (e_a) at ``base``."""

    level_set: LevelSet
    base: np.ndarray
    frame: np.ndarray
    radius: float = 0.3

    @property
    def dim(self) -> int:
        return self.frame.shape[1]

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if t.shape != (self.dim,):
            raise ChartError(f"slice coordinates must have length {self.dim}, got {t.shape}")
        if np.linalg.norm(t) > self.radius + 1e-12:
            raise ChartError(f"out-of-radius coordinates: |t|={np.linalg.norm(t):.3g} > {self.radius}")
        return self.evaluate(t)

    def evaluate(self, t) -> np.ndarray:
        """Slice map without the radius check."""
        N = self.level_set
        return N.retract(self.base, N.ambient.complexify(self.frame @ np.asarray(t, dtype=float)))

    def complex_structure(self) -> np.ndarray:
        """Multiplication by i on the horizontal frame coordinates (J̃ at the base)."""
        Jm = self.level_set.ambient.complex_structure_matrix()
        return self.frame.T @ Jm @ self.frame

    def coordinates(self, x) -> np.ndarray:
        """Coordinates t of the slice point on the circle orbit through ``x``."""
        b = self.base
        overlap = np.vdot(b, x)
        if abs(overlap) < 1e-12:
            raise ChartError("point is outside the slice's domain (orthogonal to the base)")
        lam = np.vdot(b, b) / overlap
        y = lam * np.asarray(x) - b
        return self.frame.T @ self.level_set.ambient.realify(y)


def _check_chartable(N: LevelSet, circle) -> None:
    G = N.group
    try:
        w = groups.circle_weights(G, circle, N.ambient.complex_dim)
    except Exception as exc:
        raise ChartError(f"charts need a scalar circle action: {exc}") from exc
    if G.dim != 1 or not np.all(w == 1):
        raise ChartError(f"charts need a circle group acting with unit weights; got {G}")
    one_sphere = N.retraction == "sphere" or (N.retraction == "column-spheres" and len(N.column_groups) == 1)
    if not one_sphere:
        raise ChartError("charts need a level set that is a single round sphere")


def make_slice(N: LevelSet, base, radius: float = 0.3) -> Slice:
    return Slice(N, np.asarray(base, dtype=complex), N.split(base).horizontal_frame, radius)


@dataclass(frozen=True, eq=False)
class ChartMap:
    slice1: Slice
    slice2: Slice
    psi: PsiAction

    def __post_init__(self):
        _check_chartable(self.slice1.level_set, self.psi.circle)
        _check_chartable(self.slice2.level_set, self.psi.circle)

    @property
    def lattice(self) -> Lattice2D:
        return period_lattice(self.psi.mixing)

    @property
    def domain_dim(self) -> int:
        return self.slice1.dim + self.slice2.dim + 2

    def evaluate(self, t1, t2, z: complex) -> ProductPoint:
        return psi_apply(self.psi, z, ProductPoint(self.slice1.evaluate(t1), self.slice2.evaluate(t2)))

    def flat_evaluate(self, x: np.ndarray) -> np.ndarray:
        d1, d2 = self.slice1.dim, self.slice2.dim
        q = self.evaluate(x[:d1], x[d1:d1 + d2], complex(x[-2], x[-1]))
        f = np.concatenate([q.p1.ravel(), q.p2.ravel()])
        return np.concatenate([f.real, f.imag])


def make_chart(psi: PsiAction, base: ProductPoint, radius: float = 0.3) -> ChartMap:
    acs = psi.acs
    return ChartMap(make_slice(acs.n1, base.p1, radius), make_slice(acs.n2, base.p2, radius), psi)


def phi_apply(c: ChartMap, t1, t2, z: complex) -> ProductPoint:
    return psi_apply(c.psi, z, ProductPoint(c.slice1(t1), c.slice2(t2)))


def solve_group_element(act: PsiAction, q_from: ProductPoint, q_to: ProductPoint,
                        lattice: Lattice2D | None = None) -> complex:
    """z with Ψ_z(q_from) = q_to, reduced into the fundamental cell of the period lattice."""
    phases = []
    for N, x, y in ((act.acs.n1, q_from.p1, q_to.p1), (act.acs.n2, q_from.p2, q_to.p2)):
        w = groups.circle_weights(N.group, act.circle, N.ambient.complex_dim)
        xf, yf = np.asarray(x).ravel(), np.asarray(y).ravel()
        usable = np.flatnonzero(np.abs(w) == 1)
        if usable.size == 0 or np.abs(xf[usable]).max() < 1e-12:
            raise PhaseUnobservable("phase unobservable: no nonzero coordinate of unit weight")
        j = usable[np.argmax(np.abs(xf[usable]))]
        phases.append(np.angle(yf[j] / xf[j]) / (2 * np.pi * w[j]))
    (a11, a12), (a21, a22) = act.mixing
    # Aᵀ (a, b) = (φ₁, φ₂)
    a, b = np.linalg.solve(np.array([[a11, a21], [a12, a22]], dtype=float), phases)
    lattice = lattice or period_lattice(act.mixing)
    z = lattice.reduce(complex(a, b))
    moved = psi_apply(act, z, q_from)
    resid = ProductTangent(moved.p1 - q_to.p1, moved.p2 - q_to.p2).norm()
    if resid > ORBIT_TOL:
        raise NotOnOrbit(f"not on orbit: best residual {resid:.3e}")
    return z


def phi_inverse(c: ChartMap, q: ProductPoint) -> tuple[np.ndarray, np.ndarray, complex]:
    t1 = c.slice1.coordinates(q.p1)
    t2 = c.slice2.coordinates(q.p2)
    z = solve_group_element(c.psi, c.evaluate(t1, t2, 0j), q, c.lattice)
    return t1, t2, z


# --- verification ---------------------------------------------------------------------

def chart_jacobian(c: ChartMap, x: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    """Central-difference Jacobian of the flattened chart map at domain point ``x``."""
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        cols.append((c.flat_evaluate(x + e) - c.flat_evaluate(x - e)) / (2 * step))
    return np.stack(cols, axis=1)


def domain_point(c: ChartMap, t1=None, t2=None, z: complex = 0j) -> np.ndarray:
    t1 = np.zeros(c.slice1.dim) if t1 is None else np.asarray(t1, float)
    t2 = np.zeros(c.slice2.dim) if t2 is None else np.asarray(t2, float)
    return np.concatenate([t1, t2, [z.real, z.imag]])


def _random_domain_point(c: ChartMap, rng: np.random.Generator, scale: float) -> np.ndarray:
    t1 = rng.standard_normal(c.slice1.dim)
    t2 = rng.standard_normal(c.slice2.dim)
    r = scale * min(c.slice1.radius, c.slice2.radius)
    t1 *= r * rng.uniform() / max(np.linalg.norm(t1), 1e-300)
    t2 *= r * rng.uniform() / max(np.linalg.norm(t2), 1e-300)
    return domain_point(c, t1, t2, complex(*rng.uniform(0, 1, 2)))


@dataclass(frozen=True)
class DiffeoReport:
    expected_rank: int
    rank_at_base: int
    min_sv_at_base: float
    min_sv_samples: list[float]
    collisions: int

    @property
    def min_singular_value(self) -> float:
        return min([self.min_sv_at_base, *self.min_sv_samples])


def check_local_diffeo(c: ChartMap, samples: int = 10, rng: np.random.Generator | None = None) -> DiffeoReport:
    rng = np.random.default_rng(0) if rng is None else rng
    expected = c.domain_dim

    def svals(x):
        return np.linalg.svd(chart_jacobian(c, x), compute_uv=False)

    s0 = svals(domain_point(c))
    rank = int(np.sum(s0 > 1e-6 * s0.max()))
    sample_points = [_random_domain_point(c, rng, 0.5) for _ in range(samples)]
    sample_min = [float(svals(x).min()) for x in sample_points]
    # orbit-collision spot check: distinct domain points in one lattice cell must map apart
    collisions = 0
    for x, y in zip(sample_points, sample_points[1:]):
        if np.linalg.norm(c.flat_evaluate(x) - c.flat_evaluate(y)) < 1e-9 * np.linalg.norm(x - y):
            collisions += 1
    return DiffeoReport(expected, rank, float(s0.min()), sample_min, collisions)


def domain_complex_structure(c: ChartMap) -> np.ndarray:
    """i on each horizontal frame and on the z-plane, block-diagonal."""
    d1, d2 = c.slice1.dim, c.slice2.dim
    J = np.zeros((d1 + d2 + 2, d1 + d2 + 2))
    J[:d1, :d1] = c.slice1.complex_structure()
    J[d1:d1 + d2, d1:d1 + d2] = c.slice2.complex_structure()
    J[-2:, -2:] = [[0, -1], [1, 0]]
    return J


def _target_J(c: ChartMap, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    d1, d2 = c.slice1.dim, c.slice2.dim
    q = c.evaluate(x[:d1], x[d1:d1 + d2], complex(x[-2], x[-1]))
    n1 = q.p1.size
    m = v.size // 2
    cv = v[:m] + 1j * v[m:]
    w = ProductTangent(cv[:n1].reshape(q.p1.shape), cv[n1:].reshape(q.p2.shape))
    out = c.psi.acs.apply(q, w).flat()
    return np.concatenate([out.real, out.imag])


def complex_linearity_residuals(c: ChartMap, x: np.ndarray, directions) -> list[float]:
    """‖dΦ(J_dom δ) - J dΦ(δ)‖ for unit domain directions δ at domain point x."""
    D = chart_jacobian(c, x)
    Jd = domain_complex_structure(c)
    out = []
    for d in directions:
        d = np.asarray(d, float) / np.linalg.norm(d)
        out.append(float(np.linalg.norm(D @ (Jd @ d) - _target_J(c, x, D @ d))))
    return out


def check_phi_complex_linear(c: ChartMap, samples: int = 10, rng: np.random.Generator | None = None,
                             on_slice: bool = True) -> float:
    """Max complex-linearity residual of dΦ over random directions.

    With ``on_slice`` the domain points are (0, 0, z); off the slice base the
    horizontal slices pick up vertical components at first order in |t| and the
    residual grows accordingly.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    worst = 0.0
    for _ in range(samples):
        x = domain_point(c, z=complex(*rng.uniform(0, 1, 2))) if on_slice else _random_domain_point(c, rng, 0.5)
        dirs = [rng.standard_normal(c.domain_dim)]
        worst = max(worst, *complex_linearity_residuals(c, x, dirs))
    return worst


# --- transitions ---------------------------------------------------------------------

@dataclass(frozen=True)
class TransitionSample:
    t1: np.ndarray
    t2: np.ndarray
    h: complex
    roundtrip: float
    g_residual: float


@dataclass(frozen=True)
class TransitionReport:
    samples: list[TransitionSample]
    grid_spacing: float
    max_jump: float
    lipschitz: float

    @property
    def max_roundtrip(self) -> float:
        return max(s.roundtrip for s in self.samples)

    @property
    def max_g_residual(self) -> float:
        return max(s.g_residual for s in self.samples)

    @property
    def continuous(self) -> bool:
        return self.max_jump <= 10 * self.grid_spacing * max(self.lipschitz, 1e-12)


def _h_at(c: ChartMap, ct: ChartMap, t1, t2) -> tuple[complex, ProductPoint, ProductPoint]:
    base = c.evaluate(t1, t2, 0j)
    tt1 = ct.slice1.coordinates(base.p1)
    tt2 = ct.slice2.coordinates(base.p2)
    other = ct.evaluate(tt1, tt2, 0j)
    return solve_group_element(c.psi, base, other, c.lattice), base, other


def transition_function(c: ChartMap, ct: ChartMap, grid: int = 5, extent: float = 0.1,
                        g_samples: int = 10, rng: np.random.Generator | None = None) -> TransitionReport:
    """Sample p ↦ h(p) on a grid in the first coordinate of each slice of ``c``.

    For each grid point and random g checks that Θ(H̃(p, g)) = g + h(p) modulo
    the period lattice, i.e. the transition has the form (p, g) ↦ (p, g h(p)).
    """
    rng = np.random.default_rng(0) if rng is None else rng
    lattice = c.lattice
    values = np.linspace(-extent, extent, grid)
    spacing = float(values[1] - values[0]) if grid > 1 else extent
    out = []
    hgrid = np.zeros((grid, grid), dtype=complex)
    for i, s in enumerate(values):
        for j, u in enumerate(values):
            t1 = np.zeros(c.slice1.dim)
            t2 = np.zeros(c.slice2.dim)
            t1[0], t2[0] = s, u
            h, base, other = _h_at(c, ct, t1, t2)
            hgrid[i, j] = h
            moved = psi_apply(c.psi, h, base)
            roundtrip = ProductTangent(moved.p1 - other.p1, moved.p2 - other.p2).norm()
            g_res = 0.0
            for _ in range(g_samples):
                g = complex(*rng.uniform(0, 1, 2))
                n = psi_apply(c.psi, g, other)  # H̃(p, g)
                theta = solve_group_element(c.psi, base, n, lattice)
                pt1, pt2 = c.slice1.coordinates(n.p1), c.slice2.coordinates(n.p2)
                g_res = max(g_res, lattice.distance(theta - (g + h)),
                            float(np.linalg.norm(pt1 - t1) + np.linalg.norm(pt2 - t2)))
            out.append(TransitionSample(t1, t2, h, roundtrip, g_res))
    jumps = [lattice.distance(hgrid[i, j] - hgrid[i2, j2])
             for i in range(grid) for j in range(grid)
             for i2, j2 in ((i + 1, j), (i, j + 1)) if i2 < grid and j2 < grid]
    delta = 1e-5
    t1 = np.zeros(c.slice1.dim)
    t2 = np.zeros(c.slice2.dim)
    h0 = _h_at(c, ct, t1, t2)[0]
    lip = 0.0
    for k in range(2):
        dt1, dt2 = t1.copy(), t2.copy()
        (dt1 if k == 0 else dt2)[0] = delta
        lip = max(lip, lattice.distance(_h_at(c, ct, dt1, dt2)[0] - h0) / delta)
    return TransitionReport(out, spacing, max(jumps) if jumps else 0.0, lip)


def shifted_chart(c: ChartMap, offset: float = 0.05, phase: float = 0.2) -> ChartMap:
    """A second chart through nearby, phase-rotated base points (overlapping with ``c``)."""
    slices = []
    for sl in (c.slice1, c.slice2):
        t = np.zeros(sl.dim)
        t[-1] = offset
        base = sl.evaluate(t) * np.exp(2j * np.pi * phase)
        slices.append(make_slice(sl.level_set, base, sl.radius))
    return ChartMap(slices[0], slices[1], c.psi)
