"""Momentum maps, regular level sets N = μ⁻¹(c) and the splitting T_qN = V_q ⊕ H_q.

The dual algebra is identified with the algebra itself: u(k)* ≅ u(k) through
the pairing ⟨m, ξ⟩ = Tr(m ξ) (real on skew-Hermitian matrices), and the torus
dual with ℝᵖ through the dot product.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from . import groups
from .ambient import AmbientSpace, Tolerances, retract
from .errors import GroupError, IllConditioned, NonFreePoint, SingularLevelPoint, ShapeError
from .groups import GroupSpec, Torus, Unitary

REGULARITY_TOL = 1e-8
GRAM_COND_MAX = 1e12


@dataclass(frozen=True, eq=False)
class MomentMap:
    """μ(A) = i A†A + c₀ for U(k); μ(z)_a = π Σ_j W_ja |z_j|² + c₀ for tori."""

    group: GroupSpec
    ambient: AmbientSpace
    offset: np.ndarray | None = None

    def __post_init__(self):
        groups.check_compatible(self.group, self.ambient)
        if self.offset is None:
            object.__setattr__(self, "offset", np.zeros(self.dual_shape) if isinstance(self.group, Torus)
                               else np.zeros(self.dual_shape, dtype=complex))
        elif np.shape(self.offset) != self.dual_shape:
            raise ShapeError(f"offset must have shape {self.dual_shape}")

    @property
    def dual_shape(self) -> tuple[int, ...]:
        if isinstance(self.group, Torus):
            return (self.group.rank,)
        return (self.group.k, self.group.k)

    @property
    def liouville_factor(self) -> float:
        """λ with ⟨μ(q) - c₀, ξ⟩ = λ θ_q(ξ_M(q)); then d⟨μ, ξ⟩ = -2λ ω(ξ_M, ·)."""
        return -0.5 if isinstance(self.group, Torus) else 1.0

    def __call__(self, q) -> np.ndarray:
        return moment_eval(self, q)


def moment_eval(m: MomentMap, q) -> np.ndarray:
    q = m.ambient.check(q)
    if isinstance(m.group, Torus):
        return np.pi * (m.group.W.T @ np.abs(q.ravel()) ** 2) + m.offset
    return 1j * (q.conj().T @ q) + m.offset


def pairing(G: GroupSpec, m, xi) -> float:
    if isinstance(G, Torus):
        return float(np.dot(m, xi))
    return float(np.trace(np.asarray(m) @ np.asarray(xi)).real)


def moment_differential(m: MomentMap, q) -> np.ndarray:
    """Real Jacobian of μ at ``q``: rows are algebra coordinates, columns the realification."""
    q = m.ambient.check(q)
    if isinstance(m.group, Torus):
        z = q.ravel()
        W = m.group.W
        return 2 * np.pi * np.hstack([(W * z.real[:, None]).T, (W * z.imag[:, None]).T])
    n, k = m.ambient.shape
    dim = m.ambient.complex_dim
    # all real basis directions at once: E_r for the real parts, i E_r for the imaginary parts
    basis = np.concatenate([np.eye(dim), 1j * np.eye(dim)]).reshape(2 * dim, n, k)
    s = np.einsum("mra,rb->mab", basis.conj(), q) + np.einsum("ra,mrb->mab", q.conj(), basis)
    # coordinates of i·S in the fixed u(k) basis
    cols = [s[:, a, a].real for a in range(k)]
    for a in range(k):
        for b in range(a + 1, k):
            cols.append(-s[:, a, b].imag)
            cols.append(s[:, a, b].real)
    return np.stack(cols)


def liouville_residual(m: MomentMap, q, xi) -> float:
    """|⟨μ(q) - c₀, ξ⟩ - λ θ_q(ξ_M(q))|."""
    q = m.ambient.check(q)
    lhs = pairing(m.group, moment_eval(m, q) - m.offset, xi)
    gen = groups.generator(m.group, xi, q)
    theta = float(np.vdot(gen, q).imag)
    return abs(lhs - m.liouville_factor * theta)


def hamiltonian_residual(m: MomentMap, q, xi, v) -> float:
    """|d⟨μ, ξ⟩_q(v) + 2λ ω(ξ_M(q), v)|."""
    q = m.ambient.check(q)
    v = m.ambient.check(v)
    dmu = moment_differential(m, q) @ m.ambient.realify(v)
    lhs = float(np.dot(groups.algebra_coords(m.group, xi), _dual_coord_weights(m.group) * dmu))
    gen = groups.generator(m.group, xi, q)
    omega = float(np.vdot(v, gen).imag)
    return abs(lhs + 2 * m.liouville_factor * omega)


def _dual_coord_weights(G: GroupSpec) -> np.ndarray:
    """Tr(m ξ) in basis coordinates: -1 on diagonals, -2 on off-diagonal pairs."""
    if isinstance(G, Torus):
        return np.ones(G.rank)
    k = G.k
    return np.array([-1.0] * k + [-2.0] * (k * (k - 1)))


def check_equivariance(m: MomentMap, q, u) -> float:
    """‖μ(act(u, q)) - Ad*_u μ(q)‖."""
    moved = groups.act(m.group, u, q)
    return float(np.linalg.norm(moment_eval(m, moved) - groups.adjoint_orbit_map(m.group, u, moment_eval(m, q))))


# --- level sets --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LevelSet:
    """N = μ⁻¹(c) for a coadjoint-fixed level c.

    ``retraction`` names an :func:`kahlerprod.ambient.retract` kind; ``sampler``
    is ``"sphere"`` (normalized complex Gaussian) or ``"stiefel"`` (orthonormalized
    complex Gaussian columns).
    """

    moment: MomentMap
    level: np.ndarray
    retraction: str
    sampler: str
    radius: float = 1.0
    column_groups: tuple[tuple[int, ...], ...] | None = None
    tol: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        level = np.asarray(self.level)
        if level.shape != self.moment.dual_shape:
            raise ShapeError(f"level must have shape {self.moment.dual_shape}")
        G = self.moment.group
        if isinstance(G, Unitary):
            for e in groups.algebra_basis(G):
                if np.abs(e @ level - level @ e).max() > 1e-14:
                    raise GroupError("level is not fixed by the coadjoint action")
        if self.sampler not in ("sphere", "stiefel"):
            raise ValueError(f"unknown sampler {self.sampler!r}")

    @property
    def group(self) -> GroupSpec:
        return self.moment.group

    @property
    def ambient(self) -> AmbientSpace:
        return self.moment.ambient

    @property
    def dim(self) -> int:
        return self.ambient.real_dim - self.group.dim

    def residual(self, q) -> float:
        return float(np.linalg.norm(moment_eval(self.moment, q) - self.level))

    def contains(self, q) -> bool:
        return self.residual(q) <= self.tol.on_manifold

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        shape = self.ambient.shape
        z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        if self.sampler == "sphere":
            return z * (self.radius / np.linalg.norm(z))
        q, r = np.linalg.qr(z)
        return q * (np.diag(r) / np.abs(np.diag(r)))

    def retract(self, q, v) -> np.ndarray:
        return retract(self.retraction, q, v, radius=self.radius, column_groups=self.column_groups)

    def differential(self, q) -> np.ndarray:
        return moment_differential(self.moment, q)

    def tangent_projector(self, q) -> np.ndarray:
        return tangent_projector(self, q)

    def project(self, q, v) -> np.ndarray:
        """g-orthogonal projection of an ambient direction onto T_qN."""
        P = self.tangent_projector(q)
        return self.ambient.complexify(P @ self.ambient.realify(v))

    def tangency_residual(self, q, v) -> float:
        return float(np.linalg.norm(self.differential(q) @ self.ambient.realify(v)))

    def generators(self, q, basis=None) -> list[np.ndarray]:
        basis = groups.algebra_basis(self.group) if basis is None else basis
        return [groups.generator(self.group, xi, q) for xi in basis]

    def split(self, q, basis=None) -> Splitting:
        return split(self, q, basis)

    def random_tangent(self, q, rng: np.random.Generator) -> np.ndarray:
        shape = self.ambient.shape
        return self.project(q, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _row_space(D: np.ndarray) -> np.ndarray:
    _, s, vh = np.linalg.svd(D, full_matrices=False)
    if s.size and s.min() <= REGULARITY_TOL * max(1.0, s.max()):
        raise SingularLevelPoint(f"singular level point: min singular value of dμ is {s.min():.3e}")
    return vh


def regularity(N: LevelSet, q) -> float:
    """Smallest singular value of dμ_q."""
    return float(np.linalg.svd(N.differential(q), compute_uv=False).min())


def tangent_projector(N: LevelSet, q) -> np.ndarray:
    vh = _row_space(N.differential(q))
    return np.eye(N.ambient.real_dim) - vh.T @ vh


def orthonormalize(vectors: np.ndarray, rel_tol: float = 1e-8) -> np.ndarray:
    """Modified Gram–Schmidt with one reorthogonalization pass, columnwise.

    Raises :class:`NonFreePoint` when a column is (numerically) in the span of
    the previous ones.
    """
    q = np.array(vectors, dtype=float, copy=True)
    for j in range(q.shape[1]):
        original = np.linalg.norm(q[:, j])
        for _ in range(2):
            for i in range(j):
                q[:, j] -= np.dot(q[:, i], q[:, j]) * q[:, i]
        r = np.linalg.norm(q[:, j])
        if original == 0 or r <= rel_tol * original:
            raise NonFreePoint("non-free point: generators are linearly dependent")
        q[:, j] /= r
    return q


@dataclass(frozen=True, eq=False)
class Splitting:
    """T_qN = V_q ⊕ H_q at a single base point, in realified coordinates."""

    level_set: LevelSet
    base: np.ndarray
    basis: tuple[np.ndarray, ...]
    generators: np.ndarray
    gram: np.ndarray
    vertical_frame: np.ndarray
    horizontal_frame: np.ndarray
    tangent_proj: np.ndarray

    @property
    def ambient(self) -> AmbientSpace:
        return self.level_set.ambient

    @property
    def vertical_proj(self) -> np.ndarray:
        return self.vertical_frame @ self.vertical_frame.T

    @property
    def horizontal_proj(self) -> np.ndarray:
        return self.horizontal_frame @ self.horizontal_frame.T

    def vertical_coordinates(self, w) -> np.ndarray:
        return vertical_coordinates(self, w)

    def vertical_vector(self, coeffs) -> np.ndarray:
        return self.ambient.complexify(self.generators @ np.asarray(coeffs, dtype=float))

    def horizontal_part(self, w) -> np.ndarray:
        return self.ambient.complexify(self.horizontal_proj @ self.ambient.realify(w))


def split(N: LevelSet, q, basis=None) -> Splitting:
    q = N.ambient.check(q)
    basis = tuple(groups.algebra_basis(N.group) if basis is None else basis)
    D = N.differential(q)
    vh = _row_space(D)
    P = np.eye(N.ambient.real_dim) - vh.T @ vh
    gens = N.ambient.realify_many(groups.generator(N.group, xi, q) for xi in basis)
    V = orthonormalize(gens)
    H = null_space(np.vstack([D, V.T]))
    if V.shape[1] + H.shape[1] != N.dim:
        raise NonFreePoint(
            f"dimension count failed: dim V={V.shape[1]}, dim H={H.shape[1]}, dim N={N.dim}"
        )
    return Splitting(N, q, basis, gens, gens.T @ gens, V, H, P)


def vertical_coordinates(s: Splitting, w) -> np.ndarray:
    """Coefficients a with Proj_V(w) = Σ a_k ξ^k_N(base)."""
    return solve_gram(s.generators, s.gram, s.ambient.realify(w))


def solve_gram(gens: np.ndarray, gram: np.ndarray, w_real: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > GRAM_COND_MAX:
        raise IllConditioned(f"generator Gram matrix has condition number {cond:.3e}")
    return np.linalg.solve(gram, gens.T @ w_real)


@dataclass(frozen=True)
class ReducedKahler:
    """Ambient Kähler data restricted to H_q, written in the horizontal frame.

    With ω = Im h one has ω(u, v) = g(u, iv), hence ω̃ J̃ = -g̃ as matrices.
    """

    metric: np.ndarray
    complex_structure: np.ndarray
    symplectic: np.ndarray

    def compatibility_residual(self) -> float:
        return float(np.abs(self.symplectic @ self.complex_structure + self.metric).max())

    def square_residual(self) -> float:
        J = self.complex_structure
        return float(np.abs(J @ J + np.eye(J.shape[0])).max())


def reduced_kahler_data(s: Splitting) -> ReducedKahler:
    E = s.horizontal_frame
    Jm = s.ambient.complex_structure_matrix()
    return ReducedKahler(E.T @ E, E.T @ Jm @ E, E.T @ Jm @ E)


# --- thread-safe memo of splittings ------------------------------------------------

class SplitCache:
    """Memoize splittings by exact point bytes; safe for concurrent readers."""

    def __init__(self, level_set: LevelSet, basis=None, maxsize: int = 256):
        self.level_set = level_set
        self.basis = None if basis is None else tuple(basis)
        self.maxsize = maxsize
        self._data: dict[bytes, Splitting] = {}
        self._lock = threading.Lock()

    def __call__(self, q) -> Splitting:
        key = np.ascontiguousarray(q, dtype=complex).tobytes()
        hit = self._data.get(key)
        if hit is not None:
            return hit
        s = split(self.level_set, q, self.basis)
        with self._lock:
            if len(self._data) >= self.maxsize:
                self._data.pop(next(iter(self._data)))
            self._data[key] = s
        return s
