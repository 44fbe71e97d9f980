"""Weighted tori and U(k) acting on ambient spaces by Kähler isometries.

Conventions
-----------
Torus(W): algebra and group elements are real p-vectors θ (group elements are
read mod ℤᵖ); the flattened ambient coordinate z_j is rotated by
exp(2πi ⟨W_j, θ⟩).

Unitary(k): act(u, A) = A u†, a left action on n×k matrices.  The generator of
ξ ∈ u(k) is A ξ, the velocity of t ↦ A exp(tξ) = act(exp(-tξ), A).  With this
choice ξ ↦ ξ_N is a Lie algebra homomorphism for the bracket D_X Y - D_Y X.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .ambient import AmbientSpace
from .errors import GroupError, ShapeError

UNITARY_TOL = 1e-12
SKEW_TOL = 1e-14


@dataclass(frozen=True)
class Torus:
    """p-torus acting diagonally with integer weights.

    ``weights`` has one row per flattened ambient coordinate and one column per
    torus factor.
    """

    weights: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        w = np.asarray(self.weights)
        if w.ndim != 2 or w.shape[1] < 1:
            raise GroupError("torus weights must be a non-empty integer matrix")
        if not np.issubdtype(w.dtype, np.integer):
            raise GroupError("torus weights must be integers")

    @classmethod
    def from_matrix(cls, w) -> Torus:
        w = np.asarray(w)
        if not np.all(np.equal(np.mod(w, 1), 0)):
            raise GroupError("torus weights must be integers")
        return cls(tuple(tuple(int(x) for x in row) for row in w))

    @classmethod
    def hopf(cls, n_coords: int) -> Torus:
        return cls.from_matrix(np.ones((n_coords, 1), dtype=int))

    @property
    def W(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    @property
    def rank(self) -> int:
        return len(self.weights[0])

    @property
    def dim(self) -> int:
        return self.rank

    @property
    def abelian(self) -> bool:
        return True

    def __str__(self):
        return f"T^{self.rank}"


@dataclass(frozen=True)
class Unitary:
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise GroupError("U(k) needs k >= 1")

    @property
    def dim(self) -> int:
        return self.k * self.k

    @property
    def abelian(self) -> bool:
        return self.k == 1

    def __str__(self):
        return f"U({self.k})"


GroupSpec = Torus | Unitary


def same_algebra(g1: GroupSpec, g2: GroupSpec) -> bool:
    if isinstance(g1, Torus) and isinstance(g2, Torus):
        return g1.rank == g2.rank
    if isinstance(g1, Unitary) and isinstance(g2, Unitary):
        return g1.k == g2.k
    return False


def check_compatible(G: GroupSpec, space: AmbientSpace) -> None:
    if isinstance(G, Torus):
        if len(G.weights) != space.complex_dim:
            raise ShapeError(
                f"{G} has {len(G.weights)} weight rows but the ambient has "
                f"{space.complex_dim} complex coordinates"
            )
    elif not space.is_matrix or space.shape[1] != G.k:
        raise ShapeError(f"{G} acts only on Hom(C^{G.k}, C^n); got shape {space.shape}")


# --- Lie algebra ---------------------------------------------------------------

def algebra_basis(G: GroupSpec) -> list[np.ndarray]:
    """Fixed basis of the Lie algebra.

    For u(k): {i E_aa} then, for a < b in row-major order, E_ab - E_ba followed
    by i(E_ab + E_ba).
    """
    if isinstance(G, Torus):
        return list(np.eye(G.rank))
    k = G.k
    basis = []
    for a in range(k):
        e = np.zeros((k, k), dtype=complex)
        e[a, a] = 1j
        basis.append(e)
    for a in range(k):
        for b in range(a + 1, k):
            e = np.zeros((k, k), dtype=complex)
            e[a, b], e[b, a] = 1, -1
            basis.append(e)
            e = np.zeros((k, k), dtype=complex)
            e[a, b], e[b, a] = 1j, 1j
            basis.append(e)
    return basis


def algebra_coords(G: GroupSpec, xi) -> np.ndarray:
    """Real coordinates of the skew-Hermitian part of ``xi`` in :func:`algebra_basis`."""
    if isinstance(G, Torus):
        return np.asarray(xi, dtype=float).copy()
    xi = np.asarray(xi, dtype=complex)
    if xi.shape != (G.k, G.k):
        raise ShapeError(f"u({G.k}) element must be {G.k}x{G.k}, got {xi.shape}")
    xi = 0.5 * (xi - xi.conj().T)
    k = G.k
    out = [xi[a, a].imag for a in range(k)]
    for a in range(k):
        for b in range(a + 1, k):
            out.extend([xi[a, b].real, xi[a, b].imag])
    return np.array(out)


def from_coords(G: GroupSpec, coeffs) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=float)
    basis = algebra_basis(G)
    if coeffs.shape != (len(basis),):
        raise ShapeError(f"{G} algebra has dimension {len(basis)}, got {coeffs.shape}")
    if isinstance(G, Torus):
        return coeffs.copy()
    return sum(c * e for c, e in zip(coeffs, basis))


def check_skew(G: Unitary, xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=complex)
    if xi.shape != (G.k, G.k):
        raise ShapeError(f"u({G.k}) element must be {G.k}x{G.k}, got {xi.shape}")
    scale = max(1.0, float(np.abs(xi).max()))
    if np.abs(xi + xi.conj().T).max() > SKEW_TOL * scale * 10:
        raise GroupError("Lie algebra element of u(k) must be skew-Hermitian")
    return xi


def check_unitary(G: Unitary, u) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (G.k, G.k):
        raise ShapeError(f"U({G.k}) element must be {G.k}x{G.k}, got {u.shape}")
    if np.abs(u.conj().T @ u - np.eye(G.k)).max() > UNITARY_TOL:
        raise GroupError("group element is not unitary")
    return u


def bracket(G: GroupSpec, xi, eta, H: GroupSpec | None = None) -> np.ndarray:
    if H is not None and not same_algebra(G, H):
        raise GroupError(f"cannot bracket elements of {G} and {H}")
    if isinstance(G, Torus):
        return np.zeros(G.rank)
    xi = check_skew(G, xi)
    eta = check_skew(G, eta)
    return xi @ eta - eta @ xi


def exp(G: GroupSpec, xi) -> np.ndarray:
    if isinstance(G, Torus):
        return np.asarray(xi, dtype=float).copy()
    return expm(check_skew(G, xi))


def identity(G: GroupSpec) -> np.ndarray:
    if isinstance(G, Torus):
        return np.zeros(G.rank)
    return np.eye(G.k, dtype=complex)


def compose(G: GroupSpec, g2, g1) -> np.ndarray:
    """The product g2·g1."""
    if isinstance(G, Torus):
        return np.asarray(g2, float) + np.asarray(g1, float)
    return check_unitary(G, g2) @ check_unitary(G, g1)


def torus_equal(a, b, tol: float = 1e-12) -> bool:
    d = np.asarray(a, float) - np.asarray(b, float)
    return bool(np.all(np.abs(d - np.round(d)) <= tol))


def adjoint(G: GroupSpec, g, xi) -> np.ndarray:
    if isinstance(G, Torus):
        return np.asarray(xi, dtype=float).copy()
    u = check_unitary(G, g)
    return u @ check_skew(G, xi) @ u.conj().T


def adjoint_orbit_map(G: GroupSpec, g, m) -> np.ndarray:
    """Coadjoint action m ↦ u m u† on u(k)* ≅ u(k); trivial for tori."""
    if isinstance(G, Torus):
        return np.asarray(m, dtype=float).copy()
    u = check_unitary(G, g)
    m = np.asarray(m, dtype=complex)
    return u @ m @ u.conj().T


def random_algebra(G: GroupSpec, rng: np.random.Generator) -> np.ndarray:
    if isinstance(G, Torus):
        return rng.standard_normal(G.rank)
    z = rng.standard_normal((G.k, G.k)) + 1j * rng.standard_normal((G.k, G.k))
    return 0.5 * (z - z.conj().T)


def random_element(G: GroupSpec, rng: np.random.Generator) -> np.ndarray:
    if isinstance(G, Torus):
        return rng.uniform(0.0, 1.0, G.rank)
    z = rng.standard_normal((G.k, G.k)) + 1j * rng.standard_normal((G.k, G.k))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


# --- actions on points -----------------------------------------------------------

def _torus_phases(G: Torus, theta, shape) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (G.rank,):
        raise ShapeError(f"torus element must have length {G.rank}, got {theta.shape}")
    return np.exp(2j * np.pi * (G.W @ theta)).reshape(shape)


def act(G: GroupSpec, g, q) -> np.ndarray:
    q = np.asarray(q, dtype=complex)
    if isinstance(G, Torus):
        if q.size != len(G.weights):
            raise ShapeError(f"point has {q.size} coordinates, {G} expects {len(G.weights)}")
        return _torus_phases(G, g, q.shape) * q
    u = check_unitary(G, g)
    if q.ndim != 2 or q.shape[1] != G.k:
        raise ShapeError(f"{G} acts on n x {G.k} matrices, got {q.shape}")
    return q @ u.conj().T


def generator(G: GroupSpec, xi, q) -> np.ndarray:
    """Infinitesimal generator ξ_M(q)."""
    q = np.asarray(q, dtype=complex)
    if isinstance(G, Torus):
        xi = np.asarray(xi, dtype=float)
        if xi.shape != (G.rank,) or q.size != len(G.weights):
            raise ShapeError("torus generator: shape mismatch")
        return (2j * np.pi * (G.W @ xi)).reshape(q.shape) * q
    xi = check_skew(G, xi)
    if q.ndim != 2 or q.shape[1] != G.k:
        raise ShapeError(f"{G} acts on n x {G.k} matrices, got {q.shape}")
    return q @ xi


def flow(G: GroupSpec, xi, t: float, q) -> np.ndarray:
    """Flow of the generator field of ``xi`` for time ``t``.

    Linear in ``q``, so it also pushes tangent vectors forward.
    """
    if isinstance(G, Torus):
        return act(G, t * np.asarray(xi, dtype=float), q)
    xi = check_skew(G, xi)
    return np.asarray(q, dtype=complex) @ expm(t * xi)


def circle_generator(G: GroupSpec) -> np.ndarray:
    """Algebra element of the diagonal circle with period exactly 1."""
    if isinstance(G, Torus):
        return np.ones(G.rank)
    return 2j * np.pi * np.eye(G.k)


def circle_weights(G: GroupSpec, zeta, n_coords: int) -> np.ndarray:
    """Integer phase weight of each flattened coordinate under the flow of ``zeta``.

    Only defined when the flow rotates every coordinate by exp(2πi w_j t).
    """
    if isinstance(G, Torus):
        w = G.W @ np.asarray(zeta, dtype=float)
    else:
        zeta = check_skew(G, zeta)
        diag = np.diag(zeta)
        if np.abs(zeta - np.diag(diag)).max() > 1e-14 or np.ptp(diag.imag) > 1e-14:
            raise GroupError("phase weights need a central (scalar) circle in U(k)")
        w = np.full(n_coords, diag[0].imag / (2 * np.pi))
    if not np.allclose(w, np.round(w), atol=1e-12):
        raise GroupError("circle weights must be integers")
    return np.round(w).astype(int)
