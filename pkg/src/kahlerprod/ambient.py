"""Flat Kähler ambient spaces ℂⁿ and Hom(ℂᵏ, ℂⁿ).

Points and tangent vectors are complex numpy arrays of the ambient shape.
Whenever a real-linear operator is needed (projectors, frames) the array is
realified as ``[Re(z.ravel()), Im(z.ravel())]`` so that the real dot product
is ``g = Re h``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RetractionError, ShapeError

TOL_ONMANIFOLD = 1e-10
TOL_TANGENT = 1e-8


@dataclass(frozen=True)
class Tolerances:
    on_manifold: float = TOL_ONMANIFOLD
    tangent: float = TOL_TANGENT

    def __post_init__(self):
        if self.on_manifold <= 0 or self.tangent <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class AmbientSpace:
    """ℂⁿ (``shape=(n,)``) or Hom(ℂᵏ, ℂⁿ) as n×k matrices (``shape=(n, k)``)."""

    shape: tuple[int, ...]

    def __post_init__(self):
        if len(self.shape) not in (1, 2) or min(self.shape) < 1:
            raise ShapeError(f"unsupported ambient shape {self.shape}")

    @classmethod
    def vectors(cls, n: int) -> AmbientSpace:
        return cls((n,))

    @classmethod
    def matrices(cls, n: int, k: int) -> AmbientSpace:
        return cls((n, k))

    @property
    def is_matrix(self) -> bool:
        return len(self.shape) == 2

    @property
    def complex_dim(self) -> int:
        return int(np.prod(self.shape))

    @property
    def real_dim(self) -> int:
        return 2 * self.complex_dim

    def check(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=complex)
        if a.shape != self.shape:
            raise ShapeError(f"expected shape {self.shape}, got {a.shape}")
        return a

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape, dtype=complex)

    def realify(self, a) -> np.ndarray:
        a = self.check(a).ravel()
        return np.concatenate([a.real, a.imag])

    def complexify(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.real_dim,):
            raise ShapeError(f"expected real vector of length {self.real_dim}, got {x.shape}")
        m = self.complex_dim
        return (x[:m] + 1j * x[m:]).reshape(self.shape)

    def realify_many(self, arrays) -> np.ndarray:
        """Stack realified arrays as the columns of a ``real_dim × len`` matrix."""
        cols = [self.realify(a) for a in arrays]
        if not cols:
            return np.zeros((self.real_dim, 0))
        return np.stack(cols, axis=1)

    def complex_structure_matrix(self) -> np.ndarray:
        """Multiplication by i on the realification."""
        m = self.complex_dim
        eye = np.eye(m)
        zero = np.zeros((m, m))
        return np.block([[zero, -eye], [eye, zero]])


def hermitian(space: AmbientSpace, a, b) -> complex:
    """h(a, b) = Tr(a b†), which is Σ a_j conj(b_j) in the vector case."""
    a = space.check(a)
    b = space.check(b)
    return complex(np.vdot(b, a))


def riemannian(space: AmbientSpace, a, b) -> float:
    return hermitian(space, a, b).real


def symplectic(space: AmbientSpace, a, b) -> float:
    return hermitian(space, a, b).imag


def norm(space: AmbientSpace, a) -> float:
    return float(np.sqrt(riemannian(space, a, a)))


def liouville(space: AmbientSpace, point, direction) -> float:
    """θ|_A(B) = Im Tr(A B†)."""
    return symplectic(space, point, direction)


# --- retractions -----------------------------------------------------------

RETRACTION_KINDS = ("sphere", "stiefel", "column-spheres")


def _sphere(y: np.ndarray, radius: float) -> np.ndarray:
    r = np.linalg.norm(y)
    if not np.isfinite(r) or r < 1e-300:
        raise RetractionError("cannot normalize a zero vector onto the sphere")
    return y * (radius / r)


def polar_factor(y: np.ndarray) -> np.ndarray:
    """Y (Y†Y)^{-1/2}, the closest matrix with orthonormal columns."""
    gram = y.conj().T @ y
    evals, evecs = np.linalg.eigh(gram)
    if evals[0] <= 1e-14 * max(evals[-1], 1.0):
        raise RetractionError("Y†Y is singular; polar retraction undefined")
    inv_sqrt = (evecs / np.sqrt(evals)) @ evecs.conj().T
    return y @ inv_sqrt


def retract(kind: str, q, v, *, radius: float = 1.0, column_groups=None) -> np.ndarray:
    """Map ``q + v`` back onto the constraint set named by ``kind``.

    ``sphere``: scale to the given Frobenius radius.
    ``stiefel``: polar retraction onto A†A = 𝕀.
    ``column-spheres``: each block of columns in ``column_groups`` is scaled to
    Frobenius norm sqrt(block size), i.e. unit average column norm.
    """
    q = np.asarray(q, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if q.shape != v.shape:
        raise RetractionError(f"point shape {q.shape} != tangent shape {v.shape}")
    y = q + v
    if kind == "sphere":
        return _sphere(y, radius)
    if kind == "stiefel":
        if y.ndim != 2:
            raise RetractionError("stiefel retraction needs a matrix point")
        return polar_factor(y)
    if kind == "column-spheres":
        if y.ndim != 2 or not column_groups:
            raise RetractionError("column-spheres retraction needs a matrix point and column groups")
        out = np.empty_like(y)
        for group in column_groups:
            cols = list(group)
            out[:, cols] = _sphere(y[:, cols], np.sqrt(len(cols)))
        return out
    raise RetractionError(f"unknown manifold kind {kind!r}")
