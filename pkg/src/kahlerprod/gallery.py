"""Named instances: Hopf circles on odd spheres, U(k) on Stiefel manifolds,
tori inside U(k), and finite truncations of S^{2n+1} × S(ℋ).

S^{2n+1} × S(ℋ) cannot be Kähler for the structure J; that conclusion is
cohomological and is not computed here.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import groups
from .ambient import AmbientSpace, Tolerances
from .errors import ConfigError, GroupError
from .groups import Torus, Unitary
from .moment import LevelSet, MomentMap
from .product import ProductACS

DEFAULT_TRUNCATION = 25


@dataclass(frozen=True, eq=False)
class GalleryInstance:
    name: str
    acs: ProductACS
    description: str

    @property
    def group(self):
        return self.acs.group

    @property
    def abelian(self) -> bool:
        return self.group.abelian

    @property
    def factor_dims(self) -> tuple[int, int]:
        return self.acs.n1.dim, self.acs.n2.dim

    @property
    def dim(self) -> int:
        return self.acs.dim

    @property
    def is_circle(self) -> bool:
        return self.group.dim == 1

    def circle(self) -> np.ndarray:
        """Algebra element of the period-1 diagonal circle used by Ψ."""
        return groups.circle_generator(self.group)


def sphere_level(n_coords: int, tol: Tolerances | None = None) -> LevelSet:
    """Unit sphere S^{2n-1} ⊂ ℂⁿ as μ⁻¹(0) for μ(z) = π(|z|² - 1)."""
    m = MomentMap(Torus.hopf(n_coords), AmbientSpace.vectors(n_coords), np.array([-np.pi]))
    return LevelSet(m, np.zeros(1), "sphere", "sphere", tol=tol or Tolerances())


def stiefel_level(k: int, n: int, tol: Tolerances | None = None) -> LevelSet:
    """V_k(ℂⁿ) = μ⁻¹(i𝕀) for μ(A) = i A†A."""
    if n < k:
        raise GroupError(f"Stiefel manifold needs n >= k, got k={k}, n={n}")
    m = MomentMap(Unitary(k), AmbientSpace.matrices(n, k))
    return LevelSet(m, 1j * np.eye(k), "stiefel", "stiefel", tol=tol or Tolerances())


def torus_column_groups(k: int, p: int) -> tuple[tuple[int, ...], ...]:
    """Factor a < p-1 rotates column a; the last factor rotates columns p-1..k-1 together."""
    return tuple((a,) for a in range(p - 1)) + (tuple(range(p - 1, k)),)


def torus_in_stiefel_level(k: int, n: int, p: int, tol: Tolerances | None = None) -> LevelSet:
    """Level set of a p-torus in U(k) containing V_k(ℂⁿ).

    The torus moment map only constrains the norm of each column group, so the
    level set is a product of spheres; Stiefel frames lie on it and are what the
    sampler draws.
    """
    if not 1 <= p <= k <= n:
        raise GroupError(f"need 1 <= p <= k <= n, got p={p}, k={k}, n={n}")
    col_groups = torus_column_groups(k, p)
    W = np.zeros((n, k, p), dtype=int)
    for a, cols in enumerate(col_groups):
        W[:, list(cols), a] = 1
    G = Torus.from_matrix(W.reshape(n * k, p))
    sizes = np.array([len(c) for c in col_groups], dtype=float)
    m = MomentMap(G, AmbientSpace.matrices(n, k), -np.pi * sizes)
    return LevelSet(m, np.zeros(p), "column-spheres", "stiefel", column_groups=col_groups,
                    tol=tol or Tolerances())


def make_sphere_product(n: int, m: int, tol: Tolerances | None = None, basis=None) -> GalleryInstance:
    if n < 0 or m < 0:
        raise ConfigError("sphere product needs n, m >= 0")
    acs = ProductACS(sphere_level(n + 1, tol), sphere_level(m + 1, tol), basis)
    return GalleryInstance(f"sphere:{n},{m}", acs,
                           f"S^{2 * n + 1} x S^{2 * m + 1} with diagonal Hopf circles")


def make_stiefel_product(k: int, n: int, tol: Tolerances | None = None, basis=None) -> GalleryInstance:
    acs = ProductACS(stiefel_level(k, n, tol), stiefel_level(k, n, tol), basis)
    return GalleryInstance(f"stiefel:{k},{n}", acs, f"V_{k}(C^{n}) x V_{k}(C^{n}) under U({k})")


def make_torus_in_stiefel(k: int, n: int, p: int, tol: Tolerances | None = None,
                          basis=None) -> GalleryInstance:
    if p > k:
        raise GroupError(f"torus dimension p={p} exceeds k={k}")
    acs = ProductACS(torus_in_stiefel_level(k, n, p, tol), torus_in_stiefel_level(k, n, p, tol), basis)
    return GalleryInstance(f"stiefel-torus:{k},{n},{p}", acs,
                           f"{p}-torus in U({k}) acting on n={n} frames, both factors")


def make_calabi_eckmann(n: int, truncation: int = DEFAULT_TRUNCATION,
                        tol: Tolerances | None = None) -> GalleryInstance:
    """S^{2n+1} × S(ℋ) with ℋ truncated to ℂ^truncation."""
    inst = make_sphere_product(n, truncation - 1, tol)
    return GalleryInstance(f"calabi-eckmann:{n},{truncation}", inst.acs,
                           f"S^{2 * n + 1} x S(H), H truncated to C^{truncation}")


_BUILDERS = {
    "sphere": (make_sphere_product, (2,)),
    "stiefel": (make_stiefel_product, (2,)),
    "stiefel-torus": (make_torus_in_stiefel, (3,)),
    "calabi-eckmann": (make_calabi_eckmann, (1, 2)),
}

INSTANCE_KINDS = tuple(_BUILDERS)


def parse_instance(name: str, tol: Tolerances | None = None) -> GalleryInstance:
    """Build an instance from ``"kind:a,b[,c]"``, e.g. ``"stiefel-torus:2,4,1"``."""
    kind, _, args = name.partition(":")
    if kind not in _BUILDERS:
        raise ConfigError(f"unknown instance kind {kind!r}; choose from {', '.join(INSTANCE_KINDS)}")
    builder, arities = _BUILDERS[kind]
    try:
        values = [int(x) for x in args.split(",")] if args else []
    except ValueError:
        raise ConfigError(f"instance arguments must be integers: {name!r}") from None
    if len(values) not in arities:
        raise ConfigError(f"{kind} takes {' or '.join(map(str, arities))} integer arguments, got {name!r}")
    return builder(*values, tol=tol)
