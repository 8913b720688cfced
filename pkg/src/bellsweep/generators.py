"""Antisymmetric generators L = |j><k| - |k><j| and the Bell operators built
from them.

A dichotomic observable for a unit vector ``a`` is embedded on the ``(j, k)``
block of an ``M x M`` matrix as::

    [[-a3,        a1 + i a2],
     [ a1 - i a2,  a3      ]]

which is ``(a1, -a2, -a3) . sigma``: a fixed rotation of the textbook
``a . sigma``, so the set of reachable observables is unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

UNIT_TOL = 1e-12


@dataclass(frozen=True, order=True)
class Generator:
    """Generator ``|j><k| - |k><j|`` of so(dim), 0-based, ``j < k``."""

    dim: int
    j: int
    k: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"generator dimension must be >= 2, got {self.dim}")
        if not 0 <= self.j < self.k < self.dim:
            raise ValueError(f"need 0 <= j < k < dim, got j={self.j}, k={self.k}, dim={self.dim}")

    @property
    def index(self) -> int:
        """Position in the lexicographic enumeration (0-based alpha)."""
        M, j = self.dim, self.j
        return j * (2 * M - j - 1) // 2 + (self.k - j - 1)

    def matrix(self) -> np.ndarray:
        L = np.zeros((self.dim, self.dim), dtype=np.complex128)
        L[self.j, self.k] = 1.0
        L[self.k, self.j] = -1.0
        return L


@lru_cache(maxsize=None)
def _generator_table(M: int) -> tuple[Generator, ...]:
    return tuple(Generator(M, j, k) for j in range(M) for k in range(j + 1, M))


def enumerate_generators(M: int) -> list[Generator]:
    """All ``M(M-1)/2`` generators in lexicographic ``(j, k)`` order."""
    if M < 2:
        raise ValueError(f"need M >= 2, got {M}")
    return list(_generator_table(M))


def generator_pairs(M: int) -> tuple[np.ndarray, np.ndarray]:
    """``(j, k)`` index arrays of :func:`enumerate_generators`."""
    table = _generator_table(M)
    return np.array([g.j for g in table]), np.array([g.k for g in table])


def generator_matrix(g: Generator) -> np.ndarray:
    return g.matrix()


def _unit(a, name: str = "a") -> np.ndarray:
    a = np.asarray(a, dtype=float).reshape(-1)
    if a.shape != (3,):
        raise ValueError(f"{name} must be a real 3-vector, got shape {a.shape}")
    n = float(np.linalg.norm(a))
    if abs(n - 1.0) > UNIT_TOL:
        raise ValueError(f"{name} must be a unit vector, |{name}| = {n:.15g}")
    return a


def block_observable(a) -> np.ndarray:
    """The 2x2 dichotomic observable of unit vector ``a``."""
    a1, a2, a3 = _unit(a)
    return np.array([[-a3, a1 + 1j * a2], [a1 - 1j * a2, a3]], dtype=np.complex128)


@dataclass(frozen=True)
class MeasurementSetting:
    """Two unit 3-vectors per site."""

    a1: tuple[float, float, float]
    a2: tuple[float, float, float]
    b1: tuple[float, float, float]
    b2: tuple[float, float, float]

    def __post_init__(self):
        for name in ("a1", "a2", "b1", "b2"):
            vec = _unit(getattr(self, name), name)
            object.__setattr__(self, name, tuple(float(x) for x in vec))

    def as_dict(self) -> dict:
        return {"a1": list(self.a1), "a2": list(self.a2), "b1": list(self.b1), "b2": list(self.b2)}


def embed_observable(a, g: Generator) -> np.ndarray:
    """Observable of ``a`` placed on the nonzero rows/columns of ``g``."""
    out = np.zeros((g.dim, g.dim), dtype=np.complex128)
    out[np.ix_([g.j, g.k], [g.j, g.k])] = block_observable(a)
    return out


def tilde_observable(a, g: Generator) -> np.ndarray:
    """``L A L^dagger`` for the embedded observable ``A`` of ``a``."""
    L = g.matrix()
    return L @ embed_observable(a, g) @ L.conj().T


def chsh_combination(A1, A2, B1, B2) -> np.ndarray:
    return np.kron(A1, B1) + np.kron(A1, B2) + np.kron(A2, B1) - np.kron(A2, B2)


def bell_operator(gA: Generator, gB: Generator, s: MeasurementSetting) -> np.ndarray:
    """Projected CHSH operator on a ``gA.dim * gB.dim`` dimensional space."""
    return chsh_combination(
        tilde_observable(s.a1, gA),
        tilde_observable(s.a2, gA),
        tilde_observable(s.b1, gB),
        tilde_observable(s.b2, gB),
    )
