"""Bipartitions of L parties and projections onto "two-qubit" blocks.

For generators ``L_A = |j><k| - |k><j|`` and ``L_B = |j'><k'| - |k'><j'|`` the
projected state ``(L_A x L_B) rho (L_A x L_B)^dagger`` is supported on the
four composite basis states ordered ``(j j', j k', k j', k k')``.  Those 16
entries are read off ``rho`` directly: row ``j`` of ``L`` picks source ``k``
with sign ``+``, row ``k`` picks source ``j`` with sign ``-``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .generators import Generator, generator_pairs
from .states import DensityMatrix, PureState

DEGENERATE_WEIGHT = 1e-14

# sign of each compact basis state (jj', jk', kj', kk')
_SIGNS = np.array([1.0, -1.0, -1.0, 1.0])


class DegenerateProjection(ValueError):
    """The projection annihilates the state (weight below threshold)."""


@dataclass(frozen=True)
class Bipartition:
    """Split of the parties into A (always holding party 0) and B."""

    parties_a: tuple[int, ...]
    parties_b: tuple[int, ...]
    dims: tuple[int, ...] | None = None

    def __post_init__(self):
        a, b = tuple(sorted(self.parties_a)), tuple(sorted(self.parties_b))
        L = len(a) + len(b)
        if not a or not b:
            raise ValueError("both sides of a bipartition must be nonempty")
        if set(a) & set(b) or set(a) | set(b) != set(range(L)):
            raise ValueError(f"parties {a} | {b} do not partition range({L})")
        if 0 not in a:
            a, b = b, a
        if self.dims is not None and len(self.dims) != L:
            raise ValueError(f"bipartition of {L} parties given {len(self.dims)} dims")
        object.__setattr__(self, "parties_a", a)
        object.__setattr__(self, "parties_b", b)
        if self.dims is not None:
            object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    @classmethod
    def parse(cls, text: str, dims: Sequence[int]) -> "Bipartition":
        """``"0,1|2"`` or just the A side ``"0,1"``."""
        L = len(dims)
        left = text.split("|")[0]
        a = tuple(int(x) for x in left.replace(" ", "").split(",") if x)
        b = tuple(p for p in range(L) if p not in a)
        return cls(a, b, tuple(dims))

    @property
    def nparties(self) -> int:
        return len(self.parties_a) + len(self.parties_b)

    @property
    def mask(self) -> int:
        return sum(1 << p for p in self.parties_a)

    def _need_dims(self) -> tuple[int, ...]:
        if self.dims is None:
            raise ValueError("bipartition carries no subsystem dimensions")
        return self.dims

    @property
    def dim_a(self) -> int:
        dims = self._need_dims()
        return math.prod(dims[p] for p in self.parties_a)

    @property
    def dim_b(self) -> int:
        dims = self._need_dims()
        return math.prod(dims[p] for p in self.parties_b)

    def with_dims(self, dims: Sequence[int]) -> "Bipartition":
        return Bipartition(self.parties_a, self.parties_b, tuple(dims))

    @property
    def label(self) -> str:
        return ",".join(map(str, self.parties_a)) + "|" + ",".join(map(str, self.parties_b))

    def __str__(self) -> str:
        return self.label


def enumerate_bipartitions(L) -> list[Bipartition]:
    """All ``2^(L-1) - 1`` bipartitions, ordered by the bitmask of side A.

    ``L`` is a party count or a sequence of subsystem dimensions (in which
    case the bipartitions carry those dims).
    """
    dims = None
    if not isinstance(L, (int, np.integer)):
        dims = tuple(int(d) for d in L)
        L = len(dims)
    if L < 2:
        raise ValueError(f"need at least 2 parties, got {L}")
    full = (1 << L) - 1
    out = []
    for mask in range(1, full, 2):
        a = tuple(p for p in range(L) if mask >> p & 1)
        b = tuple(p for p in range(L) if not mask >> p & 1)
        out.append(Bipartition(a, b, dims))
    return out


def _permutation(p: Bipartition) -> list[int]:
    return list(p.parties_a) + list(p.parties_b)


def split_state(state, p: Bipartition):
    """Regroup ``state`` as bipartite ``(dim_a, dim_b)`` with A most significant."""
    dims = state.dims
    if p.nparties != len(dims):
        raise ValueError(f"bipartition of {p.nparties} parties applied to {len(dims)}-party state")
    p = p.with_dims(dims)
    perm = _permutation(p)
    new_dims = (p.dim_a, p.dim_b)
    if isinstance(state, PureState):
        amps = state.amplitudes.reshape(dims).transpose(perm).reshape(-1)
        return PureState(amps, new_dims)
    L = len(dims)
    n = state.matrix.shape[0]
    mat = state.matrix.reshape(dims + dims).transpose(perm + [q + L for q in perm]).reshape(n, n)
    return DensityMatrix(mat, new_dims)


def merge_state(state, p: Bipartition, dims: Sequence[int]):
    """Inverse of :func:`split_state`."""
    dims = tuple(int(d) for d in dims)
    p = p.with_dims(dims)
    perm = _permutation(p)
    inv = list(np.argsort(perm))
    permuted = tuple(dims[q] for q in perm)
    if isinstance(state, PureState):
        amps = state.amplitudes.reshape(permuted).transpose(inv).reshape(-1)
        return PureState(amps, dims)
    L = len(dims)
    n = state.matrix.shape[0]
    mat = state.matrix.reshape(permuted + permuted).transpose(inv + [q + L for q in inv]).reshape(n, n)
    return DensityMatrix(mat, dims)


@dataclass(frozen=True, eq=False)
class ProjectedTwoQubit:
    """Normalized 4x4 block of a projected state and where it came from.

    ``weight`` is the Frobenius norm of the unnormalized projection and
    ``trace`` its trace; ``compact`` is divided by the trace.  For pure
    inputs the two coincide.
    """

    compact: np.ndarray
    weight: float
    trace: float
    gen_a: Generator
    gen_b: Generator
    bipartition: Bipartition | None = None


def source_indices(dim_a: int, dim_b: int) -> np.ndarray:
    """Composite source indices feeding each compact entry, shape
    ``(nA*nB, 4)``; row ``r`` belongs to generator pair ``divmod(r, nB)``."""
    ja, ka = generator_pairs(dim_a)
    jb, kb = generator_pairs(dim_b)
    ja, ka = ja[:, None], ka[:, None]
    jb, kb = jb[None, :], kb[None, :]
    src = np.stack(
        [ka * dim_b + kb, ka * dim_b + jb, ja * dim_b + kb, ja * dim_b + jb], axis=-1
    )
    return src.reshape(-1, 4)


def projected_vectors(psi_matrix: np.ndarray, src: np.ndarray) -> np.ndarray:
    """Unnormalized projected vectors ``(n, 4)`` of a pure bipartite state."""
    return psi_matrix.reshape(-1)[src] * _SIGNS


def projected_blocks(rho: np.ndarray, src: np.ndarray) -> np.ndarray:
    """Unnormalized projected 4x4 blocks ``(n, 4, 4)`` of a density matrix."""
    return rho[src[:, :, None], src[:, None, :]] * np.outer(_SIGNS, _SIGNS)


def project_two_qubit(state, gA: Generator, gB: Generator, bipartition: Bipartition | None = None):
    """Two-qubit projection of a bipartite state (pure or mixed).

    Raises :class:`DegenerateProjection` when the projection's Frobenius
    norm is below ``1e-14``.
    """
    if len(state.dims) != 2:
        raise ValueError("project_two_qubit needs a bipartite state; call split_state first")
    dim_a, dim_b = state.dims
    if gA.dim != dim_a or gB.dim != dim_b:
        raise ValueError(
            f"generator dims ({gA.dim}, {gB.dim}) do not match state dims ({dim_a}, {dim_b})"
        )
    src = np.array(
        [gA.k * dim_b + gB.k, gA.k * dim_b + gB.j, gA.j * dim_b + gB.k, gA.j * dim_b + gB.j]
    )[None, :]
    if isinstance(state, PureState):
        v = projected_vectors(state.amplitudes, src)[0]
        block = np.outer(v, v.conj())
    else:
        block = projected_blocks(state.matrix, src)[0]
    weight = float(np.linalg.norm(block))
    if weight < DEGENERATE_WEIGHT:
        raise DegenerateProjection(
            f"projection ({gA.j},{gA.k}) x ({gB.j},{gB.k}) annihilates the state (weight {weight:.3e})"
        )
    tr = float(np.trace(block).real)
    return ProjectedTwoQubit(block / tr, weight, tr, gA, gB, bipartition)
