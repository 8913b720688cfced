"""Concurrence: bipartite pure, two-qubit mixed (Wootters), multipartite pure,
and the decomposition of a pure state's concurrence over its two-qubit
projections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chsh import SY
from .generators import Generator, enumerate_generators
from .linalg import hermitian_eigen
from .projection import (
    DEGENERATE_WEIGHT,
    Bipartition,
    enumerate_bipartitions,
    projected_vectors,
    source_indices,
    split_state,
)
from .states import PureState

_YY = np.kron(SY, SY)


def minor_sum(m: np.ndarray) -> float:
    """Sum of ``|m[i,j] m[i',j'] - m[i,j'] m[i',j]|^2`` over ``i<i'``, ``j<j'``.

    Computed from the minors themselves, so product states give exactly
    (not approximately) zero up to rounding of the amplitudes.
    """
    m = np.asarray(m)
    if m.shape[0] > m.shape[1]:
        m = m.T
    rows, cols = m.shape
    ja, ka = np.triu_indices(cols, 1)
    total = 0.0
    for i in range(rows - 1):
        r = m[i]
        rest = m[i + 1 :]
        minors = r[ja][None, :] * rest[:, ka] - r[ka][None, :] * rest[:, ja]
        total += float(np.sum(np.abs(minors) ** 2))
    return total


def _bipartite_matrix(psi: PureState, cut: Bipartition | None) -> np.ndarray:
    if cut is None:
        if psi.nparties != 2:
            raise ValueError("a bipartition is required for states with more than two parties")
        cut = enumerate_bipartitions(2)[0]
    split = split_state(psi, cut)
    return split.amplitudes.reshape(split.dims)


def pure_bipartite_concurrence(psi: PureState, cut: Bipartition | None = None) -> float:
    """``sqrt(2 (1 - Tr rho_A^2))`` across ``cut``."""
    return 2.0 * math.sqrt(minor_sum(_bipartite_matrix(psi, cut)))


def wootters_concurrence(rho):
    """Two-qubit concurrence ``max(0, l1 - l2 - l3 - l4)``; stackable.

    The ``l_i`` (square roots of the eigenvalues of ``rho rho~``) are taken
    as the singular values of ``X^T (sy x sy) X`` for ``rho = X X^dagger``,
    read off the Hermitian dilation ``[[0, tau], [tau^H, 0]]``.  This keeps
    the small ``l_i`` accurate to rounding instead of its square root.
    """
    m = np.asarray(getattr(rho, "matrix", rho), dtype=np.complex128)
    w, v = hermitian_eigen(m)
    x = v * np.sqrt(np.clip(w, 0.0, None))[..., None, :]
    tau = np.swapaxes(x, -1, -2) @ _YY @ x
    dil = np.zeros(m.shape[:-2] + (8, 8), dtype=np.complex128)
    dil[..., :4, 4:] = tau
    dil[..., 4:, :4] = np.conj(np.swapaxes(tau, -1, -2))
    lam = np.clip(hermitian_eigen(dil)[0][..., 4:][..., ::-1], 0.0, None)
    c = np.maximum(0.0, lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3])
    return float(c) if c.ndim == 0 else c


def multipartite_constant(d: int, L: int) -> float:
    """``K = d / (2 m (d - 1))`` with ``m = 2^(L-1) - 1``."""
    m = 2 ** (L - 1) - 1
    return d / (2.0 * m * (d - 1))


def multipartite_concurrence(psi: PureState, d: int | None = None, L: int | None = None) -> float:
    """Concurrence of an L-partite pure state with equal local dimension d."""
    dims = psi.dims
    if len(set(dims)) != 1:
        raise ValueError(f"multipartite concurrence needs equal local dimensions, got {list(dims)}")
    if d is not None and d != dims[0]:
        raise ValueError(f"local dimension {d} does not match state dims {list(dims)}")
    if L is not None and L != len(dims):
        raise ValueError(f"party count {L} does not match state dims {list(dims)}")
    d, L = dims[0], len(dims)
    total = sum(4.0 * minor_sum(_bipartite_matrix(psi, cut)) for cut in enumerate_bipartitions(dims))
    return math.sqrt(multipartite_constant(d, L) * total)


def entanglement_measure(psi: PureState) -> float:
    """Zero iff ``psi`` is fully product.

    Bipartite: :func:`pure_bipartite_concurrence`; equal local dims:
    :func:`multipartite_concurrence`; otherwise the largest bipartite
    concurrence over all cuts.
    """
    if psi.nparties == 2:
        return pure_bipartite_concurrence(psi)
    if len(set(psi.dims)) == 1:
        return multipartite_concurrence(psi)
    return max(pure_bipartite_concurrence(psi, cut) for cut in enumerate_bipartitions(psi.dims))


@dataclass(frozen=True)
class ConcurrenceTerm:
    bipartition: Bipartition
    gen_a: Generator
    gen_b: Generator
    weight: float
    concurrence: float


@dataclass(frozen=True)
class ConcurrenceBreakdown:
    total: float
    K: float
    terms: list

    def reconstructed(self) -> float:
        return math.sqrt(self.K * sum((t.weight * t.concurrence) ** 2 for t in self.terms))


def concurrence_decomposition(psi: PureState) -> ConcurrenceBreakdown:
    """Split the concurrence of ``psi`` over its non-degenerate projections.

    ``total^2 = K * sum(weight^2 * C^2)``, ``weight = <v|v>`` of the projected
    vector; ``K = 1`` for two parties, else the multipartite constant.
    """
    if psi.nparties == 2:
        K = 1.0
    else:
        if len(set(psi.dims)) != 1:
            raise ValueError("decomposition of >2 parties needs equal local dimensions")
        K = multipartite_constant(psi.dims[0], psi.nparties)
    terms = []
    for cut in enumerate_bipartitions(psi.dims):
        split = split_state(psi, cut)
        da, db = split.dims
        v = projected_vectors(split.amplitudes.reshape(da, db), source_indices(da, db))
        w = np.sum(np.abs(v) ** 2, axis=1)
        minor = np.abs(v[:, 0] * v[:, 3] - v[:, 1] * v[:, 2])
        gens_a, gens_b = enumerate_generators(da), enumerate_generators(db)
        nb = len(gens_b)
        for r in np.flatnonzero(w >= DEGENERATE_WEIGHT):
            ia, ib = divmod(int(r), nb)
            terms.append(ConcurrenceTerm(cut, gens_a[ia], gens_b[ib], float(w[r]), float(2 * minor[r] / w[r])))
    total = pure_bipartite_concurrence(psi) if psi.nparties == 2 else multipartite_concurrence(psi)
    return ConcurrenceBreakdown(total, K, terms)
