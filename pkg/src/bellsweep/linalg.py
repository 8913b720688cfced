"""Small dense complex linear algebra: Kronecker products, partial traces,
partial transposes and a cyclic Jacobi eigensolver for Hermitian matrices.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Subsystem
dimensions are given as a sequence of ints, party 0 being the most
significant tensor factor.
"""

from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10


class DimensionError(ValueError):
    """Matrix size does not agree with the declared subsystem dimensions."""


class NotHermitianError(ValueError):
    pass


def kron(a, b, *more):
    """Kronecker product of two or more matrices (or vectors)."""
    return reduce(np.kron, (a, b) + more)


def _check_square(rho, dims: Sequence[int]) -> np.ndarray:
    rho = np.asarray(rho)
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise DimensionError(f"invalid subsystem dimensions {dims}")
    n = int(np.prod(dims))
    if rho.ndim != 2 or rho.shape != (n, n):
        raise DimensionError(
            f"matrix of shape {rho.shape} does not match dims {list(dims)} (size {n})"
        )
    return rho


def _party_set(parties: Iterable[int], nparties: int) -> list[int]:
    if isinstance(parties, (int, np.integer)):
        parties = [parties]
    out = sorted(set(int(p) for p in parties))
    for p in out:
        if not 0 <= p < nparties:
            raise DimensionError(f"party index {p} out of range for {nparties} parties")
    return out


def partial_trace(rho, dims: Sequence[int], keep) -> np.ndarray:
    """Reduce ``rho`` to the parties listed in ``keep``.

    The kept parties retain their original relative order.
    """
    rho = _check_square(rho, dims)
    dims = tuple(dims)
    nparties = len(dims)
    keep = _party_set(keep, nparties)
    traced = [p for p in range(nparties) if p not in keep]
    t = rho.reshape(dims + dims)
    # contract each traced party; go from the highest index so axes stay valid
    for p in reversed(traced):
        n_now = t.ndim // 2
        t = np.trace(t, axis1=p, axis2=p + n_now)
    dk = int(np.prod([dims[p] for p in keep])) if keep else 1
    return t.reshape(dk, dk)


def partial_transpose(rho, dims: Sequence[int], parties) -> np.ndarray:
    """Transpose the indices of the listed parties, leaving the rest alone."""
    rho = _check_square(rho, dims)
    dims = tuple(dims)
    nparties = len(dims)
    parties = _party_set(parties, nparties)
    axes = list(range(2 * nparties))
    for p in parties:
        axes[p], axes[p + nparties] = axes[p + nparties], axes[p]
    n = rho.shape[0]
    return rho.reshape(dims + dims).transpose(axes).reshape(n, n)


def hermiticity_error(h) -> float:
    h = np.asarray(h)
    if h.size == 0:
        return 0.0
    return float(np.max(np.abs(h - np.conj(np.swapaxes(h, -1, -2)))))


def hermitian_eigen(h, tol: float = 1e-13, max_sweeps: int = 100):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Accepts a single ``(n, n)`` matrix or a stack ``(..., n, n)``; stacks are
    rotated in lock-step, which is what makes batches of small matrices cheap.

    Parameters
    ----------
    h : array_like
        Hermitian input (within 1e-10 absolute).
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm drops below
        ``tol * max(1, ||h||_F)``; one extra polishing sweep then follows.
    max_sweeps : int
        Hard cap on the number of cyclic sweeps.

    Returns
    -------
    w : ndarray
        Real eigenvalues in ascending order, shape ``(..., n)``.
    v : ndarray
        Unitary matrix whose columns are the eigenvectors, so that
        ``v @ diag(w) @ v^H`` reconstructs ``h``.
    """
    a = np.array(h, dtype=np.complex128)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionError(f"expected square matrix, got shape {a.shape}")
    err = hermiticity_error(a)
    if err > HERMITIAN_TOL:
        raise NotHermitianError(f"matrix is not Hermitian (max |h - h^H| = {err:.3e})")
    batch_shape = a.shape[:-2]
    n = a.shape[-1]
    a = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    a = a.reshape((-1, n, n)).copy()
    nb = a.shape[0]
    v = np.broadcast_to(np.eye(n, dtype=np.complex128), (nb, n, n)).copy()

    scale = np.maximum(1.0, np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2))))
    offmask = ~np.eye(n, dtype=bool)
    polish = False
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a[:, offmask]) ** 2, axis=1)) if n > 1 else np.zeros(nb)
        if np.all(off < tol * scale):
            if polish or not np.any(off > 0):
                break
            polish = True
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                mag = np.abs(apq)
                active = mag > 1e-300
                if not np.any(active):
                    continue
                safe = np.where(active, mag, 1.0)
                phase = np.where(active, apq / safe, 1.0)
                theta = (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe)
                sgn = np.where(theta >= 0, 1.0, -1.0)
                t = sgn / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # U = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                u00 = c
                u01 = s
                u10 = -s * np.conj(phase)
                u11 = c * np.conj(phase)
                u00c, u01c, u10c, u11c = (x[:, None] for x in (u00, u01, u10, u11))
                cp = a[:, :, p].copy()
                cq = a[:, :, q].copy()
                a[:, :, p] = cp * u00c + cq * u10c
                a[:, :, q] = cp * u01c + cq * u11c
                rp = a[:, p, :].copy()
                rq = a[:, q, :].copy()
                a[:, p, :] = np.conj(u00c) * rp + np.conj(u10c) * rq
                a[:, q, :] = np.conj(u01c) * rp + np.conj(u11c) * rq
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
                vp = v[:, :, p].copy()
                vq = v[:, :, q].copy()
                v[:, :, p] = vp * u00c + vq * u10c
                v[:, :, q] = vp * u01c + vq * u11c

    w = np.real(np.diagonal(a, axis1=1, axis2=2)).copy()
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w.reshape(batch_shape + (n,)), v.reshape(batch_shape + (n, n))


def eigvalsh(h, **kwargs) -> np.ndarray:
    return hermitian_eigen(h, **kwargs)[0]


def min_eigenvalue(h) -> float:
    return float(eigvalsh(h)[..., 0])


def psd_sqrt(h) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix (stackable)."""
    w, v = hermitian_eigen(h)
    root = np.sqrt(np.clip(w, 0.0, None))
    return (v * root[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))
