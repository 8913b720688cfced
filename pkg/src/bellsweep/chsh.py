"""CHSH expectation values on two-qubit states.

The maximal violation has the closed form ``2 sqrt(u1 + u2)`` with ``u1, u2``
the two largest eigenvalues of ``T^T T``, ``T`` the Pauli correlation tensor.
:func:`seesaw_optimize` finds explicit settings reaching it.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .generators import MeasurementSetting, block_observable, chsh_combination
from .linalg import DimensionError, NotHermitianError, hermiticity_error, hermitian_eigen

SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (SX, SY, SZ)
_PAULI_PAIRS = np.array([[np.kron(a, b) for b in PAULIS] for a in PAULIS])

# block_observable(a) == (R a) . sigma
_FRAME = np.diag([1.0, -1.0, -1.0])

TSIRELSON = 2.0 * math.sqrt(2.0)


class SeesawConvergenceError(RuntimeError):
    pass


def _matrix(rho) -> np.ndarray:
    return np.asarray(getattr(rho, "matrix", rho), dtype=np.complex128)


def correlation_matrix(rho) -> np.ndarray:
    """``T[i, j] = Tr(rho sigma_i x sigma_j)``; accepts a stack ``(..., 4, 4)``."""
    m = _matrix(rho)
    if m.shape[-2:] != (4, 4):
        raise DimensionError(f"expected a two-qubit (4x4) matrix, got shape {m.shape}")
    return np.einsum("...ab,ijba->...ij", m, _PAULI_PAIRS).real


def horodecki_max_violation(T):
    """Maximum of the CHSH expectation over all settings, from ``T``."""
    T = np.asarray(T, dtype=float)
    w = hermitian_eigen(np.swapaxes(T, -1, -2) @ T)[0]
    top = np.clip(w[..., -1] + w[..., -2], 0.0, 8.0)
    out = 2.0 * np.sqrt(top)
    return float(out) if out.ndim == 0 else out


def chsh_operator(s: MeasurementSetting) -> np.ndarray:
    """Two-qubit CHSH operator for ``s``."""
    return chsh_combination(
        block_observable(s.a1), block_observable(s.a2), block_observable(s.b1), block_observable(s.b2)
    )


def evaluate_bell(rho, op) -> float:
    """``Tr(op rho)`` for Hermitian ``op``."""
    m = _matrix(rho)
    op = np.asarray(op, dtype=np.complex128)
    if m.shape != op.shape or m.ndim != 2:
        raise DimensionError(f"operator shape {op.shape} does not match state shape {m.shape}")
    if hermiticity_error(op) > 1e-10:
        raise NotHermitianError("Bell operator must be Hermitian")
    val = np.sum(op * m.T)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"expectation value has imaginary part {val.imag:.3e}")
    return float(val.real)


class SeesawResult(NamedTuple):
    settings: MeasurementSetting
    value: float
    iterations: int
    history: list


def _unit_or(x: np.ndarray, fallback: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(x)
    return x / n if n > 1e-300 else fallback


def _orthogonal_to(x: np.ndarray) -> np.ndarray:
    e = np.eye(3)[int(np.argmin(np.abs(x)))]
    y = e - x * (x @ e)
    return y / np.linalg.norm(y)


def _run_seesaw(Tf, b1, b2, max_iter, tol):
    a1 = np.array([1.0, 0.0, 0.0])
    a2 = np.array([0.0, 0.0, 1.0])
    history = []
    prev = -np.inf
    for it in range(1, max_iter + 1):
        a1 = _unit_or(Tf @ (b1 + b2), a1)
        a2 = _unit_or(Tf @ (b1 - b2), _orthogonal_to(a1))
        b1n = _unit_or(Tf.T @ (a1 + a2), b1)
        b2n = _unit_or(Tf.T @ (a1 - a2), _orthogonal_to(b1n))
        b1, b2 = b1n, b2n
        value = float(a1 @ Tf @ (b1 + b2) + a2 @ Tf @ (b1 - b2))
        history.append(value)
        if value - prev < tol:
            return a1, a2, b1, b2, history, it, True
        prev = value
    return a1, a2, b1, b2, history, max_iter, False


def seesaw_optimize(
    rho, max_iter: int = 500, tol: float = 1e-13, restarts: int = 5, seed: int = 0
) -> SeesawResult:
    """Alternating best-response maximization of the CHSH value.

    Site A's optimal directions for fixed B are ``T(b1 +- b2)`` normalized,
    and symmetrically for B, so every half-step is closed form and the value
    never decreases.  The first run starts from the two leading right
    singular directions of ``T`` rotated by +-45 degrees; random restarts
    follow only if the result falls short of the closed-form maximum.
    """
    m = _matrix(rho)
    T = correlation_matrix(m)
    target = horodecki_max_violation(T)
    Tf = _FRAME @ T @ _FRAME
    w, v = hermitian_eigen(Tf.T @ Tf)
    v = v.real
    if w[-1] <= 1e-28:
        s = MeasurementSetting((1, 0, 0), (0, 0, 1), (1 / math.sqrt(2), 0, 1 / math.sqrt(2)),
                               (1 / math.sqrt(2), 0, -1 / math.sqrt(2)))
        return SeesawResult(s, evaluate_bell(m, chsh_operator(s)), 0, [0.0])
    v1, v2 = v[:, -1], v[:, -2]
    starts = [((v1 + v2) / math.sqrt(2), (v1 - v2) / math.sqrt(2))]
    rng = np.random.default_rng(seed)
    best = None
    total_iters = 0
    for attempt in range(restarts + 1):
        if attempt >= len(starts):
            b = rng.standard_normal((2, 3))
            starts.append((b[0] / np.linalg.norm(b[0]), b[1] / np.linalg.norm(b[1])))
        a1, a2, b1, b2, hist, its, ok = _run_seesaw(Tf, *starts[attempt], max_iter, tol)
        total_iters += its
        if not ok:
            raise SeesawConvergenceError(
                f"see-saw did not converge within {max_iter} iterations (last value {hist[-1]:.15g})"
            )
        if best is None or hist[-1] > best[4][-1]:
            best = (a1, a2, b1, b2, hist)
        if best[4][-1] >= target - 1e-9:
            break
    a1, a2, b1, b2, hist = best
    s = MeasurementSetting(tuple(a1), tuple(a2), tuple(b1), tuple(b2))
    return SeesawResult(s, evaluate_bell(m, chsh_operator(s)), total_iters, hist)
