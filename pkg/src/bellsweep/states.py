"""Pure states and density matrices tagged with subsystem dimensions.

Includes the named-state catalogue, Haar sampling and the JSON state file
format::

    {"kind": "pure", "dims": [2, 2], "amplitudes": [[re, im], ...]}
    {"kind": "density", "dims": [2, 2], "entries": [[re, im], ...]}   # row-major
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .linalg import HERMITIAN_TOL, eigvalsh
from .jsonfmt import dumps

NORM_TOL = 1e-10
PSD_TOL = 1e-8


class StateError(ValueError):
    """Invalid state data: bad dims, normalization, Hermiticity, positivity."""


def _dims(dims) -> tuple[int, ...]:
    try:
        out = tuple(int(d) for d in dims)
    except (TypeError, ValueError) as exc:
        raise StateError(f"dims must be a list of integers, got {dims!r}") from exc
    if not out:
        raise StateError("dims must be non-empty")
    for d in out:
        if d < 2:
            raise StateError(f"every subsystem dimension must be >= 2, got {list(out)}")
    return out


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = _dims(self.dims)
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        size = math.prod(dims)
        if amps.size != size:
            raise StateError(
                f"dimension mismatch: dims {list(dims)} need {size} amplitudes, got {amps.size}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise StateError(f"state is not normalized (norm = {norm:.12g})")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    kind = "pure"

    @classmethod
    def from_vector(cls, vec, dims) -> "PureState":
        """Normalize an arbitrary nonzero vector."""
        vec = np.asarray(vec, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise StateError("cannot normalize the zero vector")
        return cls(vec / norm, dims)

    @property
    def nparties(self) -> int:
        return len(self.dims)

    def density(self) -> "DensityMatrix":
        psi = self.amplitudes
        return DensityMatrix(np.outer(psi, psi.conj()), self.dims)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    dims: tuple[int, ...]

    kind = "density"

    def __post_init__(self):
        dims = _dims(self.dims)
        size = math.prod(dims)
        mat = np.array(self.matrix, dtype=np.complex128)
        if mat.shape != (size, size):
            raise StateError(
                f"dimension mismatch: dims {list(dims)} need a {size}x{size} matrix, "
                f"got shape {mat.shape}"
            )
        diff = np.abs(mat - mat.conj().T)
        if diff.max() > HERMITIAN_TOL:
            i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
            raise StateError(
                f"matrix is not Hermitian: entries ({i},{j}) and ({j},{i}) differ by {diff[i, j]:.3e}"
            )
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > NORM_TOL:
            raise StateError(f"trace must be 1, got {tr.real:.12g}")
        mat.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", mat)

    @property
    def nparties(self) -> int:
        return len(self.dims)

    def min_eigenvalue(self) -> float:
        return float(eigvalsh(self.matrix)[0])

    def check_positive(self) -> "DensityMatrix":
        lam = self.min_eigenvalue()
        if lam < -PSD_TOL:
            raise StateError(f"matrix is not positive semidefinite (min eigenvalue {lam:.3e})")
        return self


def as_density(state) -> DensityMatrix:
    return state.density() if isinstance(state, PureState) else state


# ---------------------------------------------------------------- named states


@dataclass(frozen=True)
class AcinParams:
    """Three-qubit canonical form
    l0|000> + l1 e^{i psi}|100> + l2|101> + l3|110> + l4|111>."""

    l0: float = 0.0
    l1: float = 0.0
    l2: float = 0.0
    l3: float = 0.0
    l4: float = 0.0
    psi: float = 0.0

    def __post_init__(self):
        lam = self.lambdas
        if any(x < 0 for x in lam):
            raise StateError("Acin coefficients must be non-negative")
        if not 0.0 <= self.psi <= math.pi:
            raise StateError(f"Acin phase must lie in [0, pi], got {self.psi}")
        total = sum(x * x for x in lam)
        if abs(total - 1.0) > NORM_TOL:
            raise StateError(f"Acin coefficients must satisfy sum l_i^2 = 1, got {total:.12g}")

    @property
    def lambdas(self) -> tuple[float, ...]:
        return (self.l0, self.l1, self.l2, self.l3, self.l4)

    @classmethod
    def normalized(cls, l0=0.0, l1=0.0, l2=0.0, l3=0.0, l4=0.0, psi=0.0) -> "AcinParams":
        norm = math.sqrt(l0 * l0 + l1 * l1 + l2 * l2 + l3 * l3 + l4 * l4)
        if norm == 0:
            raise StateError("Acin coefficients are all zero")
        return cls(l0 / norm, l1 / norm, l2 / norm, l3 / norm, l4 / norm, psi)


def acin_state(p: AcinParams) -> PureState:
    amps = np.zeros(8, dtype=np.complex128)
    amps[0b000] = p.l0
    amps[0b100] = p.l1 * np.exp(1j * p.psi)
    amps[0b101] = p.l2
    amps[0b110] = p.l3
    amps[0b111] = p.l4
    return PureState(amps, (2, 2, 2))


_BELL = {
    "phi+": ([1, 0, 0, 1], 1),
    "phi-": ([1, 0, 0, -1], 1),
    "psi+": ([0, 1, 1, 0], 1),
    "psi-": ([0, 1, -1, 0], 1),
}


def bell_state(which: str = "phi+") -> PureState:
    try:
        vec, _ = _BELL[which]
    except KeyError:
        raise StateError(f"unknown Bell state {which!r}; choose from {sorted(_BELL)}") from None
    return PureState.from_vector(vec, (2, 2))


def ghz_state(L: int = 3, d: int = 2) -> PureState:
    if L < 2 or d < 2:
        raise StateError("ghz needs L >= 2 parties and local dimension d >= 2")
    dims = (d,) * L
    amps = np.zeros(d**L, dtype=np.complex128)
    step = sum(d**k for k in range(L))
    amps[[i * step for i in range(d)]] = 1.0 / math.sqrt(d)
    return PureState(amps, dims)


def w_state(L: int = 3) -> PureState:
    if L < 2:
        raise StateError("w needs L >= 2 parties")
    amps = np.zeros(2**L, dtype=np.complex128)
    for k in range(L):
        amps[1 << (L - 1 - k)] = 1.0 / math.sqrt(L)
    return PureState(amps, (2,) * L)


def product_state(local_vectors: Sequence) -> PureState:
    vecs = []
    for v in local_vectors:
        v = np.asarray(v, dtype=np.complex128).reshape(-1)
        n = np.linalg.norm(v)
        if n == 0:
            raise StateError("product state factor is the zero vector")
        vecs.append(v / n)
    if not vecs:
        raise StateError("product state needs at least one factor")
    amps = vecs[0]
    for v in vecs[1:]:
        amps = np.kron(amps, v)
    return PureState(amps, tuple(v.size for v in vecs))


def werner_state(p: float) -> DensityMatrix:
    """p |phi+><phi+| + (1 - p) I/4."""
    if not 0.0 <= p <= 1.0:
        raise StateError(f"werner parameter must lie in [0, 1], got {p}")
    phi = bell_state("phi+").amplitudes
    rho = p * np.outer(phi, phi.conj()) + (1.0 - p) * np.eye(4) / 4.0
    return DensityMatrix(rho, (2, 2))


def isotropic_state(d: int, F: float) -> DensityMatrix:
    """F |Phi_d><Phi_d| + (1 - F)(I - |Phi_d><Phi_d|)/(d^2 - 1)."""
    if d < 2:
        raise StateError("isotropic needs d >= 2")
    if not 0.0 <= F <= 1.0:
        raise StateError(f"isotropic fidelity must lie in [0, 1], got {F}")
    phi = ghz_state(2, d).amplitudes
    proj = np.outer(phi, phi.conj())
    rho = F * proj + (1.0 - F) * (np.eye(d * d) - proj) / (d * d - 1)
    return DensityMatrix(rho, (d, d))


# Bruss-Peres chessboard parameters (a, b, c, d, m, n); s = ac/n, t = ad/m.
CHESSBOARD_PARAMS = (1.0, -1.0, 1.0, 1.0, 1.0, 1.0)


def chessboard_state(params: Sequence[float] = CHESSBOARD_PARAMS) -> DensityMatrix:
    """3x3 chessboard state, PPT and entangled for the default parameters."""
    a, b, c, d, m, n = (float(x) for x in params)
    if m == 0 or n == 0:
        raise StateError("chessboard parameters m and n must be nonzero")
    s = a * c / n
    t = a * d / m
    vs = [
        [m, 0, s, 0, n, 0, 0, 0, 0],
        [0, a, 0, b, 0, c, 0, 0, 0],
        [n, 0, 0, 0, -m, 0, t, 0, 0],
        [0, b, 0, -a, 0, 0, 0, d, 0],
    ]
    rho = sum(np.outer(v, np.conj(v)) for v in np.asarray(vs, dtype=np.complex128))
    return DensityMatrix(rho / np.trace(rho), (3, 3))


NAMED_STATES = ("bell", "ghz", "w", "product", "acin", "werner", "isotropic", "chessboard-ppt")


def _build_named(name: str, params: dict):
    if name == "bell":
        return bell_state(params.pop("which", "phi+"))
    if name == "ghz":
        return ghz_state(int(params.pop("L", 3)), int(params.pop("d", 2)))
    if name == "w":
        return w_state(int(params.pop("L", 3)))
    if name == "product":
        return product_state(params.pop("vectors"))
    if name == "acin":
        normalize = bool(params.pop("normalize", False))
        kw = {k: float(params.pop(k)) for k in ("l0", "l1", "l2", "l3", "l4", "psi") if k in params}
        return acin_state(AcinParams.normalized(**kw) if normalize else AcinParams(**kw))
    if name == "werner":
        return werner_state(float(params.pop("p")))
    if name == "isotropic":
        return isotropic_state(int(params.pop("d")), float(params.pop("F")))
    if name in ("chessboard-ppt", "chessboard"):
        return chessboard_state(params.pop("params", CHESSBOARD_PARAMS))
    raise StateError(f"unknown state name {name!r}; choose from {', '.join(NAMED_STATES)}")


def make_named_state(name: str, params: Mapping | None = None):
    """Build one of the catalogue states.

    ``params`` keys per name: bell(which), ghz(L, d), w(L), product(vectors),
    acin(l0..l4, psi, [normalize]), werner(p), isotropic(d, F),
    chessboard-ppt(params).
    """
    params = dict(params or {})
    try:
        state = _build_named(name, params)
    except KeyError as exc:
        raise StateError(f"missing parameter {exc.args[0]!r} for state {name!r}") from None
    if params:
        raise StateError(f"unexpected parameters for {name!r}: {sorted(params)}")
    return state


def haar_random_pure(dims, seed: int) -> PureState:
    """Haar-distributed pure state: i.i.d. complex Gaussians, normalized.

    Gaussians come from numpy's PCG64 generator seeded with ``seed``.
    """
    dims = _dims(dims)
    rng = np.random.Generator(np.random.PCG64(seed))
    n = math.prod(dims)
    g = rng.standard_normal(2 * n)
    vec = g[:n] + 1j * g[n:]
    return PureState(vec / np.linalg.norm(vec), dims)


def haar_random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


# ------------------------------------------------------------------ state files


def _pairs(values: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in values.reshape(-1)]


def state_to_dict(state) -> dict:
    if isinstance(state, PureState):
        return {"kind": "pure", "dims": list(state.dims), "amplitudes": _pairs(state.amplitudes)}
    return {"kind": "density", "dims": list(state.dims), "entries": _pairs(state.matrix)}


def serialize_state(state) -> str:
    return dumps(state_to_dict(state))


def _complex_list(raw, what: str) -> np.ndarray:
    if not isinstance(raw, list):
        raise StateError(f"{what} must be a list of [re, im] pairs")
    out = np.empty(len(raw), dtype=np.complex128)
    for i, pair in enumerate(raw):
        if (
            not isinstance(pair, (list, tuple))
            or len(pair) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
        ):
            raise StateError(f"{what}[{i}] is not a [re, im] pair of numbers: {pair!r}")
        out[i] = complex(pair[0], pair[1])
    return out


def state_from_dict(doc) -> PureState | DensityMatrix:
    if not isinstance(doc, dict):
        raise StateError("state document must be a JSON object")
    kind = doc.get("kind")
    if "dims" not in doc:
        raise StateError("state document is missing 'dims'")
    dims = _dims(doc["dims"])
    size = math.prod(dims)
    if kind == "pure":
        if "amplitudes" not in doc:
            raise StateError("pure state document is missing 'amplitudes'")
        amps = _complex_list(doc["amplitudes"], "amplitudes")
        if amps.size != size:
            raise StateError(
                f"dimension mismatch: dims {list(dims)} need {size} amplitudes, got {amps.size}"
            )
        return PureState(amps, dims)
    if kind == "density":
        if "entries" not in doc:
            raise StateError("density document is missing 'entries'")
        entries = _complex_list(doc["entries"], "entries")
        if entries.size != size * size:
            raise StateError(
                f"dimension mismatch: dims {list(dims)} need {size * size} entries, got {entries.size}"
            )
        return DensityMatrix(entries.reshape(size, size), dims).check_positive()
    raise StateError(f"'kind' must be 'pure' or 'density', got {kind!r}")


def parse_state(text: str) -> PureState | DensityMatrix:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateError(f"malformed state file: {exc}") from None
    return state_from_dict(doc)
