"""Single-copy distillability witness and the PPT check.

A violating record ``(cut, L_A, L_B)`` yields local maps ``P = A L_A`` and
``Q = B L_B`` into two-dimensional spaces, where ``A = |0><j| + |1><k|``
for ``L_A = |j><k| - |k><j|`` (likewise ``B``).  ``(P x Q) rho (P x Q)^H``
is then an entangled two-qubit state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .concurrence import wootters_concurrence
from .engine import ENTANGLED, VIOLATION_TOL, SweepReport, ViolationRecord, sweep
from .generators import Generator
from .linalg import eigvalsh, partial_transpose
from .projection import Bipartition, split_state
from .states import DensityMatrix, as_density

DISTILLABLE = "Distillable"
INCONCLUSIVE = "Inconclusive"
PPT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DistillProjectors:
    P: np.ndarray
    Q: np.ndarray
    gen_a: Generator
    gen_b: Generator
    bipartition: Bipartition | None = None


def _local_map(g: Generator) -> np.ndarray:
    iso = np.zeros((2, g.dim), dtype=np.complex128)
    iso[0, g.j] = 1.0
    iso[1, g.k] = 1.0
    return iso @ g.matrix()


def build_projectors(gA: Generator, gB: Generator, bipartition: Bipartition | None = None) -> DistillProjectors:
    return DistillProjectors(_local_map(gA), _local_map(gB), gA, gB, bipartition)


def apply_projectors(rho, proj: DistillProjectors):
    """Unnormalized two-qubit output of ``(P x Q)`` on a bipartite state."""
    m = as_density(rho).matrix
    PQ = np.kron(proj.P, proj.Q)
    return PQ @ m @ PQ.conj().T


def min_pt_eigenvalue(two_qubit) -> float:
    m = np.asarray(getattr(two_qubit, "matrix", two_qubit))
    return float(eigvalsh(partial_transpose(m, (2, 2), [1]))[0])


@dataclass(frozen=True)
class DistillWitness:
    verdict: str
    record: ViolationRecord | None
    projectors: DistillProjectors | None = None
    output: DensityMatrix | None = None
    weight: float = 0.0
    probability: float = 0.0
    output_concurrence: float = 0.0
    output_min_pt_eigenvalue: float = 0.0
    report: SweepReport | None = field(default=None, repr=False)


def distillability_witness(rho, tol: float = VIOLATION_TOL, **kwargs) -> DistillWitness:
    """Distillable if some projected CHSH inequality is violated.

    The returned output is the normalized two-qubit state; ``weight`` is the
    Frobenius norm and ``probability`` the trace of the unnormalized one.
    A non-violating state is Inconclusive: the criterion is only sufficient.
    """
    rep = sweep(rho, tol=tol, settings=True, **kwargs)
    rec = rep.best_record
    if rep.verdict != ENTANGLED or rec is None:
        return DistillWitness(INCONCLUSIVE, rec, report=rep)
    proj = build_projectors(rec.gen_a, rec.gen_b, rec.bipartition)
    raw = apply_projectors(split_state(as_density(rho), rec.bipartition), proj)
    prob = float(np.trace(raw).real)
    out = DensityMatrix(raw / prob, (2, 2))
    return DistillWitness(
        DISTILLABLE, rec, proj, out,
        weight=float(np.linalg.norm(raw)),
        probability=prob,
        output_concurrence=wootters_concurrence(out),
        output_min_pt_eigenvalue=min_pt_eigenvalue(out),
        report=rep,
    )


@dataclass(frozen=True)
class PPTResult:
    bipartition: Bipartition
    min_eigenvalue: float
    is_ppt: bool


def ppt_check(rho, cut: Bipartition | None = None) -> PPTResult:
    """Smallest eigenvalue of the partial transpose on side B of ``cut``."""
    rho = as_density(rho)
    if cut is None:
        if rho.nparties != 2:
            raise ValueError("a bipartition is required for states with more than two parties")
        cut = Bipartition((0,), (1,), rho.dims)
    cut = cut.with_dims(rho.dims)
    lam = float(eigvalsh(partial_transpose(rho.matrix, rho.dims, cut.parties_b))[0])
    return PPTResult(cut, lam, lam >= -PPT_TOL)
