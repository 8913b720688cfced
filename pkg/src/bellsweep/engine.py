"""Sweep of the projected CHSH family over every bipartition and generator
pair, with the resulting entanglement verdict and a random-state harness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .chsh import correlation_matrix, horodecki_max_violation, seesaw_optimize
from .concurrence import entanglement_measure, wootters_concurrence
from .generators import Generator, MeasurementSetting, enumerate_generators
from .projection import (
    DEGENERATE_WEIGHT,
    Bipartition,
    enumerate_bipartitions,
    projected_blocks,
    projected_vectors,
    source_indices,
    split_state,
)
from .states import PureState, haar_random_pure, product_state

VIOLATION_TOL = 1e-9
CONCURRENCE_TOL = 1e-7
DEFAULT_BUDGET = 10**7
CHUNK = 1 << 15

SEPARABLE = "Separable"
ENTANGLED = "Entangled"
INCONCLUSIVE = "Inconclusive"


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class ViolationRecord:
    bipartition: Bipartition
    gen_a: Generator
    gen_b: Generator
    weight: float
    trace: float
    concurrence: float
    max_violation: float
    degenerate: bool
    settings: MeasurementSetting | None = None

    @property
    def alpha(self) -> int:
        return self.gen_a.index

    @property
    def beta(self) -> int:
        return self.gen_b.index

    @property
    def key(self) -> tuple:
        return (self.bipartition.parties_a, self.gen_a.j, self.gen_a.k, self.gen_b.j, self.gen_b.k)


@dataclass(frozen=True)
class SweepReport:
    kind: str
    dims: tuple[int, ...]
    records: list
    best: int | None
    verdict: str
    tolerance: float
    concurrence_tolerance: float
    compacts: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def best_record(self) -> ViolationRecord | None:
        return None if self.best is None else self.records[self.best]

    @property
    def best_violation(self) -> float:
        rec = self.best_record
        return 0.0 if rec is None else rec.max_violation

    @property
    def max_concurrence(self) -> float:
        return max((r.concurrence for r in self.records), default=0.0)

    def find(self, parties_a, gen_a: tuple[int, int], gen_b: tuple[int, int]) -> ViolationRecord:
        key = (tuple(parties_a), *gen_a, *gen_b)
        for rec in self.records:
            if rec.key == key:
                return rec
        raise KeyError(f"no record for cut {parties_a}, generators {gen_a} x {gen_b}")

    def compact(self, index: int) -> np.ndarray:
        """Normalized 4x4 projected state of record ``index``."""
        return self.compacts[index]


def projection_count(dims: Sequence[int], bipartitions=None) -> int:
    cuts = bipartitions or enumerate_bipartitions(dims)
    total = 0
    for cut in cuts:
        cut = cut.with_dims(dims)
        da, db = cut.dim_a, cut.dim_b
        total += (da * (da - 1) // 2) * (db * (db - 1) // 2)
    return total


def _cut_records(state, cut: Bipartition):
    """Weights, traces, concurrences, violations and compacts for one cut."""
    split = split_state(state, cut)
    da, db = split.dims
    src_all = source_indices(da, db)
    pure = isinstance(split, PureState)
    out = {k: [] for k in ("weight", "trace", "conc", "viol", "compact")}
    for start in range(0, len(src_all), CHUNK):
        src = src_all[start : start + CHUNK]
        if pure:
            v = projected_vectors(split.amplitudes.reshape(da, db), src)
            w = np.sum(np.abs(v) ** 2, axis=1)
            tr = w
            ok = w >= DEGENERATE_WEIGHT
            safe = np.where(ok, w, 1.0)
            conc = np.where(ok, 2.0 * np.abs(v[:, 0] * v[:, 3] - v[:, 1] * v[:, 2]) / safe, 0.0)
            compact = np.einsum("na,nb->nab", v, v.conj()) / safe[:, None, None]
        else:
            blocks = projected_blocks(split.matrix, src)
            w = np.sqrt(np.sum(np.abs(blocks) ** 2, axis=(1, 2)))
            tr = np.trace(blocks, axis1=1, axis2=2).real
            ok = w >= DEGENERATE_WEIGHT
            compact = blocks / np.where(ok, tr, 1.0)[:, None, None]
            conc = np.zeros(len(src))
            if np.any(ok):
                conc[ok] = wootters_concurrence(compact[ok])
        viol = np.zeros(len(src))
        if np.any(ok):
            viol[ok] = horodecki_max_violation(correlation_matrix(compact[ok]))
        for key, arr in (("weight", w), ("trace", tr), ("conc", conc), ("viol", viol)):
            out[key].append(np.where(ok, arr, 0.0))
        out["compact"].append(compact)
    return {k: np.concatenate(v) for k, v in out.items()}, (da, db)


def sweep(
    state,
    tol: float = VIOLATION_TOL,
    concurrence_tol: float = CONCURRENCE_TOL,
    budget: int = DEFAULT_BUDGET,
    bipartitions: Sequence[Bipartition] | None = None,
    settings: bool = True,
    seed: int = 0,
) -> SweepReport:
    """Evaluate the maximal projected CHSH violation for every
    ``(bipartition, alpha, beta)``.

    Violations are the closed-form maxima on each normalized projection;
    explicit settings are optimized only for the best record (``settings``).
    Pure states get a Separable/Entangled/Inconclusive verdict, mixed states
    only Entangled/Inconclusive.
    """
    if state.nparties < 2:
        raise ValueError("a sweep needs at least two parties")
    dims = state.dims
    cuts = [c.with_dims(dims) for c in (bipartitions or enumerate_bipartitions(dims))]
    count = projection_count(dims, cuts)
    if count > budget:
        raise BudgetExceeded(f"sweep needs {count} projections, budget is {budget}")

    records: list[ViolationRecord] = []
    compacts: dict[int, np.ndarray] = {}
    for cut in cuts:
        data, (da, db) = _cut_records(state, cut)
        gens_a, gens_b = enumerate_generators(da), enumerate_generators(db)
        nb = len(gens_b)
        for r in range(len(data["viol"])):
            ia, ib = divmod(r, nb)
            degenerate = bool(data["weight"][r] < DEGENERATE_WEIGHT)
            if not degenerate:
                compacts[len(records)] = data["compact"][r]
            records.append(
                ViolationRecord(
                    cut, gens_a[ia], gens_b[ib],
                    float(data["weight"][r]), float(data["trace"][r]),
                    float(data["conc"][r]), float(data["viol"][r]), degenerate,
                )
            )

    live = [i for i, r in enumerate(records) if not r.degenerate]
    best = max(live, key=lambda i: records[i].max_violation) if live else None
    best_violation = records[best].max_violation if best is not None else 0.0
    pure = isinstance(state, PureState)
    if best_violation > 2.0 + tol:
        verdict = ENTANGLED
    elif pure and max((records[i].concurrence for i in live), default=0.0) <= concurrence_tol:
        verdict = SEPARABLE
    else:
        verdict = INCONCLUSIVE

    if settings and best is not None:
        found = seesaw_optimize(compacts[best], seed=seed)
        records[best] = replace(records[best], settings=found.settings)
    return SweepReport(
        "pure" if pure else "density", dims, records, best, verdict, tol, concurrence_tol, compacts
    )


@dataclass(frozen=True)
class Verdict:
    verdict: str
    witness: ViolationRecord | None
    best_violation: float
    report: SweepReport = field(repr=False)


def entanglement_verdict(psi: PureState, tol: float = VIOLATION_TOL, **kwargs) -> Verdict:
    """Gisin-type decision for a pure state, with the optimal record as witness."""
    if not isinstance(psi, PureState):
        raise TypeError("entanglement_verdict expects a pure state")
    rep = sweep(psi, tol=tol, settings=True, **kwargs)
    return Verdict(rep.verdict, rep.best_record, rep.best_violation, rep)


@dataclass(frozen=True)
class TrialStats:
    dims: tuple[int, ...]
    n: int
    seed: int
    tolerance: float
    entangled_threshold: float
    separable_threshold: float
    product_fraction: float
    entangled_violating: int = 0
    entangled_not_violating: int = 0
    separable_violating: int = 0
    separable_quiet: int = 0
    ambiguous: int = 0
    min_entangled_violation: float | None = None
    max_separable_violation: float | None = None

    @property
    def counterexamples(self) -> int:
        return self.entangled_not_violating + self.separable_violating


def trial_seeds(seed: int, n: int) -> list[int]:
    return [int(x) for x in np.random.SeedSequence(seed).generate_state(n, dtype=np.uint64)]


def random_product(dims: Sequence[int], seed: int) -> PureState:
    rng = np.random.Generator(np.random.PCG64(seed))
    return product_state([rng.standard_normal(d) + 1j * rng.standard_normal(d) for d in dims])


def random_trials(
    dims: Sequence[int],
    n: int,
    seed: int,
    tol: float = VIOLATION_TOL,
    entangled_threshold: float = 1e-6,
    separable_threshold: float = 1e-9,
    product_fraction: float = 0.0,
) -> TrialStats:
    """Check violation <=> entanglement on ``n`` random pure states.

    Trial ``i`` draws a Haar state (or, for the first ``product_fraction``
    share of trials, a product of local Haar states) from its own child seed.
    A state counts as entangled when its concurrence exceeds
    ``entangled_threshold``, separable when at most ``separable_threshold``;
    anything in between is tallied as ambiguous.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= product_fraction <= 1.0:
        raise ValueError("product_fraction must lie in [0, 1]")
    dims = tuple(int(d) for d in dims)
    n_product = int(round(product_fraction * n))
    counts = dict.fromkeys(
        ("entangled_violating", "entangled_not_violating", "separable_violating", "separable_quiet", "ambiguous"), 0
    )
    min_ent = math.inf
    max_sep = -math.inf
    for i, s in enumerate(trial_seeds(seed, n)):
        psi = random_product(dims, s) if i < n_product else haar_random_pure(dims, s)
        c = entanglement_measure(psi)
        v = sweep(psi, tol=tol, settings=False).best_violation
        violating = v > 2.0 + tol
        if c > entangled_threshold:
            counts["entangled_violating" if violating else "entangled_not_violating"] += 1
            min_ent = min(min_ent, v)
        elif c <= separable_threshold:
            counts["separable_violating" if violating else "separable_quiet"] += 1
            max_sep = max(max_sep, v)
        else:
            counts["ambiguous"] += 1
    return TrialStats(
        dims, n, seed, tol, entangled_threshold, separable_threshold, product_fraction, **counts,
        min_entangled_violation=None if min_ent == math.inf else min_ent,
        max_separable_violation=None if max_sep == -math.inf else max_sep,
    )
