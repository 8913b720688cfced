"""Report documents (plain dicts) and their JSON / CSV renderings.

Every float is written with 17 significant digits, so JSON and CSV carry
identical, round-trippable numbers.
"""

from __future__ import annotations

import csv
import io

from .distill import DistillWitness, PPTResult
from .engine import SweepReport, TrialStats, ViolationRecord
from .jsonfmt import dumps, format_float
from .states import state_to_dict

SCHEMA = "bellsweep-report/1"


def record_to_dict(rec: ViolationRecord) -> dict:
    cut = rec.bipartition
    return {
        "bipartition": cut.label,
        "parties_a": list(cut.parties_a),
        "parties_b": list(cut.parties_b),
        "dim_a": rec.gen_a.dim,
        "dim_b": rec.gen_b.dim,
        "alpha": rec.alpha,
        "gen_a": [rec.gen_a.j, rec.gen_a.k],
        "beta": rec.beta,
        "gen_b": [rec.gen_b.j, rec.gen_b.k],
        "weight": rec.weight,
        "trace": rec.trace,
        "concurrence": rec.concurrence,
        "max_violation": rec.max_violation,
        "degenerate": rec.degenerate,
        "settings": None if rec.settings is None else rec.settings.as_dict(),
    }


def sweep_to_dict(rep: SweepReport, records: bool = True) -> dict:
    best = rep.best_record
    doc = {
        "state": {"kind": rep.kind, "dims": list(rep.dims)},
        "tolerance": rep.tolerance,
        "concurrence_tolerance": rep.concurrence_tolerance,
        "verdict": rep.verdict,
        "best_violation": rep.best_violation,
        "max_concurrence": rep.max_concurrence,
        "record_count": len(rep.records),
        "best": None if best is None else record_to_dict(best),
    }
    if records:
        doc["records"] = [record_to_dict(r) for r in rep.records]
    return doc


def witness_to_dict(w: DistillWitness) -> dict:
    doc = {"verdict": w.verdict}
    if w.projectors is None:
        doc["witness"] = None
        return doc
    doc["witness"] = {
        "bipartition": w.record.bipartition.label,
        "gen_a": [w.projectors.gen_a.j, w.projectors.gen_a.k],
        "gen_b": [w.projectors.gen_b.j, w.projectors.gen_b.k],
        "violation": w.record.max_violation,
        "weight": w.weight,
        "probability": w.probability,
        "output_concurrence": w.output_concurrence,
        "output_min_pt_eigenvalue": w.output_min_pt_eigenvalue,
        "P": matrix_to_dict(w.projectors.P),
        "Q": matrix_to_dict(w.projectors.Q),
        "output": state_to_dict(w.output),
    }
    return doc


def matrix_to_dict(m) -> dict:
    return {
        "shape": list(m.shape),
        "entries": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }


def ppt_to_dict(results: list[PPTResult]) -> dict:
    return {
        "cuts": [
            {"bipartition": r.bipartition.label, "min_eigenvalue": r.min_eigenvalue, "is_ppt": r.is_ppt}
            for r in results
        ],
        "verdict": "PPT" if all(r.is_ppt for r in results) else "NPT",
    }


def trials_to_dict(t: TrialStats) -> dict:
    return {
        "dims": list(t.dims),
        "n": t.n,
        "seed": t.seed,
        "tolerance": t.tolerance,
        "entangled_threshold": t.entangled_threshold,
        "separable_threshold": t.separable_threshold,
        "product_fraction": t.product_fraction,
        "counts": {
            "entangled_violating": t.entangled_violating,
            "entangled_not_violating": t.entangled_not_violating,
            "separable_violating": t.separable_violating,
            "separable_quiet": t.separable_quiet,
            "ambiguous": t.ambiguous,
        },
        "counterexamples": t.counterexamples,
        "min_entangled_violation": t.min_entangled_violation,
        "max_separable_violation": t.max_separable_violation,
    }


def flatten(doc, prefix: str = "") -> list[tuple[str, object]]:
    rows = []
    if isinstance(doc, dict):
        for k, v in doc.items():
            rows.extend(flatten(v, f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(doc, (list, tuple)):
        for i, v in enumerate(doc):
            rows.extend(flatten(v, f"{prefix}.{i}" if prefix else str(i)))
    else:
        rows.append((prefix, doc))
    return rows


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def to_json(doc: dict) -> str:
    return dumps(doc)


def to_csv(doc: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    for key, value in flatten(doc):
        writer.writerow([key, _cell(value)])
    return buf.getvalue()
