"""Command-line interface.

Exit codes: 0 success, 1 input/validation error, 2 verdict contradicts
``--assert-separable`` / ``--assert-entangled``.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .distill import distillability_witness, ppt_check
from .engine import DEFAULT_BUDGET, ENTANGLED, VIOLATION_TOL, CONCURRENCE_TOL, BudgetExceeded, random_trials, sweep
from .concurrence import entanglement_measure
from .engine import random_product
from .projection import Bipartition, enumerate_bipartitions
from .report import SCHEMA, ppt_to_dict, sweep_to_dict, to_csv, to_json, trials_to_dict, witness_to_dict
from .states import PureState, StateError, haar_random_pure, make_named_state, parse_state

COMMANDS = ("analyze", "sweep", "random-trials", "ppt", "distill")

STATE_SYNTAX = """\
named states (--state NAME[:ARGS]):
  bell[:phi+|phi-|psi+|psi-]       Bell state, default phi+
  ghz:LxD                          GHZ state of L parties, local dim D (ghz:3 means D=2)
  w:L                              L-qubit W state
  product:D1xD2x...[,basis=i1xi2]  computational basis product state (default all 0)
  random-product:D1xD2x...         product of local Haar states (uses --seed)
  haar:D1xD2x...                   Haar-random pure state (uses --seed)
  acin:l0=..,l1=..,...,psi=..      three-qubit canonical form; l's rescaled to unit norm
  werner:P                         P|phi+><phi+| + (1-P) I/4
  isotropic:D,F                    isotropic state of two qudits with fidelity F
  chessboard                       3x3 PPT-entangled chessboard state
"""


class UsageError(ValueError):
    pass


def _dims_arg(text: str) -> tuple[int, ...]:
    sep = "x" if "x" in text else ","
    try:
        dims = tuple(int(t) for t in text.split(sep) if t)
    except ValueError:
        raise UsageError(f"cannot parse dimensions {text!r}") from None
    if not dims or any(d < 2 for d in dims):
        raise UsageError(f"dimensions must be integers >= 2, got {text!r}")
    return dims


def parse_state_spec(spec: str, seed: int = 0):
    """Build a state from the ``name:args`` mini-syntax (see ``--help``)."""
    name, _, args = spec.partition(":")
    name = name.strip().lower()
    args = args.strip()
    try:
        if name == "bell":
            return make_named_state("bell", {"which": args or "phi+"})
        if name == "ghz":
            parts = args.split("x") if args else ["3"]
            L = int(parts[0])
            d = int(parts[1]) if len(parts) > 1 else 2
            return make_named_state("ghz", {"L": L, "d": d})
        if name == "w":
            return make_named_state("w", {"L": int(args or 3)})
        if name == "product":
            dims_text, _, rest = args.partition(",")
            dims = _dims_arg(dims_text or "2x2")
            basis = [0] * len(dims)
            if rest:
                key, _, val = rest.partition("=")
                if key.strip() != "basis":
                    raise UsageError(f"unknown product option {key!r}")
                basis = [int(t) for t in val.split("x")]
                if len(basis) != len(dims) or any(not 0 <= b < d for b, d in zip(basis, dims)):
                    raise UsageError(f"basis {val!r} does not fit dims {list(dims)}")
            vectors = [[1.0 if i == b else 0.0 for i in range(d)] for b, d in zip(basis, dims)]
            return make_named_state("product", {"vectors": vectors})
        if name == "random-product":
            return random_product(_dims_arg(args), seed)
        if name == "haar":
            return haar_random_pure(_dims_arg(args), seed)
        if name == "acin":
            params = {"normalize": True}
            for item in filter(None, (a.strip() for a in args.split(","))):
                key, eq, val = item.partition("=")
                if not eq or key not in ("l0", "l1", "l2", "l3", "l4", "psi"):
                    raise UsageError(f"bad acin argument {item!r}")
                params[key] = float(val)
            return make_named_state("acin", params)
        if name == "werner":
            return make_named_state("werner", {"p": float(args)})
        if name == "isotropic":
            d, F = args.split(",")
            return make_named_state("isotropic", {"d": int(d), "F": float(F)})
        if name in ("chessboard", "chessboard-ppt"):
            return make_named_state("chessboard-ppt")
    except (ValueError, TypeError) as exc:
        if isinstance(exc, (StateError, UsageError)):
            raise
        raise UsageError(f"cannot parse state spec {spec!r}: {exc}") from None
    raise UsageError(f"unknown state name {name!r} in {spec!r}")


@dataclass
class RunConfig:
    command: str
    state: str | None = None
    file: str | None = None
    tol: float = VIOLATION_TOL
    concurrence_tol: float = CONCURRENCE_TOL
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    out: str | None = None
    format: str = "json"
    no_timestamp: bool = False
    assert_separable: bool = False
    assert_entangled: bool = False
    dims: str | None = None
    n: int = 100
    product_fraction: float = 0.0
    cut: str | None = None
    records: bool = True

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.command == "random-trials":
            if self.dims is None:
                raise UsageError("random-trials needs --dims")
            if self.n < 1:
                raise UsageError("--n must be >= 1")
        elif (self.state is None) == (self.file is None):
            raise UsageError("give exactly one input source: --state or --file")
        if not (self.tol > 0 and self.concurrence_tol > 0):
            raise UsageError("tolerances must be positive")
        if not all(map(math.isfinite, (self.tol, self.concurrence_tol))):
            raise UsageError("tolerances must be finite")
        if self.assert_separable and self.assert_entangled:
            raise UsageError("--assert-separable and --assert-entangled are mutually exclusive")
        if self.format not in ("json", "csv"):
            raise UsageError("--format must be json or csv")


def _load_state(cfg: RunConfig):
    if cfg.file is not None:
        try:
            text = Path(cfg.file).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {cfg.file}: {exc.strerror}") from None
        return parse_state(text)
    return parse_state_spec(cfg.state, cfg.seed)


def _body(cfg: RunConfig, state) -> tuple[dict, str | None]:
    if cfg.command == "random-trials":
        stats = random_trials(_dims_arg(cfg.dims), cfg.n, cfg.seed, tol=cfg.tol,
                              product_fraction=cfg.product_fraction)
        return trials_to_dict(stats), None
    if cfg.command in ("analyze", "sweep"):
        rep = sweep(state, tol=cfg.tol, concurrence_tol=cfg.concurrence_tol, budget=cfg.budget, seed=cfg.seed)
        body = sweep_to_dict(rep, records=cfg.command == "sweep" and cfg.records)
        if cfg.command == "analyze" and isinstance(state, PureState):
            body["concurrence"] = entanglement_measure(state)
        return body, rep.verdict
    if cfg.command == "distill":
        wit = distillability_witness(state, tol=cfg.tol, budget=cfg.budget, seed=cfg.seed)
        body = witness_to_dict(wit)
        body["best_violation"] = wit.report.best_violation
        return body, ENTANGLED if wit.verdict == "Distillable" else wit.verdict
    if cfg.command == "ppt":
        cuts = [Bipartition.parse(cfg.cut, state.dims)] if cfg.cut else enumerate_bipartitions(state.dims)
        body = ppt_to_dict([ppt_check(state, c) for c in cuts])
        return body, ENTANGLED if body["verdict"] == "NPT" else body["verdict"]
    raise UsageError(f"unknown command {cfg.command!r}")


def run_command(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        cfg.validate()
        state = None if cfg.command == "random-trials" else _load_state(cfg)
        body, verdict = _body(cfg, state)
    except (UsageError, StateError, BudgetExceeded, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return 1

    doc = {"schema": SCHEMA, "version": __version__, "command": cfg.command}
    if cfg.command != "random-trials":
        doc["source"] = cfg.state if cfg.state is not None else Path(cfg.file).name
        doc["seed"] = cfg.seed
    if not cfg.no_timestamp:
        doc["generated_at"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    doc.update(body)
    text = to_json(doc) if cfg.format == "json" else to_csv(doc)
    if cfg.out:
        try:
            Path(cfg.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot write {cfg.out}: {exc.strerror}", file=stderr)
            return 1
    else:
        stdout.write(text)

    if cfg.assert_separable and verdict == ENTANGLED:
        print(f"assertion failed: state is {verdict}", file=stderr)
        return 2
    if cfg.assert_entangled and verdict != ENTANGLED:
        print(f"assertion failed: state is {verdict}", file=stderr)
        return 2
    return 0


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors: exit 1, keeping 2 for failed assertions
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="bellsweep",
        description="Entanglement detection with projected CHSH inequalities.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=STATE_SYNTAX,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, needs_state=True):
        if needs_state:
            p.add_argument("--state", help="named state, e.g. ghz:3x2 or werner:0.85")
            p.add_argument("--file", help="JSON state file")
            p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max projections per sweep")
            p.add_argument("--assert-separable", action="store_true", help="exit 2 if the state is found entangled")
            p.add_argument("--assert-entangled", action="store_true", help="exit 2 unless the state is found entangled")
        p.add_argument("--tol", type=float, default=VIOLATION_TOL, help="violation tolerance above 2")
        p.add_argument("--concurrence-tol", type=float, default=CONCURRENCE_TOL)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="report path (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--no-timestamp", action="store_true", help="omit generated_at for reproducible output")

    for name, help_text in (
        ("analyze", "verdict, best record and concurrence"),
        ("sweep", "all projection records"),
        ("distill", "single-copy distillability witness"),
        ("ppt", "partial-transpose check across cuts"),
    ):
        p = sub.add_parser(name, help=help_text, epilog=STATE_SYNTAX,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        common(p)
        if name == "ppt":
            p.add_argument("--cut", help='side A of a single cut, e.g. "0,1" (default: all cuts)')
        if name == "sweep":
            p.add_argument("--summary-only", action="store_true", help="omit the per-record list")
    p = sub.add_parser("random-trials", help="check violation <=> entanglement on random pure states")
    common(p, needs_state=False)
    p.add_argument("--dims", required=True, help="e.g. 2,2 or 2x3")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--product-fraction", type=float, default=0.0,
                   help="share of trials drawn as random product states")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command)
    for key in ("state", "file", "tol", "concurrence_tol", "seed", "budget", "out", "format",
                "no_timestamp", "assert_separable", "assert_entangled", "dims", "n",
                "product_fraction", "cut"):
        if hasattr(ns, key):
            setattr(cfg, key, getattr(ns, key))
    cfg.records = not getattr(ns, "summary_only", False)
    return cfg


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    return run_command(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
