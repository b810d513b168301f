"""``ringext`` command-line front end.

Reports are JSON by default; ``--format text`` renders the same content as
indented key/value lines.  Exit codes: 0 success, 1 criterion failure under
``--strict``, 2 input or budget errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .ideals import IdealExplosion, all_ideals, annihilator, classify_ring, socle
from .oracle import BudgetExceeded, CounterexampleError, DEFAULT_BUDGET, DEFAULT_ORACLE_BUDGET, NotAnInjectiveMap
from .oracle import build_counterexample, oracle_extension_property
from .orthogonality import (
    KINDS, ORDERING, NotPrincipalIdealRing, build_matrix, criterion, det_factorized, det_poly_in_w0,
    diagonal_factors, tq_is_identity, triangularity,
)
from .rings import FiniteRing, RingSpecError, TableRing, build_ring, validate_table_ring
from .weights import Weight, WeightError, builtin_weight, format_rational, symmetry_groups, weight_from_json

BUILTIN_WEIGHTS = ("hamming", "homogeneous", "lee", "rank")
POLY_DIM_LIMIT = 64


class InputError(Exception):
    pass


class _Timer:
    def __init__(self):
        self.timings: dict[str, float] = {}

    def __call__(self, name: str, fn, *args, **kwargs):
        start = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        finally:
            self.timings[name] = round(time.perf_counter() - start, 4)


# ---------------------------------------------------------------------------
# inputs


def load_weight(ring: FiniteRing, arg: str | None) -> Weight:
    """A weight from a JSON file or a builtin name such as ``hamming`` or ``rank:1,3``."""
    if arg is None:
        raise InputError("this command needs --weight")
    name, _, params = arg.partition(":")
    if name in BUILTIN_WEIGHTS and not Path(arg).is_file():
        if name == "homogeneous":
            return builtin_weight(ring, name, gamma=params or None)
        if name == "rank":
            return builtin_weight(ring, name, ranks=params.split(",") if params else None)
        if params:
            raise InputError(f"weight {name!r} takes no parameters")
        return builtin_weight(ring, name)
    path = Path(arg)
    if not path.is_file():
        raise InputError(f"weight file {arg!r} not found (builtins: {', '.join(BUILTIN_WEIGHTS)})")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"weight file {arg!r} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InputError(f"weight file {arg!r} must hold a JSON object")
    return weight_from_json(ring, data)


def ring_json(ring: FiniteRing) -> dict:
    return {"spec": ring.spec, "order": ring.order, "units": int(ring.units.size)}


def weight_json(ring: FiniteRing, w: Weight) -> dict:
    out = w.to_json()
    out["bi_invariant"] = True
    out["symmetry_groups"] = {k: len(v) for k, v in symmetry_groups(ring, w).to_json(ring).items()}
    if w.params:
        out["params"] = w.params
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args, ring: FiniteRing, timer: _Timer) -> tuple[dict, bool]:
    add_t, mul_t = ring.tables()
    report = timer("validate", validate_table_ring, add_t, mul_t)
    out = {"ring": ring_json(ring), "validation": report.to_json()}
    if isinstance(ring, TableRing):
        out["validation"]["zero_index_after_relabel"] = 0
    if args.weight:
        w = load_weight(ring, args.weight)
        out["weight"] = weight_json(ring, w)
    return out, report.ok


def _ideal_rows(ring: FiniteRing, side: str, every: bool) -> dict:
    lattice = all_ideals(ring, side)
    soc = socle(ring, side)
    rows = []
    for I in lattice:
        if not (every or I.principal):
            continue
        rows.append({
            "id": I.id,
            "name": I.name(),
            "size": I.size,
            "principal": I.principal,
            "generators": [ring.label(x) for x in ([I.generator] if I.principal else I.spanning)],
            "mobius_from_zero": lattice.mobius(0, I.id),
            "annihilator": annihilator(I).name(),
            "in_socle": bool(lattice.leq[I.id, soc.id]),
        })
    return {
        "ordering": ORDERING,
        "ideals": rows,
        "hasse": [[a, b] for a, b in lattice.covers()],
        "socle": soc.name(),
    }


def cmd_ideals(args, ring: FiniteRing, timer: _Timer) -> tuple[dict, bool]:
    sides = ("left", "right") if args.side == "both" else (args.side,)
    out = {"ring": ring_json(ring)}
    for side in sides:
        out[side] = timer(f"{side}_lattice", _ideal_rows, ring, side, args.all)
    out["classification"] = classify_ring(ring).to_json()
    return out, True


def cmd_matrix(args, ring: FiniteRing, timer: _Timer) -> tuple[dict, bool]:
    which = args.which
    w = load_weight(ring, args.weight) if which in ("W0", "W", "WQ") or args.weight else None
    m = timer("build", build_matrix, ring, w, which, args.w0)
    out = {"ring": ring_json(ring), "matrix": m.to_json(), "square": m.square}
    if m.square and (args.det or which in ("Q", "T")):
        out["det"] = format_rational(timer("det", m.det))
    return out, True


def _verdict(ring: FiniteRing, w: Weight, reduce: bool, timer: _Timer) -> tuple[dict, bool]:
    try:
        v = timer("criterion", criterion, ring, w, reduce)
    except NotPrincipalIdealRing as exc:
        return {
            "status": "refused",
            "reason": str(exc),
            "det_W0": format_rational(exc.det_w0),
            "W0_invertible": exc.det_w0 != 0,
        }, exc.det_w0 != 0
    out = {"status": "decided"}
    out.update(v.to_json())
    return out, v.passes


def cmd_criterion(args, ring: FiniteRing, timer: _Timer) -> tuple[dict, bool]:
    w = load_weight(ring, args.weight)
    verdict, ok = _verdict(ring, w, not args.no_socle_reduction, timer)
    return {"ring": ring_json(ring), "weight": weight_json(ring, w), "criterion": verdict}, ok


def cmd_analyze(args, ring: FiniteRing, timer: _Timer) -> tuple[dict, bool]:
    w = load_weight(ring, args.weight)
    cls = timer("classify", classify_ring, ring)
    verdict, ok = _verdict(ring, w, not args.no_socle_reduction, timer)
    w0 = timer("W0", build_matrix, ring, w, "W0")
    dets = {"W0_shape": list(w0.shape)}
    if w0.square:
        d0 = timer("det_W0", w0.det)
        dets["det_W0"] = format_rational(d0)
        singular = d0 == 0
    else:
        singular = True
    q = timer("Q", build_matrix, ring, None, "Q")
    dets["det_Q"] = format_rational(q.det()) if q.square else None
    out = {
        "ring": ring_json(ring),
        "classification": cls.to_json(),
        "weight": weight_json(ring, w),
        "criterion": verdict,
        "determinants": dets,
    }
    if cls.is_pir:
        out["factors_full"] = {
            f.ideal: format_rational(f.full) for f in timer("factors", diagonal_factors, ring, w)
        }
        dets["det_via_factorization"] = format_rational(det_factorized(ring, w))
        dets["TQ_identity"] = timer("TQ", tq_is_identity, ring)
        dets["WQ"] = timer("WQ", triangularity, ring, w).to_json()
        if len(q.rows) <= POLY_DIM_LIMIT:
            dets["det_W_in_w0"] = timer("det_poly", det_poly_in_w0, ring, w).to_json()
    if args.matrices:
        out["matrices"] = {k: build_matrix(ring, w, k).to_json() for k in KINDS}
    if singular and w0.square:
        try:
            out["counterexample"] = timer("counterexample", build_counterexample, ring, w,
                                          budget=args.search_budget).to_json()
        except BudgetExceeded as exc:
            out["counterexample"] = {"error": str(exc)}
    return out, ok


def cmd_counterexample(args, ring: FiniteRing, timer: _Timer) -> tuple[dict, bool]:
    w = load_weight(ring, args.weight)
    pair = timer("counterexample", build_counterexample, ring, w, budget=args.search_budget)
    return {"ring": ring_json(ring), "weight": weight_json(ring, w), "counterexample": pair.to_json()}, True


def cmd_oracle(args, ring: FiniteRing, timer: _Timer) -> tuple[dict, bool]:
    w = load_weight(ring, args.weight)
    report = timer("oracle", oracle_extension_property, ring, w, args.max_len,
                   args.search_budget, not args.all)
    return {"ring": ring_json(ring), "weight": weight_json(ring, w), "oracle": report.to_json()}, bool(report.holds)


COMMANDS = {
    "analyze": cmd_analyze,
    "ideals": cmd_ideals,
    "matrix": cmd_matrix,
    "criterion": cmd_criterion,
    "counterexample": cmd_counterexample,
    "oracle": cmd_oracle,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ringext", description="Weights on finite rings and the extension criterion.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", required=True, help='ring spec, e.g. "Mat(2,GF(3))" or "Table(file.json)"')
    common.add_argument("--weight", help="weight JSON file or builtin (hamming, homogeneous[:g], lee, rank[:v1,..])")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--strict", action="store_true", help="exit 1 when the criterion fails")
    common.add_argument("--max-order", type=int, default=None, help="ring order cap (env RINGEXT_MAX_ORDER)")
    common.add_argument("--search-budget", type=int, default=None, help="elementary-check budget for searches")
    common.add_argument("--no-timings", action="store_true", help="omit the timings field")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="classification, criterion and determinants")
    p.add_argument("--no-socle-reduction", action="store_true")
    p.add_argument("--matrices", action="store_true", help="include all matrices")

    p = sub.add_parser("ideals", parents=[common], help="ideal lattices with Möbius values")
    p.add_argument("--side", choices=("left", "right", "both"), default="both")
    p.add_argument("--all", action="store_true", help="list non-principal ideals too")

    p = sub.add_parser("matrix", parents=[common], help="one orthogonality matrix")
    p.add_argument("--which", choices=KINDS, default="W0")
    p.add_argument("--w0", default=None, help="value at zero for W and WQ, as p/q")
    p.add_argument("--det", action="store_true", help="also report the determinant")

    p = sub.add_parser("criterion", parents=[common], help="decide the extension criterion")
    p.add_argument("--no-socle-reduction", action="store_true")

    sub.add_parser("counterexample", parents=[common], help="code pair from a null vector of W0")

    p = sub.add_parser("oracle", parents=[common], help="exhaustive check on short codes")
    p.add_argument("--max-len", type=int, default=2)
    p.add_argument("--all", action="store_true", help="count every failure instead of stopping at the first")

    sub.add_parser("validate", parents=[common], help="check ring axioms (and a weight, if given)")
    return parser


def render_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat_list(v):
                lines.append(f"{pad}-")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(f"{pad}{_scalar(obj)}")
    return "\n".join(lines)


def _flat_list(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) or _flat_list(x) for x in v)


def _scalar(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if v is None:
        return "-"
    return str(v)


def _emit(out: dict, fmt: str, stream) -> None:
    if fmt == "text":
        stream.write(render_text(out) + "\n")
    else:
        stream.write(json.dumps(out, indent=2, default=_json_default) + "\n")


def _json_default(x):
    if isinstance(x, Fraction):
        return format_rational(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.search_budget is None:
        args.search_budget = DEFAULT_ORACLE_BUDGET if args.command == "oracle" else DEFAULT_BUDGET
    timer = _Timer()
    out: dict = {"command": args.command}
    try:
        ring = timer("ring", build_ring, args.ring, args.max_order)
        body, ok = COMMANDS[args.command](args, ring, timer)
    except (RingSpecError, WeightError, InputError, NotAnInjectiveMap, CounterexampleError,
            NotPrincipalIdealRing, IdealExplosion, ValueError) as exc:
        print(f"ringext: error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"ringext: error: {exc}", file=sys.stderr)
        if exc.report is not None:
            out["partial"] = exc.report.to_json()
            if args.no_timings:
                out["partial"].pop("seconds", None)
            _emit(out, args.format, sys.stdout)
        return 2
    out.update(body)
    if args.no_timings:
        out.get("oracle", {}).pop("seconds", None)
    else:
        out["timings"] = timer.timings
    _emit(out, args.format, sys.stdout)
    return 1 if args.strict and not ok else 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
