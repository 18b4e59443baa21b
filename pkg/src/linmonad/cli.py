"""Command-line front end.

Exit codes: 0 ok, 1 internal error or contradiction, 2 bad user input,
3 regression mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources

from .chern import (
    chern_of_monad,
    chi_of_kclass,
    chi_tensor_display_chain,
    kclass_of_monad,
    kclass_tensor,
    slope,
)
from .cohomology import Contradiction, derive_instanton_table, derive_special_table, closed_form_vanishing
from .lab.explicit import (
    AlphaH0NotInjective,
    ExplicitMonad,
    SolutionSpaceTooSmall,
    h0_graded,
    h1_dual_coker,
    instanton_monad,
    random_monad,
    restrict_left,
)
from .lab.linalg import QQ, field_from_token
from .lab.scan import EnumerationBudgetExceeded, degeneration_scan
from .monads import MonadError, MonadExtension, MonadSpec, Twisted, charge_and_kind, dualize, existence_check, linear
from .stability import verdict
from .varieties import parse_variety_token, projective_space

EXIT_OK, EXIT_INTERNAL, EXIT_USER, EXIT_REGRESSION = 0, 1, 2, 3


class UserError(Exception):
    pass


class RegressionMismatch(Exception):
    def __init__(self, diffs: list[str], bundle: dict):
        super().__init__("; ".join(diffs))
        self.diffs = diffs
        self.bundle = bundle


# -- input -------------------------------------------------------------------

def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UserError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UserError(f"{path} is not valid JSON: {exc}") from None


def _parse_monad_obj(obj: dict):
    """Monad spec JSON, {"twist": k, "monad": ...} or {"extension": {"sub": ..., "quot": ...}}."""
    if "extension" in obj:
        ext = obj["extension"]
        return MonadExtension(MonadSpec.from_json(ext["sub"]), MonadSpec.from_json(ext["quot"]))
    if "twist" in obj:
        return Twisted(_parse_monad_obj(obj["monad"]), int(obj["twist"]))
    return MonadSpec.from_json(obj)


def _monad_from_args(args) -> tuple[object, dict]:
    inline = any(getattr(args, x, None) is not None for x in ("a", "b", "c"))
    path = getattr(args, "monad", None)
    if inline and path:
        raise UserError("give either --a/--b/--c or --monad, not both")
    if path:
        obj = _load_json(path)
        return _parse_monad_obj(obj), obj
    if not inline:
        raise UserError("a monad is required: --a A --b B --c C [--variety TOKEN] or --monad FILE")
    if None in (args.a, args.b, args.c):
        raise UserError("--a, --b and --c must all be given")
    v = parse_variety_token(args.variety)
    shape = getattr(args, "shape", "M1") or "M1"
    m = MonadSpec(args.a, args.b, args.c, v, shape, getattr(args, "a2", 0) or 0)
    return m, m.to_json()


def _plain(m) -> MonadSpec:
    if isinstance(m, Twisted):
        return _plain(m.inner)
    if isinstance(m, MonadExtension):
        return m.total
    return m


def _window(text: str | None, n: int) -> tuple[int, int] | None:
    if text is None:
        return None
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise UserError(f"window must look like LO:HI, got {text!r}") from None
    if lo > hi:
        raise UserError(f"empty window {text}")
    return lo, hi


# -- output ------------------------------------------------------------------

def _emit(obj, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n")
    elif fmt == "csv":
        if isinstance(obj, str):
            out.write(obj)
        else:
            import csv

            w = csv.writer(out, lineterminator="\n")
            w.writerow(["key", "value"])
            for k, v in _flatten(obj):
                w.writerow([k, v])
    else:
        if isinstance(obj, str):
            out.write(obj)
            return
        for k, v in _flatten(obj):
            out.write(f"{k}: {v}\n")


def _json_default(x):
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError(f"not serializable: {type(x).__name__}")


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj, key=str):
            yield from _flatten(obj[k], f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and all(isinstance(x, (dict, list)) for x in obj):
        for i, x in enumerate(obj):
            yield from _flatten(x, f"{prefix}{i}.")
    else:
        val = json.dumps(obj, default=_json_default) if isinstance(obj, (list, dict)) else obj
        yield prefix.rstrip("."), val


# -- commands ----------------------------------------------------------------

def cmd_analyze(args, out) -> int:
    m, _ = _monad_from_args(args)
    m = _plain(m)
    info = charge_and_kind(m)
    report = {"monad": m.label(), **info}
    if m.is_linear:
        cs = chern_of_monad(m.a, m.b, m.c, m.variety)
        report["chern"] = str(cs)
        report["chern_coefficients"] = cs.to_json()
        report["slope"] = str(slope(m.c1, m.rank, m.variety))
        ex = existence_check(m)
        report["existence"] = {"status": ex.status, "justification": ex.justification}
    _emit(report, args.format, out)
    return EXIT_OK


def cmd_chern(args, out) -> int:
    m, _ = _monad_from_args(args)
    m = _plain(m)
    if not m.is_linear:
        raise UserError("Chern series are computed for linear monads only")
    v = m.variety
    cs = chern_of_monad(m.a, m.b, m.c, v)
    k = kclass_of_monad(m.a, m.b, m.c, v.l)
    report = {
        "monad": m.label(),
        "chern": str(cs),
        "chern_coefficients": cs.to_json(),
        "kclass": {str(t): mult for t, mult in k.terms},
        "chi": chi_of_kclass(k, v),
        "chi_tensor_square": {
            "display_chain": chi_tensor_display_chain(m.a, m.b, m.c, v),
            "kclass": chi_of_kclass(kclass_tensor(k, k), v),
        },
    }
    _emit(report, args.format, out)
    return EXIT_OK


def cmd_table(args, out) -> int:
    m, obj = _monad_from_args(args)
    m = _plain(m)
    lf = bool(args.locally_free or obj.get("locally_free", False))
    window = _window(args.window, m.n)
    if m.is_linear:
        d = derive_instanton_table(m, locally_free=lf, window=window)
    else:
        d = derive_special_table(m, locally_free=lf, window=window)
    if args.node not in d.tables:
        raise UserError(f"unknown node {args.node!r}; choose from {', '.join(sorted(d.tables))}")
    t = d.table(args.node)
    asserted = closed_form_vanishing(m, t.window, lf).get(args.node, set())
    if args.format == "csv":
        lines = t.to_csv().splitlines()
        rows = [lines[0] + ",asserted"]
        for line in lines[1:]:
            q, k = (int(x) for x in line.split(",")[:2])
            rows.append(line + f",{int((q, k) in asserted)}")
        _emit("\n".join(rows) + "\n", "csv", out)
    elif args.format == "json":
        obj = t.to_json()
        obj["asserted"] = [[q, k] for q, k in sorted(asserted, key=lambda c: (c[1], c[0]))]
        _emit(obj, "json", out)
    else:
        lines = [f"{m.label()}: h^q({args.node}(k)), window {t.window[0]}..{t.window[1]}"]
        for k in t.twists():
            cells = []
            for q in range(t.n + 1):
                s = str(t.get(q, k))
                cells.append(s + ("*" if (q, k) in asserted else ""))
            lines.append(f"k={k:>4}: " + "  ".join(f"{c:>10}" for c in cells))
        lines.append("* = vanishing asserted by the closed-form ranges")
        _emit("\n".join(lines) + "\n", "text", out)
    return EXIT_OK


def cmd_stability(args, out) -> int:
    m, obj = _monad_from_args(args)
    lf = bool(args.locally_free or obj.get("locally_free", False))
    tf = bool(args.torsion_free or obj.get("torsion_free", False))
    c1 = args.c1 if args.c1 is not None else obj.get("c1")
    v = verdict(m, locally_free=lf, torsion_free=tf, c1=c1, reflexive=bool(args.reflexive))
    _emit(v.to_json(), args.format, out)
    return EXIT_OK


def load_regressions() -> dict:
    text = resources.files("linmonad").joinpath("data/regressions.json").read_text()
    return json.loads(text)


def _sample_g(n: int, seed: int) -> tuple[ExplicitMonad, str]:
    try:
        return random_monad(4, n + 9, 5, n, QQ, seed=seed), "generic"
    except SolutionSpaceTooSmall:
        return restrict_left(instanton_monad(5, n), 4, seed=seed), "structured"


def sharpness_examples(n_min: int, n_max: int, seed: int = 0) -> dict:
    rows = []
    for n in range(n_min, n_max + 1):
        v = projective_space(n)
        row: dict = {"n": n}
        f = linear(2, n + 3, 1, v)
        k = kclass_of_monad(2, n + 3, 1)
        chain = chi_tensor_display_chain(2, n + 3, 1, v)
        row["chi_FF"] = {"display_chain": chain, "kclass": chi_of_kclass(kclass_tensor(k, k), v),
                         "closed_form": str(8 - Fraction(n * n, 2) - Fraction(n, 2)),
                         "negative": chain < 0}
        g, how = _sample_g(n, seed)
        row["h1_G_dual"] = {"lower_bound": 3 * n - 5, "sampled": h1_dual_coker(g), "instance": how,
                            "shape": list(g.shape())}
        base = f if n >= 4 else linear(4, n + 7, 3, v)
        inst = MonadExtension(base, dualize(base))
        vi = verdict(inst, locally_free=True)
        ext = MonadExtension(linear(0, 1, 0, v), linear(4, n + 9, 5, v))
        ve = verdict(ext, locally_free=True)
        row["sharpness"] = {
            "instanton": {"sub": base.label(), "rank": inst.rank, "c1": inst.c1, "charge": inst.total.c,
                          "status": vi.status, "certificate": [c.to_json() for c in vi.certificates]},
            "linear": {"rank": ext.rank, "c1": ext.c1, "status": ve.status,
                       "certificate": [c.to_json() for c in ve.certificates]},
        }
        rows.append(row)
    return {"rows": rows}


def check_regressions(bundle: dict, expected: dict) -> list[str]:
    diffs = []
    chi = expected.get("chi_FF", {})
    bounds = expected.get("h1_G_dual_exact", {})
    statuses = expected.get("sharpness", {})
    for row in bundle["rows"]:
        n = row["n"]
        c = row["chi_FF"]
        if c["display_chain"] != c["kclass"]:
            diffs.append(f"n={n}: chi(F(x)F) paths disagree {c['display_chain']} != {c['kclass']}")
        if str(n) in chi and c["display_chain"] != chi[str(n)]:
            diffs.append(f"n={n}: chi(F(x)F) = {c['display_chain']}, expected {chi[str(n)]}")
        h = row["h1_G_dual"]
        if h["sampled"] < h["lower_bound"]:
            diffs.append(f"n={n}: h1(G*) = {h['sampled']} below {h['lower_bound']}")
        if str(n) in bounds and h["instance"] == "generic" and h["sampled"] != bounds[str(n)]:
            diffs.append(f"n={n}: generic h1(G*) = {h['sampled']}, expected {bounds[str(n)]}")
        s = row["sharpness"]
        if s["instanton"]["status"] != statuses.get("instanton", "NotSemistable") or s["instanton"]["rank"] != 2 * n:
            diffs.append(f"n={n}: rank-2n instanton verdict {s['instanton']['status']}")
        if s["linear"]["status"] != statuses.get("linear", "NotStable") or s["linear"]["rank"] != n + 1:
            diffs.append(f"n={n}: rank-(n+1) linear sheaf verdict {s['linear']['status']}")
    return diffs


def cmd_sharpness_examples(args, out) -> int:
    if args.n_min < 2 and args.n_min <= args.n_max:
        raise UserError("n must be at least 2")
    bundle = sharpness_examples(args.n_min, args.n_max, args.seed)
    diffs = check_regressions(bundle, load_regressions())
    bundle["mismatches"] = diffs
    _emit(bundle, args.format, out)
    if diffs:
        raise RegressionMismatch(diffs, bundle)
    return EXIT_OK


def _load_explicit(path: str) -> ExplicitMonad:
    obj = _load_json(path)
    try:
        return ExplicitMonad.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise UserError(f"{path} is not an explicit monad: {exc}") from None


def cmd_lab(args, out) -> int:
    if args.lab_cmd == "sample":
        field = field_from_token(args.field)
        if args.structured:
            m = instanton_monad(args.c, args.n, field)
            if args.a < args.c:
                m = restrict_left(m, args.a, seed=args.seed)
            if (m.a, m.b, m.c) != (args.a, args.b, args.c):
                raise UserError("structured monads have shape (a, 2c+n-1, c) with a <= c")
        else:
            m = random_monad(args.a, args.b, args.c, args.n, field, seed=args.seed, planted=args.planted)
        _emit(m.to_json(), "json", out)
        return EXIT_OK
    m = _load_explicit(args.monad)
    if args.lab_cmd == "h0":
        if args.field:
            m = ExplicitMonad(m.alpha, m.beta, m.n, field_from_token(args.field), m.seed)
        _emit({"k": args.k, "h0": h0_graded(m, args.k), "field": m.field.token()}, args.format, out)
    elif args.lab_cmd == "dualcoker":
        _emit({"h1_dual_coker": h1_dual_coker(m), "lower_bound": max(0, m.a * (m.n + 1) - m.b)},
              args.format, out)
    elif args.lab_cmd == "scan":
        dims = tuple(int(x) for x in args.dims.split(","))
        report = degeneration_scan(m, dims, q=args.q, subspaces=args.subspaces, seed=args.seed)
        _emit(report.to_json(), args.format, out)
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def _monad_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--c", type=int)
    p.add_argument("--a2", type=int, default=0)
    p.add_argument("--shape", default="M1", choices=["M1", "M2.1", "M2.2"])
    p.add_argument("--variety", default="Pn:3", help="Pn:N, Qn:N or a JSON variety file")
    p.add_argument("--monad", help="monad spec JSON file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linmonad", description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=["text", "json", "csv"], default="text")
    sub = parser.add_subparsers(dest="cmd", required=True)

    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=["text", "json", "csv"], default=argparse.SUPPRESS)

    p = sub.add_parser("analyze", parents=[fmt], help="rank, c1, charge, Chern series, slope, existence")
    _monad_args(p)
    p = sub.add_parser("chern", parents=[fmt], help="Chern series, K-class and Euler characteristics")
    _monad_args(p)
    p = sub.add_parser("table", parents=[fmt], help="derived cohomology vanishing table")
    _monad_args(p)
    p.add_argument("--window", help="twist window LO:HI")
    p.add_argument("--node", default="E")
    p.add_argument("--locally-free", action="store_true")
    p = sub.add_parser("stability", parents=[fmt], help="stability verdict with certificates")
    _monad_args(p)
    p.add_argument("--locally-free", action="store_true")
    p.add_argument("--torsion-free", action="store_true")
    p.add_argument("--reflexive", action="store_true")
    p.add_argument("--c1", type=int, help="c1 for spinor monads")
    p = sub.add_parser("paper-examples", parents=[fmt], help="regression bundle for the sharpness examples")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)

    lab = sub.add_parser("lab", help="explicit monads over exact fields")
    lsub = lab.add_subparsers(dest="lab_cmd", required=True)
    p = lsub.add_parser("sample", parents=[fmt])
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--field", default="QQ", help="QQ or GF(p)")
    p.add_argument("--planted", choices=["point", "line"])
    p.add_argument("--structured", action="store_true", help="coordinate instanton construction")
    p = lsub.add_parser("h0", parents=[fmt])
    p.add_argument("--monad", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--field")
    p = lsub.add_parser("dualcoker", parents=[fmt])
    p.add_argument("--monad", required=True)
    p = lsub.add_parser("scan", parents=[fmt])
    p.add_argument("--monad", required=True)
    p.add_argument("--q", type=int, default=101)
    p.add_argument("--dims", default="0,1,2,3")
    p.add_argument("--subspaces", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    return parser


COMMANDS = {
    "analyze": cmd_analyze,
    "chern": cmd_chern,
    "table": cmd_table,
    "stability": cmd_stability,
    "paper-examples": cmd_sharpness_examples,
    "lab": cmd_lab,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USER if exc.code else EXIT_OK
    try:
        return COMMANDS[args.cmd](args, out)
    except RegressionMismatch as exc:
        for d in exc.diffs:
            err.write(f"regression mismatch: {d}\n")
        return EXIT_REGRESSION
    except Contradiction as exc:
        err.write(f"contradiction: {exc}\n")
        return EXIT_INTERNAL
    except (UserError, MonadError, AlphaH0NotInjective, SolutionSpaceTooSmall, EnumerationBudgetExceeded) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USER
    except (ValueError, KeyError, TypeError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USER
    except Exception as exc:  # pragma: no cover - last resort
        err.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
