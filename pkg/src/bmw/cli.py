"""The ``bmw`` command line tool.

Exit codes: 0 success, 1 a check failed (for instance an ``--expect``
mismatch), 2 invalid input, 3 a resource limit was hit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import core
from .core import BmwPresentation, GenericPresentation, InvalidPresentation, PresentationError

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_INPUT = 2
EXIT_LIMIT = 3


class CheckFailed(Exception):
    pass


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    """Resource limits and output settings shared by all subcommands."""

    max_cosets: int = 1_000_000
    ball_limit: int = 200_000
    budget: int = 1_000_000
    jobs: int = 1
    format: str = "human"
    catalog: str | None = None

    def __post_init__(self):
        for f in ("max_cosets", "ball_limit", "budget", "jobs"):
            if getattr(self, f) < 1:
                raise InputError(f"--{f.replace('_', '-')} must be positive")


# ---------------------------------------------------------------------------
# helpers


def _load(spec: str) -> BmwPresentation | GenericPresentation:
    """A JSON file path, or a catalog name."""
    path = Path(spec)
    if path.is_file():
        try:
            return core.load(path)
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise InputError(f"cannot read {spec}: {exc}") from exc
    try:
        return core.catalog(spec)
    except KeyError:
        raise InputError(f"{spec!r} is neither a file nor a catalog name") from None


def _load_bmw(spec: str) -> BmwPresentation:
    p = _load(spec)
    if not isinstance(p, BmwPresentation):
        raise InputError(f"{spec} is a generic presentation; this command needs a BMW-presentation")
    return p


def _pair(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise InputError(f"{what} must be comma-separated integers, got {text!r}") from None


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _emit(cfg: RunConfig, data: dict, human: str, tsv: list[list] | None = None) -> None:
    if cfg.format == "json":
        print(json.dumps(data, sort_keys=True))
    elif cfg.format == "tsv":
        rows = tsv if tsv is not None else [[k, json.dumps(v) if isinstance(v, (list, dict)) else v] for k, v in data.items()]
        for r in rows:
            print("\t".join(str(c) for c in r))
    else:
        print(human)


def _expect(value, expected, what: str) -> None:
    if expected is not None and value != expected:
        raise CheckFailed(f"{what}: expected {expected}, got {value}")


def _write(p: BmwPresentation, out: str | None) -> None:
    if out:
        Path(out).write_text(core.serialize(p) + "\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args, cfg: RunConfig) -> int:
    p = _load_bmw(args.file)
    rep = core.check(p)
    data = {"name": p.name, "valid": rep.ok, "degree": [p.M, p.N], "violations": rep.violations}
    if rep.ok:
        data["torsion"] = core.torsion_profile(p)
        _emit(cfg, data, f"valid, degree ({p.M}, {p.N}), {len(p.squares)} squares")
        return EXIT_OK
    _emit(cfg, data, "invalid BMW-presentation:\n" + "\n".join(rep.violations))
    return EXIT_INPUT


def cmd_local_action(args, cfg: RunConfig) -> int:
    from .localaction import classify, local_generators, parse_side

    p = _load_bmw(args.file)
    kappa = core.validate(p)
    sides = ["a", "x"] if args.side is None else [args.side]
    out, text = {}, []
    reports = classify(p) if args.identify else {}
    for s in sides:
        key = "AX"[parse_side(s)]
        gens = local_generators(p, s, kappa)
        cyc = {p.letter_name(g.generator): g.cycle_notation(p) for g in gens}
        out[key] = {"generators": cyc, "images": {k: list(g.perm.images) for k, g in zip(cyc, gens)}}
        text.append(f"{key}-star:")
        text += [f"  {k}: {v}" for k, v in cyc.items()]
        if args.identify:
            r = reports[key]
            out[key]["classification"] = r.to_dict()
            text.append(f"  local action: {r.label} (order {r.order}, 2-transitive: {r.two_transitive})")
            if r.note:
                text.append(f"  note: {r.note}")
    rows = [[k, g, c] for k, v in out.items() for g, c in v["generators"].items()]
    _emit(cfg, out, "\n".join(text), rows)
    return EXIT_OK


def cmd_discreteness(args, cfg: RunConfig) -> int:
    from .treeball import discreteness_verdict

    p = _load_bmw(args.file)
    core.validate(p)
    sides = ["a", "x"] if args.side is None else [args.side]
    verdicts = [discreteness_verdict(p, s, args.rmax, deep=args.deep, limit=cfg.ball_limit) for s in sides]
    data = verdicts[0].to_dict() if len(verdicts) == 1 else {"sides": [v.to_dict() for v in verdicts]}
    human = "\n".join(f"{v.side}: {v}" for v in verdicts)
    rows = [[v.side, v.kind, v.rule or "", ",".join(map(str, v.orders))] for v in verdicts]
    _emit(cfg, data, human, rows)
    if args.expect is not None:
        _expect([v.kind for v in verdicts], args.expect.split(","), "verdict")
    return EXIT_OK


def cmd_double(args, cfg: RunConfig) -> int:
    from .constructions import double

    q = double(_load_bmw(args.file))
    _write(q, args.output)
    data = {"degree": [q.M, q.N], "valid": core.is_valid(q), "squares": len(q.squares)}
    _emit(cfg, data, f"double: degree ({q.M}, {q.N}), {len(q.squares)} squares, valid")
    return EXIT_OK


def cmd_tensor(args, cfg: RunConfig) -> int:
    from .constructions import NotSignCoherent, tensor_product

    p = _load_bmw(args.file)
    try:
        q = tensor_product(p, args.mode)
    except NotSignCoherent as exc:
        _emit(cfg, {"mode": args.mode, "coherent": False, "witness": str(exc.witness), "message": str(exc)}, str(exc))
        return EXIT_CHECK
    _write(q, args.output)
    data = {"mode": args.mode, "degree": [q.M, q.N], "valid": core.is_valid(q), "squares": len(q.squares)}
    _emit(cfg, data, f"tensor ({args.mode}): degree ({q.M}, {q.N}), {len(q.squares)} squares, valid")
    return EXIT_OK


def _profiles(args) -> list:
    from .enumerate import Profile

    if args.profile:
        t = _pair(args.profile, "--profile")
        if len(t) != 4:
            raise InputError("--profile needs m,m_inv,n,n_inv")
        return [Profile(*t)]
    if not args.degree:
        raise InputError("give --degree M,N or --profile m,m_inv,n,n_inv")
    M, N = _pair(args.degree, "--degree")
    if M < 1 or N < 1:
        raise InputError("degrees must be positive")
    if args.torsion_free:
        try:
            return [Profile.torsion_free(M, N)]
        except ValueError as exc:
            raise InputError(str(exc)) from None
    return [Profile(m, M - 2 * m, n, N - 2 * n) for m in range(M // 2 + 1) for n in range(N // 2 + 1)]


def cmd_enumerate(args, cfg: RunConfig) -> int:
    from .enumerate import enumerate_presentations

    total, per = 0, []
    emit_dir = Path(args.emit) if args.emit else None
    if emit_dir:
        emit_dir.mkdir(parents=True, exist_ok=True)
    for prof in _profiles(args):
        _progress(f"enumerating profile {prof.m},{prof.m_inv},{prof.n},{prof.n_inv}")
        res = enumerate_presentations(prof, args.count_mode, args.torsion_free, jobs=cfg.jobs,
                                      checkpoint=args.checkpoint, max_prefixes=args.max_prefixes)
        total += res.count
        per.append({"profile": [prof.m, prof.m_inv, prof.n, prof.n_inv], "count": res.count})
        if args.stream or emit_dir:
            tag = f"{prof.m}_{prof.m_inv}_{prof.n}_{prof.n_inv}"
            for i, p in enumerate(res.presentations()):
                doc = core.to_dict(p)
                if args.stream:
                    print(json.dumps(doc, sort_keys=True))
                if emit_dir:
                    (emit_dir / f"{tag}_{i:06d}.json").write_text(json.dumps(doc, indent=1) + "\n")
    if not args.stream:
        data = {"mode": args.count_mode, "torsion_free": args.torsion_free, "count": total, "profiles": per}
        _emit(cfg, data, f"{total} classes ({args.count_mode})", [[",".join(map(str, r["profile"])), r["count"]] for r in per])
    _expect(total, args.expect, "enumeration count")
    return EXIT_OK


def _generic(spec: str) -> GenericPresentation:
    p = _load(spec)
    return core.to_generic(p) if isinstance(p, BmwPresentation) else p


def cmd_quotient(args, cfg: RunConfig) -> int:
    from .cosetenum import todd_coxeter

    g = _generic(args.file)
    try:
        g = g.with_relators(args.add_relator or [])
        subs = [g.word(w) for w in args.subgroup or []]
    except PresentationError as exc:
        raise InputError(str(exc)) from None
    t = todd_coxeter(g, subs, cfg.max_cosets, args.strategy)
    data = {"index": t.index, "relators_added": args.add_relator or [], "subgroup": args.subgroup or []}
    what = "order" if not subs else "index"
    _emit(cfg, data, f"{what} {t.index}")
    _expect(t.index, args.expect, what)
    return EXIT_OK


def cmd_abelianize(args, cfg: RunConfig) -> int:
    from .cosetenum import abelianization

    ab = abelianization(_generic(args.file))
    data = {"free_rank": ab.free_rank, "torsion": list(ab.torsion), "trivial": ab.is_trivial()}
    _emit(cfg, data, str(ab))
    if args.expect_trivial and not ab.is_trivial():
        raise CheckFailed(f"abelianization is {ab}, not trivial")
    return EXIT_OK


def cmd_subgroup(args, cfg: RunConfig) -> int:
    from .cosetenum import abelianization, reidemeister_schreier, todd_coxeter

    p = _load(args.file)
    if args.parity:
        if not isinstance(p, BmwPresentation):
            raise InputError("--parity needs a BMW-presentation")
        table = core.parity_quotient(p).coset_table()
        g = core.to_generic(p)
    else:
        g = core.to_generic(p) if isinstance(p, BmwPresentation) else p
        if not args.words:
            raise InputError("give --parity or subgroup --words")
        try:
            subs = [g.word(w) for w in args.words]
        except PresentationError as exc:
            raise InputError(str(exc)) from None
        table = todd_coxeter(g, subs, cfg.max_cosets)
    data = {"index": table.index}
    text = [f"index {table.index}"]
    if args.rs:
        s = reidemeister_schreier(g, table)
        ab = abelianization(s)
        data["presentation"] = s.to_json()
        data["abelianization"] = {"free_rank": ab.free_rank, "torsion": list(ab.torsion)}
        text += [f"subgroup: {len(s.gens)} generators, {len(s.relators)} relators", f"abelianization: {ab}"]
    _emit(cfg, data, "\n".join(text))
    return EXIT_OK


def _target(spec: str):
    from .cosetenum import named_target
    from .permgroup import PermGroup, Permutation

    path = Path(spec)
    if path.is_file():
        doc = json.loads(path.read_text())
        d = doc["degree"]
        gens = [Permutation(g) if isinstance(g, list) else Permutation.from_cycles(d, _cycles(g), one_based=True) for g in doc["generators"]]
        return PermGroup(gens, degree=d)
    try:
        return named_target(spec)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _cycles(text: str) -> list[tuple[int, ...]]:
    out = []
    for part in text.replace(" ", "").split(")"):
        part = part.lstrip("(")
        if part:
            out.append(tuple(int(t) for t in part.split(",")))
    return out


def cmd_homsearch(args, cfg: RunConfig) -> int:
    from .cosetenum import find_homomorphisms
    from .permgroup import PermGroup

    g = _generic(args.file)
    target = _target(args.target)
    homs = find_homomorphisms(g, target, surjective_only=args.surjective, up_to_conjugacy=args.conjclass,
                              bound=cfg.budget, jobs=cfg.jobs)
    orders = [PermGroup(list(h), degree=target.degree).order() for h in homs] if homs else []
    trivial = sum(1 for h in homs if all(x.is_identity() for x in h))
    data = {"count": len(homs), "trivial": trivial, "image_orders": sorted(set(orders)),
            "homomorphisms": [{n: x.cycle_notation() for n, x in zip(g.gens, h)} for h in homs[: args.show]]}
    human = [f"{len(homs)} homomorphisms ({trivial} trivial); image orders {sorted(set(orders))}"]
    human += ["  " + ", ".join(f"{n} -> {x.cycle_notation()}" for n, x in zip(g.gens, h)) for h in homs[: args.show]]
    _emit(cfg, data, "\n".join(human))
    if args.expect_trivial_only and len(homs) != trivial:
        raise CheckFailed(f"{len(homs) - trivial} nontrivial homomorphisms found")
    _expect(len(homs), args.expect, "homomorphism count")
    return EXIT_OK


NAMED_ASSIGNMENTS = ("escher",)


def _assignment(spec: str, gens) -> dict:
    from .cosetenum import escher_assignment
    from .permgroup import Permutation

    if spec == "escher":
        return escher_assignment()
    path = Path(spec)
    if not path.is_file():
        raise InputError(f"{spec!r} is neither a file nor one of {', '.join(NAMED_ASSIGNMENTS)}")
    doc = json.loads(path.read_text())
    d = doc["degree"]
    out = {}
    for name, img in doc["images"].items():
        out[name] = Permutation(img) if isinstance(img, list) else Permutation.from_cycles(d, _cycles(img), one_based=True)
    missing = [n for n in gens if n not in out]
    if missing:
        raise InputError(f"no image given for {', '.join(missing)}")
    return out


def cmd_verify_hom(args, cfg: RunConfig) -> int:
    from .cosetenum import verify_homomorphism

    g = _generic(args.file)
    asg = _assignment(args.assignment, g.gens)
    try:
        ok, order = verify_homomorphism(g, asg)
    except (KeyError, ValueError) as exc:
        raise InputError(str(exc)) from None
    degree = next(iter(asg.values())).degree
    data = {"homomorphism": ok, "image_order": order, "degree": degree}
    _emit(cfg, data, f"homomorphism: {str(ok).lower()}; image order {order} on {degree} points")
    if args.expect_order is not None:
        _expect(ok, True, "homomorphism")
        _expect(order, args.expect_order, "image order")
    return EXIT_OK


def cmd_higman_scan(args, cfg: RunConfig) -> int:
    from .cosetenum import higman_scan

    try:
        res = higman_scan(args.max)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(cfg, {"limit": args.max, "solutions": res}, " ".join(map(str, res)), [[n] for n in res])
    if args.expect is not None:
        _expect(res, list(_pair(args.expect, "--expect")), "solutions")
    return EXIT_OK


def cmd_quaternion(args, cfg: RunConfig) -> int:
    from .quaternion import verify_rattaggi

    ev = verify_rattaggi()
    data = {"relators": [{"relator": e.relator, "value": str(e.value), "nrd": str(e.nrd), "central": e.central} for e in ev]}
    human = "\n".join(f"{e.relator:>16}  ->  {e.value}   Nrd = {e.nrd}   {'central' if e.central else 'NOT central'}" for e in ev)
    _emit(cfg, data, human, [[e.relator, e.value, e.nrd, e.central] for e in ev])
    if not all(e.central for e in ev):
        raise CheckFailed("some relator is not central")
    return EXIT_OK


def cmd_marked(args, cfg: RunConfig) -> int:
    from .marked import alt_pair, compare_balls, lamplighter_oracle

    p, q = _pair(args.alt, "--alt")
    try:
        pair = alt_pair(p, q)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    res = compare_balls(pair.oracle(), lamplighter_oracle(args.lamplighter), args.radius)
    data = res.to_dict()
    human = f"radius {res.radius}: " + ("isomorphic" if res.isomorphic else f"differ, witness {res.witness}")
    _emit(cfg, data, human)
    if args.expect is not None:
        _expect(res.isomorphic, args.expect == "true", "ball isomorphism")
    return EXIT_OK


def cmd_catalog(args, cfg: RunConfig) -> int:
    if args.name:
        p = _load(args.name)
        doc = core.to_dict(p) if isinstance(p, BmwPresentation) else p.to_json()
        print(json.dumps(doc, indent=None if cfg.format == "json" else 1, sort_keys=cfg.format == "json"))
        return EXIT_OK
    names = core.catalog_names(args.kind)
    rows = []
    for n in names:
        p = core.catalog(n)
        rows.append([n, "bmw" if isinstance(p, BmwPresentation) else "generic",
                     f"{p.M},{p.N}" if isinstance(p, BmwPresentation) else str(len(p.gens))])
    _emit(cfg, {"names": names}, "\n".join("\t".join(r) for r in rows), rows)
    return EXIT_OK


def cmd_report(args, cfg: RunConfig) -> int:
    from .localaction import format_table1, table1_report

    rows = table1_report()
    if cfg.format == "json":
        print(json.dumps([r.__dict__ for r in rows], sort_keys=True))
    else:
        print(format_table1(rows, "markdown" if args.markdown else "tsv"))
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "json", "tsv"), default=argparse.SUPPRESS)
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS)
    common.add_argument("--max-cosets", type=int, default=argparse.SUPPRESS)
    common.add_argument("--ball-limit", type=int, default=argparse.SUPPRESS)
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS, help="enumeration bound for group elements")
    common.add_argument("--catalog", default=argparse.SUPPRESS, help="catalog directory (overrides BMW_CATALOG)")

    ap = argparse.ArgumentParser(prog="bmw", description="Computations with BMW-presentations.", parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        s = sub.add_parser(name, help=help, parents=[common])
        s.set_defaults(fn=fn)
        return s

    s = add("validate", cmd_validate, "check the link condition")
    s.add_argument("file")

    s = add("local-action", cmd_local_action, "local permutations on the stars")
    s.add_argument("file")
    s.add_argument("--side", choices=("a", "x"))
    s.add_argument("--identify", action="store_true")

    s = add("discreteness", cmd_discreteness, "ball-order sequence and discreteness verdict")
    s.add_argument("file")
    s.add_argument("--side", choices=("a", "x"))
    s.add_argument("--rmax", type=int, default=5)
    s.add_argument("--deep", action="store_true")
    s.add_argument("--expect", help="comma-separated verdicts, e.g. NonDiscrete,NonDiscrete")

    s = add("double", cmd_double, "double along the X-subgroup")
    s.add_argument("file")
    s.add_argument("-o", "--output")

    s = add("tensor", cmd_tensor, "fiber product of a presentation with itself")
    s.add_argument("file")
    s.add_argument("--mode", choices=("full", "coherent"), default="full")
    s.add_argument("-o", "--output")

    s = add("enumerate", cmd_enumerate, "count presentations of a degree")
    s.add_argument("--degree")
    s.add_argument("--profile", help="m,m_inv,n,n_inv")
    s.add_argument("--torsion-free", action="store_true")
    s.add_argument("--count-mode", choices=("complexes", "presentations"), default="complexes")
    s.add_argument("--emit", help="directory receiving one JSON file per class")
    s.add_argument("--stream", action="store_true", help="print one JSON presentation per line")
    s.add_argument("--checkpoint")
    s.add_argument("--max-prefixes", type=int)
    s.add_argument("--expect", type=int)

    s = add("quotient", cmd_quotient, "coset enumeration")
    s.add_argument("file")
    s.add_argument("--add-relator", action="append")
    s.add_argument("--subgroup", action="append")
    s.add_argument("--strategy", choices=("hlt", "felsch", "hlt+felsch"), default="hlt+felsch")
    s.add_argument("--expect", type=int)

    s = add("abelianize", cmd_abelianize, "abelian invariants")
    s.add_argument("file")
    s.add_argument("--expect-trivial", action="store_true")

    s = add("subgroup", cmd_subgroup, "finite-index subgroup presentation")
    s.add_argument("file")
    s.add_argument("--parity", action="store_true")
    s.add_argument("--words", action="append")
    s.add_argument("--rs", action="store_true")

    s = add("homsearch", cmd_homsearch, "homomorphisms into a permutation group")
    s.add_argument("file")
    s.add_argument("--target", required=True)
    s.add_argument("--surjective", action="store_true")
    s.add_argument("--conjclass", action="store_true")
    s.add_argument("--show", type=int, default=5)
    s.add_argument("--expect", type=int)
    s.add_argument("--expect-trivial-only", action="store_true")

    s = add("verify-hom", cmd_verify_hom, "check a generator assignment into a permutation group")
    s.add_argument("file")
    s.add_argument("--assignment", required=True, help="JSON file {degree, images} or 'escher'")
    s.add_argument("--expect-order", type=int)

    s = add("higman-scan", cmd_higman_scan, "n <= max with n | 2^n - 1")
    s.add_argument("--max", type=int, default=1_000_000)
    s.add_argument("--expect")

    s = add("quaternion", cmd_quaternion, "quaternion checks")
    s.add_argument("action", choices=("verify-rattaggi",))

    s = add("marked", cmd_marked, "marked-group ball comparison")
    s.add_argument("action", choices=("compare",))
    s.add_argument("--alt", required=True, help="p,q")
    s.add_argument("--lamplighter", type=int, required=True)
    s.add_argument("--radius", type=int, default=3)
    s.add_argument("--expect", choices=("true", "false"))

    s = add("catalog", cmd_catalog, "list or print catalog entries")
    s.add_argument("name", nargs="?")
    s.add_argument("--kind", choices=("bmw", "generic"))

    s = add("report", cmd_report, "reports")
    s.add_argument("which", choices=("table1",))
    s.add_argument("--markdown", action="store_true")
    return ap


def dispatch(argv: list[str] | None = None) -> int:
    from .constructions import NotSignCoherent
    from .cosetenum import Overflow
    from .enumerate import BudgetExceeded
    from .marked import BudgetExceeded as WordBudgetExceeded
    from .permgroup import EnumerationBoundExceeded
    from .treeball import BallTooLarge

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        defaults = RunConfig()
        cfg = RunConfig(**{f: getattr(args, f, getattr(defaults, f)) for f in RunConfig.__dataclass_fields__})
        if cfg.catalog:
            os.environ["BMW_CATALOG"] = cfg.catalog
        return args.fn(args, cfg)
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (Overflow, BudgetExceeded, WordBudgetExceeded, EnumerationBoundExceeded, BallTooLarge) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except InvalidPresentation as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT
    except (InputError, PresentationError, NotSignCoherent, ValueError, FileNotFoundError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
