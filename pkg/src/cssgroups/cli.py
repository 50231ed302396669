"""Command-line interface.

Every subcommand builds a report dictionary and prints it either as sorted
JSON or as ``key: value`` text.  Randomized subcommands require ``--seed``.
The exit status is 1 when a check finds a violation and 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time

from . import builders, checks, cocycle
from .element import (GroupElement, apply, compose, element_from_doc, inverse,
                      random_element)
from .errors import ConstructionError, InsufficientDepth, PresentationError, Unsupported
from .space import (fixture_text, format_address, load_space, minimal_ball_partition,
                    parse_address, space_to_doc)

SEED_MAX = 2 ** 64


class InputError(Exception):
    """Bad input; carries a message that names the offending file and location."""


# input -------------------------------------------------------------------------------

def _read_json(ref: str):
    """Load JSON from a path, falling back to a shipped fixture of the same name."""
    try:
        with open(ref, encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        stem = ref.rsplit("/", 1)[-1]
        stem = stem[:-5] if stem.endswith(".json") else stem
        try:
            text = fixture_text(stem)
        except FileNotFoundError:
            raise InputError(f"{ref}: no such file or fixture") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{ref}:{e.lineno}:{e.colno}: {e.msg}") from None


def _space(ref: str):
    try:
        return load_space(ref)
    except FileNotFoundError:
        raise InputError(f"{ref}: no such file or fixture") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{ref}:{e.lineno}:{e.colno}: {e.msg}") from None
    except PresentationError as e:
        raise InputError(f"{ref}: {e}") from None


def _element(ref: str, space=None) -> GroupElement:
    doc = _read_json(ref)
    try:
        if space is None:
            space = _space(str(doc.get("space", "")))
        return element_from_doc(doc, space)
    except (PresentationError, KeyError, TypeError) as e:
        raise InputError(f"{ref}: {e}") from None


def _address(text: str):
    try:
        return parse_address(text)
    except PresentationError as e:
        raise InputError(f"address {text!r}: {e}") from None


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= v < SEED_MAX:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


# commands ------------------------------------------------------------------------------
# Each returns (report, ok).  Single-value reports carry the value under "result".

def cmd_space_check(a):
    space = _space(a.file)
    tc = space.type_class
    report = {
        "space": space.name,
        "type_classes": {s: tc[s] for s in space.symbols},
        "finite_symbols": sorted(space.finite_symbols),
        "infinite_symbols": sorted(set(space.symbols) - space.finite_symbols),
        "minimal_ball_partition": [format_address(c) for c in minimal_ball_partition(space)],
        "css_star": checks.verify_css_star(space).to_doc(),
    }
    return report, True


def _matrix(ref):
    m = _read_json(ref)
    try:
        return checks.check_matrix(m)
    except (PresentationError, TypeError, ValueError) as e:
        raise InputError(f"{ref}: {e}") from None


def cmd_sft_build(a):
    space = checks.sft_from_matrix(_matrix(a.file))
    return {"space": space_to_doc(space)}, True


def cmd_sft_check(a):
    m = _matrix(a.file)
    return {"irreducible": checks.is_irreducible(m),
            "two_followed": checks.two_followed_symbols(m),
            "css_star": checks.verify_css_star(checks.sft_from_matrix(m)).to_doc()}, True


def _space_opt(a):
    return None if getattr(a, "space", None) is None else _space(a.space)


def cmd_elem(a):
    space = _space_opt(a)
    f = _element(a.elements[0], space)
    rest = a.elements[1:]
    if a.op == "compose":
        if len(rest) != 1:
            raise InputError("compose takes two element files")
        return {"result": compose(f, _element(rest[0], f.space)).reduce().to_doc()}, True
    if a.op == "eq":
        if len(rest) != 1:
            raise InputError("eq takes two element files")
        return {"result": f == _element(rest[0], f.space)}, True
    if a.op == "apply":
        if len(rest) != 1:
            raise InputError("apply takes an element file and an address")
        return {"result": format_address(apply(f, _address(rest[0])))}, True
    if rest:
        raise InputError(f"{a.op} takes one element file")
    if a.op == "inverse":
        return {"result": inverse(f).reduce().to_doc()}, True
    return {"result": f.reduce().to_doc()}, True


def cmd_elem_random(a):
    space = _space(a.space)
    g = random_element(space, random.Random(a.seed), depth=a.depth, regions=a.regions)
    return {"result": g.to_doc()}, True


def cmd_cocycle(a):
    f = _element(a.element, _space_opt(a))
    if a.op == "norm":
        return {"result": cocycle.cocycle_norm_sq(f)}, True
    v = cocycle.cocycle_vector(f)
    return {"norm_sq": v.norm_sq(), "result": v.to_doc()}, True


def cmd_cocycle_verify(a):
    space = _space(a.space)
    r = checks.cocycle_identity_fuzz(space, a.pairs, a.seed)
    return {"space": space.name, "seed": a.seed, **r}, r["failures"] == 0


def _paradox_doc(data):
    return {
        "space": data.space.name,
        "base": format_address(data.base),
        "balls": [format_address(b) for b in data.balls],
        "subballs": [[format_address(x) for x in p] for p in data.subballs],
        "g": [g.to_doc() for g in data.g],
        "h": [h.to_doc() for h in data.h],
        "strata": [f"{i},{j}" for i, j in data.strata],
    }


def cmd_paradox_build(a):
    return _paradox_doc(builders.paradox_data(_space(a.space))), True


def cmd_paradox_verify(a):
    data = builders.paradox_data(_space(a.space))
    r = builders.verify_paradox(data, samples=a.samples, seed=a.seed, pairs=a.pairs,
                                anchor=a.anchor)
    report = {"space": data.space.name, "seed": a.seed, "anchor": a.anchor, **r}
    return report, r["violations"] == 0 and r["coset_violations"] == 0


def _pingpong_doc(pp):
    return {"g": pp.g.to_doc(), "h": pp.h.to_doc(),
            "balls": {k: format_address(v) for k, v in sorted(pp.balls.items())}}


def cmd_pingpong_build(a):
    space = _space(a.space)
    pp = builders.pingpong_pair(space, seed=a.seed)
    return {"space": space.name, "seed": a.seed, **_pingpong_doc(pp)}, True


def cmd_pingpong_verify(a):
    space = _space(a.space)
    pp = builders.pingpong_pair(space, seed=a.seed)
    bad = builders.pingpong_containment(pp)
    w = builders.verify_words(pp, a.maxlen)
    report = {"space": space.name, "seed": a.seed, "maxlen": a.maxlen,
              "containment_violations": bad, "words": w["words"],
              "by_length": {str(k): v for k, v in w["by_length"].items()},
              "identity_words": w["identity_words"]}
    return report, not bad and not w["identity_words"]


def cmd_icc(a):
    f = _element(a.element, _space_opt(a))
    cs = builders.icc_conjugates(f, a.count)
    distinct = len(set(cs))
    return {"count": a.count, "distinct": distinct,
            "conjugates": [c.to_doc() for c in cs]}, distinct == a.count


def cmd_malnormal(a):
    space = _space(a.space)
    ball = _address(a.ball)
    g = _element(a.witness, space) if a.witness else builders.malnormal_witness(space, ball)
    r = checks.malnormal_probe(space, ball, g, samples=a.samples, seed=a.seed)
    report = {"space": space.name, "ball": a.ball, "seed": a.seed, "witness": g.to_doc(), **r}
    return report, r["counterexamples"] == 0


def cmd_probe(a):
    space = _space(a.space)
    if a.kind == "centralizer":
        r = checks.centralizer_probe(space, _address(a.ball), samples=a.samples, seed=a.seed)
        ok = r["positive_failures"] == 0 and r["negative_failures"] == 0
        r = {"ball": a.ball, **r}
    else:
        r = checks.finite_support_probe(space, samples=a.samples, seed=a.seed)
        if r["lambda_trivial"]:
            r["verdict"] = "Λ trivial"
        ok = r["failures"] == 0
    return {"space": space.name, "seed": a.seed, **r}, ok


def cmd_fuzz(a):
    space = _space(a.space)
    if a.kind == "group-laws":
        r = checks.group_law_fuzz(space, a.n, a.seed)
    else:
        r = checks.normal_form_fuzz(space, a.n, a.seed)
    return {"space": space.name, "seed": a.seed, **r}, r["failures"] == 0


# parser ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--timing", action="store_true",
                        help="include wall time in the report (makes output non-deterministic)")
    common.add_argument("-o", "--output", help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="cssgroups", description=__doc__.splitlines()[0])
    top = p.add_subparsers(dest="command", required=True)

    def group(name, help_):
        return top.add_parser(name, help=help_).add_subparsers(dest="sub", required=True)

    def leaf(sp, name, func, help_):
        q = sp.add_parser(name, parents=[common], help=help_)
        q.set_defaults(func=func)
        return q

    def seeded(q):
        q.add_argument("--seed", type=_seed, required=True)

    g = group("space", "inspect a space presentation")
    q = leaf(g, "check", cmd_space_check, "type classes, finite symbols and the CSS* conditions")
    q.add_argument("file")

    g = group("sft", "spaces from 0/1 transition matrices")
    leaf(g, "build", cmd_sft_build, "emit the presentation").add_argument("file")
    leaf(g, "check", cmd_sft_check, "irreducibility and 2-followed symbols").add_argument("file")

    g = group("elem", "element arithmetic")
    for op in ("compose", "inverse", "reduce", "eq", "apply"):
        q = leaf(g, op, cmd_elem, f"{op} on element files")
        q.add_argument("elements", nargs="+")
        q.add_argument("--space")
        q.set_defaults(op=op)
    q = leaf(g, "random", cmd_elem_random, "seeded random element")
    q.add_argument("--space", required=True)
    q.add_argument("--depth", type=_positive, default=4)
    q.add_argument("--regions", type=_positive, default=6)
    seeded(q)

    g = group("cocycle", "the zipper cocycle")
    for op in ("norm", "vector"):
        q = leaf(g, op, cmd_cocycle, f"cocycle {op} of an element")
        q.add_argument("element")
        q.add_argument("--space")
        q.set_defaults(op=op)
    q = leaf(g, "verify", cmd_cocycle_verify, "check the cocycle identity on random pairs")
    q.add_argument("--space", required=True)
    q.add_argument("--pairs", type=_positive, default=500)
    seeded(q)

    g = group("paradox", "paradoxical decomposition")
    q = leaf(g, "build", cmd_paradox_build, "balls, subballs and translating elements")
    q.add_argument("--space", required=True)
    q = leaf(g, "verify", cmd_paradox_verify, "sample every stratum and check the translates")
    q.add_argument("--space", required=True)
    q.add_argument("--samples", type=_positive, default=200)
    q.add_argument("--pairs", type=int, default=50)
    q.add_argument("--anchor", choices=("cell", "point"), default="cell")
    seeded(q)

    g = group("pingpong", "free subgroups by ping-pong")
    q = leaf(g, "build", cmd_pingpong_build, "construct the generator pair")
    q.add_argument("--space", required=True)
    seeded(q)
    q = leaf(g, "verify", cmd_pingpong_verify, "containments and reduced words")
    q.add_argument("--space", required=True)
    q.add_argument("--maxlen", type=_positive, default=8)
    seeded(q)

    g = group("icc", "infinite conjugacy classes")
    q = leaf(g, "conjugates", cmd_icc, "pairwise distinct conjugates of an element")
    q.add_argument("element")
    q.add_argument("--space")
    q.add_argument("--count", type=_positive, default=25)

    g = group("malnormal", "weak malnormality")
    q = leaf(g, "test", cmd_malnormal, "falsification probe at a ball")
    q.add_argument("--space", required=True)
    q.add_argument("--ball", required=True)
    q.add_argument("--witness", help="element file; built automatically when omitted")
    q.add_argument("--samples", type=_positive, default=1000)
    seeded(q)

    g = group("probe", "centralizer and finite-support probes")
    for kind in ("centralizer", "finite-support"):
        q = leaf(g, kind, cmd_probe, f"{kind} probe")
        q.add_argument("--space", required=True)
        q.add_argument("--samples", type=_positive, default=300)
        if kind == "centralizer":
            q.add_argument("--ball", default="0")
        seeded(q)
        q.set_defaults(kind=kind)

    g = group("fuzz", "randomized law checks")
    for kind in ("group-laws", "normal-form"):
        q = leaf(g, kind, cmd_fuzz, f"{kind} fuzz")
        q.add_argument("--space", required=True)
        q.add_argument("--n", type=_positive, default=1000)
        seeded(q)
        q.set_defaults(kind=kind)
    return p


# output ------------------------------------------------------------------------------------

def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False)
    if set(report) == {"result"}:
        v = report["result"]
        return v if isinstance(v, str) else json.dumps(v, sort_keys=True, ensure_ascii=False)
    lines = []
    for k in sorted(report):
        v = report[k]
        text = v if isinstance(v, str) else json.dumps(v, sort_keys=True, ensure_ascii=False)
        lines.append(f"{k}: {text}")
    return "\n".join(lines)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        report, ok = args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (PresentationError, InsufficientDepth, ConstructionError, Unsupported) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    if args.timing:
        report["wall_time_s"] = round(time.perf_counter() - start, 3)
    text = render(report, args.format) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
