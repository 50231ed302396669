"""Structural hypotheses and randomized probes.

Covers the two local-homogeneity conditions on a presented space, spaces
built from 0/1 transition matrices, and falsification probes for
centralizers, rigid stabilizers and the finite-support subgroup.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .builders import allocate_ball, move_witness, swap_involution
from .element import (CosetRep, GroupElement, Region, apply, commutator, compose, conjugate,
                      has_finite_support, inverse, moving_regions, random_element,
                      restrict_coset, support_within)
from .errors import ConstructionError, PresentationError, Unsupported
from .simstruct import CANONICAL
from .space import ROOT, SpacePresentation, parse_address


def _rng(seed: int, index: int) -> random.Random:
    return random.Random((int(seed) << 24) + index)


# transition matrices ------------------------------------------------------------

def check_matrix(m) -> list:
    rows = [list(map(int, r)) for r in m]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise PresentationError("transition matrix must be square and nonempty")
    for i, r in enumerate(rows):
        if any(v not in (0, 1) for v in r):
            raise PresentationError(f"row {i} has entries other than 0/1")
        if not any(r):
            raise PresentationError(f"row {i} is zero: symbol {i} is dead")
    return rows


def sft_from_matrix(m, name: str = "") -> SpacePresentation:
    """Tree whose fresh root has every symbol as a child; symbol i has its followers."""
    rows = check_matrix(m)
    n = len(rows)
    syms = [str(i) for i in range(n)]
    children = {"R": tuple(syms)}
    for i, r in enumerate(rows):
        children[syms[i]] = tuple(syms[j] for j in range(n) if r[j])
    return SpacePresentation(("R", *syms), children, "R", frozenset(), name=name)


def is_irreducible(m) -> bool:
    rows = check_matrix(m)
    n = len(rows)

    def reach(adj, start):
        seen = {start}
        todo = [start]
        while todo:
            i = todo.pop()
            for j in range(n):
                if adj(i, j) and j not in seen:
                    seen.add(j)
                    todo.append(j)
        return seen

    full = set(range(n))
    return (reach(lambda i, j: rows[i][j], 0) == full
            and reach(lambda i, j: rows[j][i], 0) == full)


def two_followed_symbols(m) -> list:
    return [str(i) for i, r in enumerate(check_matrix(m)) if sum(r) >= 2]


# the local-homogeneity conditions ---------------------------------------------------

@dataclass
class CssStarReport:
    condition1_witness: str | None = None
    condition2_witness: tuple | None = None
    infinite_space: bool = True

    @property
    def condition1(self) -> bool:
        return self.condition1_witness is None

    @property
    def condition2(self) -> bool:
        return self.condition2_witness is None

    @property
    def passed(self) -> bool:
        return self.infinite_space and self.condition1 and self.condition2

    def to_doc(self) -> dict:
        return {
            "verdict": "PASS" if self.passed else "FAIL",
            "infinite_space": self.infinite_space,
            "condition1": "PASS" if self.condition1 else "FAIL",
            "condition1_witness": self.condition1_witness,
            "condition2": "PASS" if self.condition2 else "FAIL",
            "condition2_witness": None if self.condition2 else list(self.condition2_witness),
        }


def verify_css_star(space: SpacePresentation) -> CssStarReport:
    """Condition 1: every infinite ball has two disjoint infinite subballs.
    Condition 2: every infinite ball contains a ball of every occurring type.
    Both are decided on the symbol graph of the symbols occurring at proper balls.
    """
    tc = space.type_class
    fin = space.finite_symbols
    proper = space.proper_symbols
    infinite = [s for s in proper if s not in fin]
    report = CssStarReport(infinite_space=space.root not in fin)
    for s in infinite:
        if not any(sum(c not in fin for c in space.children[r]) >= 2 for r in space.reachable(s)):
            report.condition1_witness = s
            break
    for t in proper:
        for s in infinite:
            if not any(tc[r] == tc[t] for r in space.reachable(s)):
                report.condition2_witness = (t, s)
                break
        if report.condition2_witness:
            break
    return report


# probes --------------------------------------------------------------------------

def in_rigid_stabilizer(g: GroupElement, ball) -> bool:
    """Does g act as the identity on the ball?"""
    ball = parse_address(ball) if isinstance(ball, str) else ball
    return restrict_coset(g, ball) == CosetRep(ball, (Region(ball, ball, CANONICAL),))


def noncommuting_partner(g: GroupElement, ball) -> GroupElement:
    """h acting trivially on `ball` with [h, g] ≠ 1, for g moving a point outside `ball`."""
    space = g.space
    e = move_witness(g, outside=ball)
    outside = space.complement([ball])
    for _ in range(16):
        ge = apply(g, e)
        try:
            d = allocate_ball(space, space.type_of(e), within=outside, avoid=[e, ge])
            return swap_involution(space, e, d)
        except ConstructionError:
            e = e + (0,) if not space.is_terminal_ball(e) else e
    raise ConstructionError("no room for a non-commuting partner")


def centralizer_probe(space: SpacePresentation, ball, samples: int = 300, seed: int = 0) -> dict:
    ball = parse_address(ball) if isinstance(ball, str) else tuple(ball)
    if not ball:
        raise PresentationError("the whole space is not a proper ball")
    outside = space.complement([ball])
    pos_fail, neg_fail, skipped = [], [], 0
    for i in range(samples):
        rng = _rng(seed, i)
        h = random_element(space, rng, depth=len(ball) + 3, regions=rng.randint(2, 7), within=outside)
        g = random_element(space, rng, depth=len(ball) + 3, regions=rng.randint(2, 7), within=[ball])
        if not commutator(h, g).is_identity():
            pos_fail.append(i)
        for _ in range(20):
            g = random_element(space, rng, depth=len(ball) + 3, regions=rng.randint(3, 8))
            if not support_within(g, [ball]):
                break
        else:
            skipped += 1
            continue
        try:
            h = noncommuting_partner(g, ball)
        except ConstructionError:
            neg_fail.append(i)
            continue
        if not in_rigid_stabilizer(h, ball) or commutator(h, g).is_identity():
            neg_fail.append(i)
    return {"samples": samples, "positive_failures": len(pos_fail),
            "negative_failures": len(neg_fail), "negative_skipped": skipped,
            "failing_indices": pos_fail + neg_fail}


def _terminal_points(space, ball) -> list:
    """All ends of a finite ball, as terminal addresses."""
    out = []
    stack = [ball]
    while stack:
        a = stack.pop()
        if space.is_terminal_ball(a):
            out.append(a)
        else:
            stack.extend(space.child_addresses(a))
    return sorted(out)


def finite_support_points(g: GroupElement) -> set:
    space = g.space
    pts = set()
    for r in moving_regions(g):
        if not space.is_finite_ball(r.src):
            raise PresentationError("element does not have finite support")
        pts.update(_terminal_points(space, r.src))
    return pts


def _random_terminal(space, rng, max_depth, type_id=None):
    for _ in range(200):
        a = ROOT
        while not space.is_terminal_ball(a) and len(a) < max_depth:
            a = a + (rng.randrange(space.arity(a)),)
        if space.is_terminal_ball(a) and (type_id is None or space.type_of(a) == type_id):
            return a
    return None


def random_transposition(space, rng, max_depth=6):
    a = _random_terminal(space, rng, max_depth)
    if a is None:
        return None
    for _ in range(50):
        b = _random_terminal(space, rng, max_depth, space.type_of(a))
        if b is not None and b != a:
            return swap_involution(space, a, b)
    return None


def finite_support_probe(space: SpacePresentation, samples: int = 300, seed: int = 0) -> dict:
    """Closure, normality and type separation of the finitely supported elements."""
    if space.automaton is not None:
        raise Unsupported("finite support is not decided for decorated structures")
    terminals = [s for s in space.proper_symbols if s in space.terminals]
    if not terminals:
        return {"samples": samples, "lambda_trivial": True, "n": 0, "failures": 0}
    n = len({space.type_class[s] for s in terminals})
    failures = []
    for i in range(samples):
        rng = _rng(seed, i)
        hs = []
        for _ in range(2):
            h = GroupElement.identity(space)
            for _ in range(rng.randint(1, 3)):
                t = random_transposition(space, rng)
                if t is not None:
                    h = compose(t, h)
            hs.append(h)
        h1, h2 = hs
        ok = has_finite_support(compose(h1, h2)) and has_finite_support(inverse(h1))
        g = random_element(space, rng, depth=4, regions=rng.randint(2, 7))
        c = conjugate(h1, g)
        if ok and has_finite_support(c):
            gi = inverse(g)
            ok = finite_support_points(c) == {apply(gi, p) for p in finite_support_points(h1)}
        else:
            ok = False
        for h in (h1, h2, c):
            for r in moving_regions(h):
                src = _terminal_points(space, r.src)
                dst = [apply(h, p) for p in src]
                if any(space.type_of(a) != space.type_of(b) for a, b in zip(src, dst)):
                    ok = False
        if not ok:
            failures.append(i)
    return {"samples": samples, "lambda_trivial": False, "n": n, "failures": len(failures),
            "failing_indices": failures}


def malnormal_probe(space: SpacePresentation, ball, g: GroupElement, samples: int = 1000,
                    seed: int = 0) -> dict:
    """Sample f acting trivially on `ball`; flag f ≠ 1 with g⁻¹fg also trivial on it."""
    ball = parse_address(ball) if isinstance(ball, str) else tuple(ball)
    outside = space.complement([ball])
    bad, hits = [], 0
    for i in range(samples):
        rng = _rng(seed, i)
        if i % 10 == 0:
            f = GroupElement.identity(space)
        else:
            f = random_element(space, rng, depth=len(ball) + 3, regions=rng.randint(2, 8),
                               within=outside)
        if in_rigid_stabilizer(conjugate(f, g), ball):
            hits += 1
            if not f.is_identity():
                bad.append(f.to_doc())
    return {"samples": samples, "stabilized": hits, "counterexamples": len(bad),
            "witnesses": bad[:5]}


# fuzz harnesses ----------------------------------------------------------------------

def _sample(space, rng):
    return random_element(space, rng, depth=rng.randint(2, 5), regions=rng.randint(2, 8))


def group_law_fuzz(space: SpacePresentation, n: int = 1000, seed: int = 0) -> dict:
    """Associativity, inverse and identity laws on n seeded random triples."""
    e = GroupElement.identity(space)
    failures = []
    for i in range(n):
        rng = _rng(seed, i)
        f, g, h = (_sample(space, rng) for _ in range(3))
        ok = (compose(compose(f, g), h) == compose(f, compose(g, h))
              and compose(f, inverse(f)).is_identity()
              and compose(inverse(f), f).is_identity()
              and compose(e, f) == f and compose(f, e) == f)
        if not ok:
            failures.append(i)
    return {"n": n, "passed": n - len(failures), "failures": len(failures),
            "failing_indices": failures}


def normal_form_fuzz(space: SpacePresentation, n: int = 500, seed: int = 0) -> dict:
    """reduce is idempotent and blind to random refinements of the source partition."""
    from .element import reduce_regions, refine_noise
    failures = []
    for i in range(n):
        rng = _rng(seed, i)
        g = _sample(space, rng)
        noisy = refine_noise(g, rng, splits=rng.randint(1, 6))
        r1 = tuple(reduce_regions(space, noisy.regions))
        r2 = tuple(reduce_regions(space, r1))
        if r1 != g.reduce().regions or r2 != r1:
            failures.append(i)
    return {"n": n, "passed": n - len(failures), "failures": len(failures),
            "failing_indices": failures}


def cocycle_identity_fuzz(space: SpacePresentation, pairs: int = 500, seed: int = 0) -> dict:
    """b(gh) = b(g) + π(g)b(h) on seeded random pairs, as exact integer vectors."""
    from .cocycle import verify_cocycle_identity
    failures = []
    for i in range(pairs):
        rng = _rng(seed, i)
        g, h = _sample(space, rng), _sample(space, rng)
        if not verify_cocycle_identity(g, h):
            failures.append(i)
    return {"pairs": pairs, "passed": pairs - len(failures), "failures": len(failures),
            "failing_indices": failures}
