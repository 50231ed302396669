"""Explicit constructions of group elements.

Everything here is deterministic: when a construction needs a fresh ball it
takes the shallowest, leftmost ball of the required type that avoids the
constraint balls (see `allocate_ball`).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .element import (CosetRep, GroupElement, Region, apply, commutator, compose,
                      image_cells, inverse, match_cells, random_element, restrict_coset,
                      restrict_regions, ball_status, support_within)
from .errors import ConstructionError, PresentationError
from .simstruct import CANONICAL, SimLabel, inv_label, mul_labels, run_label
from .space import (ROOT, Address, SpacePresentation, comparable, format_address, is_prefix,
                    parse_address)

SEARCH_DEPTH = 24


def _addr(a) -> Address:
    return parse_address(a) if isinstance(a, str) else tuple(a)


def allocate_ball(space: SpacePresentation, type_id: int, within=None, avoid=(), proper=False,
                  points=(), max_depth: int = SEARCH_DEPTH) -> Address:
    """Shallowest, leftmost ball of a type class inside `within`, disjoint from `avoid`.

    `points` are long addresses standing for end points the ball must not contain.
    `proper` excludes the `within` balls themselves.  The root is never returned.
    """
    starts = [ROOT] if within is None else sorted(set(within))
    avoid = list(avoid)
    frontier = list(starts)
    limit = max(len(s) for s in starts) + max_depth
    while frontier:
        nxt = []
        for a in sorted(frontier):
            if any(is_prefix(v, a) for v in avoid):
                continue
            ok = (a != ROOT and not (proper and a in starts)
                  and space.type_of(a) == type_id
                  and not any(is_prefix(v, a) or is_prefix(a, v) for v in avoid)
                  and not any(is_prefix(a, p) for p in points))
            if ok:
                return a
            if len(a) < limit:
                nxt.extend(space.child_addresses(a))
        frontier = nxt
    raise ConstructionError("no ball of the required type is available")


def clopen_subset(space: SpacePresentation, xs, ys) -> bool:
    """Is the union of balls xs contained in the union of balls ys?"""
    ys = list(ys)
    for x in xs:
        if any(is_prefix(y, x) for y in ys):
            continue
        below = [y for y in ys if is_prefix(x, y)]
        if not below or not space.covers(below, [x]):
            return False
    return True


def _normalize_cells(cells) -> list:
    cells = sorted(set(_addr(c) for c in cells))
    return [c for c in cells if not any(is_prefix(d, c) and d != c for d in cells)]


# extension property -------------------------------------------------------------

def extend_partial(space: SpacePresentation, pairs, within=None) -> GroupElement:
    """An element restricting to the given similarities B_i -> D_i.

    pairs: (B, D) or (B, D, label).  With `within` (a list of balls) the element
    is the identity outside their union.
    """
    norm = []
    for p in pairs:
        b, d = _addr(p[0]), _addr(p[1])
        lab = p[2] if len(p) > 2 else CANONICAL
        if not isinstance(lab, SimLabel):
            lab = space.automaton.label(lab["state"]) if isinstance(lab, dict) else CANONICAL
        if space.type_of(b) != space.type_of(d):
            raise PresentationError(
                f"no similarity {format_address(b)} -> {format_address(d)}: types differ")
        norm.append((b, d, lab))
    universe = [ROOT] if within is None else _normalize_cells(within)
    bs = [b for b, _, _ in norm]
    ds = [d for _, d, _ in norm]
    for fam, what in ((bs, "source"), (ds, "target")):
        for i, x in enumerate(fam):
            if any(comparable(x, y) for y in fam[i + 1:]):
                raise PresentationError(f"{what} balls are not pairwise disjoint")
        if not clopen_subset(space, fam, universe):
            raise PresentationError(f"{what} balls leave the allowed region")
        if fam and clopen_subset(space, universe, fam):
            raise PresentationError(f"{what} balls cover the whole region")
    outside = [Region(c, c, CANONICAL) for c in space.complement(universe)] if within else []
    if all(b == d or not comparable(b, d) for b in bs for d in ds):
        regs = _chain_regions(space, norm)
    else:
        try:
            regs = list(Region(b, d, lab) for b, d, lab in norm)
            p = space.complement(bs, universe)
            q = space.complement(ds, universe)
            regs += [Region(s, t, CANONICAL) for s, t in match_cells(space, p, q)]
        except ConstructionError:
            return _two_step(space, norm, universe, within)
    g = GroupElement.from_regions(space, regs + outside)
    return g.reduce()


def _chain_regions(space, norm) -> list:
    """Sources and targets equal or disjoint: close every chain B -> D = B' -> ... back."""
    aut = space.automaton
    step = {b: (d, lab) for b, d, lab in norm}
    targets = {d for _, d, _ in norm}
    regs = [Region(b, d, lab) for b, d, lab in norm]
    for b, _, _ in norm:
        if b in targets:
            continue
        cur, comp = b, CANONICAL
        while cur in step:
            nxt, lab = step[cur]
            comp = mul_labels(aut, lab, comp)
            cur = nxt
        regs.append(Region(cur, b, inv_label(aut, comp)))
    touched = [r.src for r in regs]
    regs += [Region(c, c, CANONICAL) for c in space.complement(touched)]
    return regs


def _two_step(space, norm, universe, within) -> GroupElement:
    # park every source ball in a free auxiliary ball, then move it to its target
    used = [b for b, _, _ in norm] + [d for _, d, _ in norm]
    park = []
    for b, _, _ in norm:
        try:
            e = allocate_ball(space, space.type_of(b), within=universe, avoid=used)
        except ConstructionError:
            raise ConstructionError("overlap unresolvable: no free auxiliary ball") from None
        used.append(e)
        park.append(e)
    first = extend_partial(space, [(b, e, CANONICAL) for (b, _, _), e in zip(norm, park)], within)
    second = extend_partial(space, [(e, d, lab) for (_, d, lab), e in zip(norm, park)], within)
    return compose(second, first)


def swap_involution(space: SpacePresentation, b, d) -> GroupElement:
    """Involution exchanging b with the leftmost ball of its type inside d."""
    b, d = _addr(b), _addr(d)
    if comparable(b, d):
        raise PresentationError("balls must be disjoint")
    d0 = allocate_ball(space, space.type_of(b), within=[d])
    return extend_partial(space, [(b, d0, CANONICAL)])


# witnesses built from a given element -----------------------------------------------

def _identity_error(g):
    if g.is_identity():
        raise PresentationError("the identity moves no ball")


def move_witness(g: GroupElement, infinite: bool = False, outside=None,
                 max_depth: int = 12) -> Address:
    """A ball B inside one region with g(B) disjoint from B.

    Regions are scanned in order; inside each, suffixes are tried shallowest first.
    `outside` restricts the search to balls disjoint from the given ball.
    """
    g = g.reduce()
    _identity_error(g)
    space = g.space
    aut = space.automaton
    for r in g.regions:
        if r.src == r.dst and r.label.state is None:
            continue
        if outside is not None and is_prefix(outside, r.src):
            continue
        for a in space.bfs(r.src, max_depth):
            if outside is not None and comparable(a, outside):
                continue
            if infinite and space.is_finite_ball(a):
                continue
            img, _ = run_label(aut, r.label, a[len(r.src):])
            if not comparable(a, r.dst + img):
                return a
    raise ConstructionError("no moved ball found within the search depth")


def split_small_support(g: GroupElement) -> tuple:
    """(h1, h2) with h1·h2 = g, each supported in a proper clopen set."""
    g = g.reduce()
    _identity_error(g)
    space = g.space
    b = move_witness(g)
    while not space.complement([b, apply(g, b)]):
        b = b + (0,)
    gb = apply(g, b)
    lab = restrict_regions(space, g.regions, b)[0].label
    h1 = extend_partial(space, [(b, gb, lab)])
    h2 = compose(h1, g)   # h1 is an involution
    return h1, h2


def vigorous_witness(space: SpacePresentation, a_cells, b_cells, c_cells) -> GroupElement:
    """g supported in A with g(B) inside C."""
    if any(s in space.finite_symbols for s in space.proper_symbols):
        raise ConstructionError("the space has finite balls")
    A, B, C = (_normalize_cells(x) for x in (a_cells, b_cells, c_cells))
    if not B or not C:
        raise PresentationError("B and C must be nonempty")
    for x, name in ((B, "B"), (C, "C")):
        if not clopen_subset(space, x, A) or clopen_subset(space, A, x):
            raise PresentationError(f"{name} must be a proper clopen subset of A")
    if clopen_subset(space, B, C):
        if clopen_subset(space, C, B):
            return GroupElement.identity(space)
    room = space.complement(B, C)
    chosen = []
    try:
        if not room:
            raise ConstructionError("C lies inside B")
        for b in B:
            chosen.append(allocate_ball(space, space.type_of(b), within=room, avoid=chosen))
    except ConstructionError:
        chosen = []
        for b in B:
            chosen.append(allocate_ball(space, space.type_of(b), within=C, avoid=chosen,
                                        proper=True))
    g = extend_partial(space, list(zip(B, chosen)), within=A)
    if not support_within(g, A) or not clopen_subset(space, image_cells(g, B), C):
        raise ConstructionError("vigorous witness failed its own check")
    return g


# ping-pong ----------------------------------------------------------------------------

@dataclass
class PingPong:
    g: GroupElement
    h: GroupElement
    balls: dict   # names B1+, B1-, B2+, B2- -> address


def _four_balls(space) -> list:
    for k in range(1, 10):
        cells = [c for c in space.leaves(ROOT, k) if not space.is_finite_ball(c)]
        if len(cells) >= 4:
            return cells[:4]
    raise ConstructionError("fewer than four disjoint infinite balls")


def typed_balls_inside(space: SpacePresentation, ball, types) -> list:
    """Pairwise disjoint proper subballs of `ball` with the given type classes.

    The subballs never fill `ball`: one infinite piece is left over.
    """
    pieces = disjoint_infinite_balls(space, space.child_addresses(ball), len(types) + 1)
    return [allocate_ball(space, t, within=[p]) for p, t in zip(pieces, types)]


def pingpong_pair(space: SpacePresentation, seed: int = 0) -> PingPong:
    four = _four_balls(space)
    if seed:
        random.Random(seed).shuffle(four)
    p1, m1, p2, m2 = four
    ty = space.type_of
    # generator for index 1: three pieces inside B1+ and B1-
    pa, pb, pc = typed_balls_inside(space, p1, [ty(p1), ty(m2), ty(p2)])
    ma, mb, mc = typed_balls_inside(space, m1, [ty(m1), ty(m2), ty(p2)])
    g = extend_partial(space, [(p1, pa), (m2, pb), (p2, pc), (ma, m1), (mb, m2), (mc, p2)])
    # generator for index 2: pieces inside B2+ and B2-
    qa, qb, qc = typed_balls_inside(space, p2, [ty(m1), ty(p1), ty(p2)])
    na, nb, nc = typed_balls_inside(space, m2, [ty(m1), ty(p1), ty(m2)])
    h = extend_partial(space, [(m1, qa), (p1, qb), (p2, qc), (na, m1), (nb, p1), (nc, m2)])
    return PingPong(g, h, {"B1+": p1, "B1-": m1, "B2+": p2, "B2-": m2})


def pingpong_containment(pp: PingPong) -> list:
    """Names of the violated containments (empty when the table is right)."""
    b = pp.balls
    space = pp.g.space
    checks = [
        ("g(C1+) in B1+", pp.g, [b["B1+"], b["B2+"], b["B2-"]], b["B1+"]),
        ("g^-1(C1-) in B1-", inverse(pp.g), [b["B1-"], b["B2+"], b["B2-"]], b["B1-"]),
        ("h(C2+) in B2+", pp.h, [b["B2+"], b["B1+"], b["B1-"]], b["B2+"]),
        ("h^-1(C2-) in B2-", inverse(pp.h), [b["B2-"], b["B1+"], b["B1-"]], b["B2-"]),
    ]
    return [name for name, el, cells, tgt in checks
            if not clopen_subset(space, image_cells(el, cells), [tgt])]


def reduced_words(maxlen: int):
    """All nonempty reduced words over g, G=g⁻¹, h, H=h⁻¹ up to length maxlen."""
    inv = {"g": "G", "G": "g", "h": "H", "H": "h"}

    def grow(word):
        yield word
        if len(word) < maxlen:
            for x in "gGhH":
                if inv[x] != word[-1]:
                    yield from grow(word + x)

    for x in "gGhH":
        yield from grow(x)


def verify_words(pp: PingPong, maxlen: int = 8) -> dict:
    gens = {"g": pp.g, "G": inverse(pp.g), "h": pp.h, "H": inverse(pp.h)}
    counts = {}
    trivial = []
    stack = [(x, gens[x]) for x in "HhGg"]
    inv = {"g": "G", "G": "g", "h": "H", "H": "h"}
    while stack:
        word, el = stack.pop()
        counts[len(word)] = counts.get(len(word), 0) + 1
        if el.is_identity():
            trivial.append(word)
        if len(word) < maxlen:
            for x in "HhGg":
                if inv[x] != word[-1]:
                    stack.append((word + x, compose(el, gens[x])))
    return {"words": sum(counts.values()), "by_length": dict(sorted(counts.items())),
            "identity_words": trivial}


# paradoxical decomposition -------------------------------------------------------------

@dataclass
class ParadoxData:
    space: SpacePresentation
    base: Address
    balls: list          # infinite minimal-partition balls B_i, in order
    subballs: list       # (B_i1, B_i2) per ball
    g: list              # g_i carries B_i1 onto B_i
    h: list              # h_i carries B_i2 onto B_i

    @property
    def strata(self) -> list:
        return [(i + 1, j) for i in range(len(self.balls)) for j in (1, 2, 3)]


def paradox_data(space: SpacePresentation) -> ParadoxData:
    balls = [c for c in space.child_addresses(ROOT) if not space.is_finite_ball(c)]
    if not balls:
        raise ConstructionError("no infinite minimal-partition ball")
    subs, gs, hs = [], [], []
    for b in balls:
        t = space.type_of(b)
        b1 = allocate_ball(space, t, within=[b], proper=True)
        b2 = allocate_ball(space, t, within=[b], avoid=[b1], proper=True)
        subs.append((b1, b2))
        gs.append(extend_partial(space, [(b1, b)]))
        hs.append(extend_partial(space, [(b2, b)]))
    return ParadoxData(space, balls[0], balls, subs, gs, hs)


def leftmost_infinite_cell(f, ball, space: SpacePresentation | None = None) -> tuple:
    """(D_f, f(D_f)): leftmost infinite maximal cell of f clipped to `ball`.

    f is a GroupElement, or a CosetRep together with its space.
    """
    ball = _addr(ball)
    if isinstance(f, CosetRep):
        if f.base != ball:
            raise PresentationError("coset representative has a different base ball")
        if space is None:
            raise PresentationError("a coset representative needs its space")
        return _leftmost(space, f)
    return _leftmost(f.space, restrict_coset(f, ball))


def _leftmost(space, rep: CosetRep) -> tuple:
    for r in rep.regions:
        if not space.is_finite_ball(r.src):
            return r.src, r.dst
    raise ConstructionError("no infinite cell in the restriction")


def _locate(data, img, exact=True):
    """Stratum of a ball image, or None when the ball straddles a boundary."""
    for i, b in enumerate(data.balls):
        if is_prefix(b, img):
            b1, b2 = data.subballs[i]
            if is_prefix(b1, img):
                return (i + 1, 1)
            if is_prefix(b2, img):
                return (i + 1, 3)
            if not exact and (is_prefix(img, b1) or is_prefix(img, b2)):
                return None
            return (i + 1, 2)
    if not exact and any(is_prefix(img, b) for b in data.balls):
        return None
    raise ConstructionError(
        f"internal invariant violated: image {format_address(img)!r} is not in an infinite "
        "minimal-partition ball")


def anchor_point(space: SpacePresentation, ball: Address, length: int) -> Address:
    """Prefix of the leftmost non-isolated end of `ball`."""
    a = ball
    while len(a) < length:
        kids = [c for c in space.child_addresses(a) if not space.is_finite_ball(c)]
        a = kids[0]
    return a


def classify_stratum(data: ParadoxData, f, anchor: str = "cell") -> tuple:
    """Stratum (i, j) of the coset fΓ_B.

    anchor="cell" locates f(D_f) for the leftmost infinite maximal cell D_f.
    anchor="point" locates f(x0) for the leftmost non-isolated end x0 of the base ball.
    """
    space = data.space
    rep = f if isinstance(f, CosetRep) else restrict_coset(f, data.base)
    if anchor == "cell":
        _, img = _leftmost(space, rep)
        return _locate(data, img)
    if anchor != "point":
        raise PresentationError(f"unknown anchor {anchor!r}")
    index = {r.src: r for r in rep.regions}
    depth = max(len(r.src) for r in rep.regions) + 1
    while True:
        x = anchor_point(space, data.base, depth)
        r = next((index[x[:k]] for k in range(len(x) + 1) if x[:k] in index), None)
        if r is not None:
            img, _ = run_label(space.automaton, r.label, x[len(r.src):])
            got = _locate(data, r.dst + img, exact=False)
            if got is not None:
                return got
        depth += 1


def _random_ball_in(space, rng, cells, type_id, extra=3):
    cand = []
    for c in cells:
        for a in space.bfs(c, extra):
            if a and space.type_of(a) == type_id:
                cand.append(a)
    return rng.choice(cand) if cand else None


def _stratum_region(data, i, j) -> list:
    b = data.balls[i]
    b1, b2 = data.subballs[i]
    if j == 1:
        return [b1]
    if j == 3:
        return [b2]
    return [b] + data.space.complement([b1, b2], [b])


def verify_paradox(data: ParadoxData, samples: int = 200, seed: int = 0, pairs: int = 50,
                   max_witnesses: int = 5, anchor: str = "cell") -> dict:
    """Check the translate identities on sampled elements of every stratum."""
    space = data.space
    rng = random.Random(seed)

    def classify(x):
        return classify_stratum(data, x, anchor)

    buckets = {s: [] for s in data.strata}
    attempts = stall = 0
    limit = samples * len(buckets) * 30
    while (attempts < limit and stall < 20 * samples
           and any(len(v) < samples for v in buckets.values())):
        attempts += 1
        stall += 1
        f = random_element(space, rng, depth=rng.randint(2, 5), regions=rng.randint(2, 8))
        if attempts % 2 == 0:
            # steer the leftmost cell into a chosen stratum
            want = rng.choice([s for s, v in buckets.items() if len(v) < samples])
            _, img = _leftmost(space, restrict_coset(f, data.base))
            if anchor == "point":
                img = restrict_coset(f, data.base).regions[0].dst
            region = _stratum_region(data, want[0] - 1, want[1])
            tgt = _random_ball_in(space, rng, region, space.type_of(img))
            if tgt is not None and tgt != img:
                try:
                    f = compose(extend_partial(space, [(img, tgt)]), f)
                except (ConstructionError, PresentationError):
                    pass
        s = classify(f)
        if len(buckets[s]) < samples:
            buckets[s].append(f)
            stall = 0
    violations = []
    count = 0

    def flag(check, f, got):
        nonlocal count
        count += 1
        if len(violations) < max_witnesses:
            violations.append({"check": check, "element": f.to_doc(), "got": list(got)})

    for (i, j), fs in buckets.items():
        g, h = data.g[i - 1], data.h[i - 1]
        gi, hi = inverse(g), inverse(h)
        for f in fs:
            if j == 1:
                got = classify(compose(g, f))
                if got[0] != i:
                    flag(f"g_{i} maps C_{i}^1 outside C_{i}", f, got)
            got = classify(compose(gi, f))
            if got != (i, 1):
                flag(f"g_{i}^-1 maps C_{i}^{j} outside C_{i}^1", f, got)
            if j == 3:
                got = classify(compose(h, f))
                if got[0] != i:
                    flag(f"h_{i} maps C_{i}^3 outside C_{i}", f, got)
            got = classify(compose(hi, f))
            if got != (i, 3):
                flag(f"h_{i}^-1 maps C_{i}^{j} outside C_{i}^3", f, got)
    coset_bad = 0
    outside = space.complement([data.base])
    for _ in range(pairs):
        f1 = random_element(space, rng, depth=4, regions=rng.randint(2, 8))
        k = random_element(space, rng, depth=4, regions=rng.randint(2, 6), within=outside)
        f2 = compose(f1, k)
        if (restrict_coset(f1, data.base) != restrict_coset(f2, data.base)
                or classify(f1) != classify(f2)):
            coset_bad += 1
    return {
        "strata": {f"{i},{j}": len(v) for (i, j), v in buckets.items()},
        "short_strata": [f"{i},{j}" for (i, j), v in buckets.items() if len(v) < samples],
        "violations": count,
        "witnesses": violations,
        "coset_pairs": pairs,
        "coset_violations": coset_bad,
    }


# ICC, malnormality, unbounded cocycle, commutators ------------------------------------

def _leftmost_path(space, ball, length) -> Address:
    a = ball
    while len(a) < length and not space.is_terminal_ball(a):
        a = a + (0,)
    return a


def icc_conjugates(f: GroupElement, n: int) -> list:
    """n pairwise distinct conjugates h f h of f by involutions h.

    With b moved off itself by f and h_k swapping b with a fresh ball b_k,
    the k-th conjugate is the only one sending b_k onto f(b).
    """
    f = f.reduce()
    _identity_error(f)
    space = f.space
    b = move_witness(f)
    # shrink the witness so that an infinite ball fits beside b and f(b)
    b = _leftmost_path(space, b, len(b) + 2)
    used = [b, apply(f, b)]
    spare = next((a for a in space.bfs(ROOT, SEARCH_DEPTH)
                  if a and not space.is_finite_ball(a)
                  and not any(comparable(a, u) for u in used)), None)
    if spare is None:
        raise ConstructionError("no infinite ball away from the witness")
    t = space.type_of(b)
    if space.is_finite_ball(b):
        copies = []
        for _ in range(n):
            copies.append(allocate_ball(space, t, within=[spare], avoid=copies,
                                        max_depth=SEARCH_DEPTH + 2 * n))
    else:
        copies = typed_balls_inside(space, spare, [t] * n)
    out = []
    for bk in copies:
        hk = swap_involution(space, b, bk)
        out.append(compose(hk, compose(f, hk)))
    return out


def malnormal_witness(space: SpacePresentation, ball) -> GroupElement:
    """Involution swapping each other minimal-partition piece with a ball inside `ball`."""
    ball = _addr(ball)
    if not ball:
        raise PresentationError("the whole space is not a proper ball")
    if space.is_finite_ball(ball):
        raise PresentationError("the ball must be infinite")
    rest = space.complement([ball])
    inside = typed_balls_inside(space, ball, [space.type_of(c) for c in rest])
    return extend_partial(space, list(zip(rest, inside)))


def disjoint_infinite_balls(space: SpacePresentation, cells, k: int, max_depth: int = 64) -> list:
    """k pairwise disjoint infinite balls inside the given cells (a comb)."""
    pool = [c for c in sorted(cells) if not space.is_finite_ball(c)]
    out = []
    while len(out) < k:
        if not pool:
            raise ConstructionError("not enough disjoint infinite balls")
        c = pool.pop(0)
        if not pool and len(out) < k - 1:
            if len(c) > max_depth:
                raise ConstructionError("not enough disjoint infinite balls")
            pool = [a for a in space.child_addresses(c) if not space.is_finite_ball(a)]
            continue
        out.append(c)
    return out


def unbounded_sequence(space: SpacePresentation, ball, n: int) -> GroupElement:
    """f_n: n swapped ball pairs away from `ball` plus a nested shift inside it."""
    ball = _addr(ball)
    if not ball or space.is_finite_ball(ball):
        raise PresentationError("need a proper infinite ball")
    if n < 1:
        raise PresentationError("n must be positive")
    t = space.type_of(ball)
    chain = [allocate_ball(space, t, within=[ball], proper=True)]
    while len(chain) <= n:
        chain.append(allocate_ball(space, t, within=[chain[-1]], proper=True))
    comb = disjoint_infinite_balls(space, space.complement([ball]), 2 * n)
    pairs = []
    for i in range(n):
        b, c = comb[2 * i], comb[2 * i + 1]
        a = allocate_ball(space, space.type_of(b), within=[c])
        pairs += [(b, a), (a, b)]
    pairs.append((chain[n - 1], chain[n]))
    return extend_partial(space, pairs)


@dataclass
class SeparationWitness:
    commutator: GroupElement
    ball: Address      # moved by the commutator
    image: Address     # g(ball), fixed by the commutator


def commutator_separation_witness(g: GroupElement) -> SeparationWitness:
    g = g.reduce()
    _identity_error(g)
    space = g.space
    if any(s in space.finite_symbols for s in space.proper_symbols):
        raise ConstructionError("the space has finite balls")
    b = move_witness(g)
    for _ in range(SEARCH_DEPTH):
        c = apply(g, b)
        try:
            d1 = allocate_ball(space, space.type_of(b), avoid=[b, c])
            d2 = allocate_ball(space, space.type_of(b), avoid=[b, c, d1])
            break
        except ConstructionError:
            b = b + (0,)
    else:
        raise ConstructionError("no room for the auxiliary balls")
    h1 = swap_involution(space, b, d1)
    h2 = swap_involution(space, b, d2)
    f = commutator(h1, h2)
    if ball_status(f, b) != "moved" or ball_status(f, c) != "fixed":
        raise ConstructionError("separation certificate failed")
    return SeparationWitness(f, b, c)
