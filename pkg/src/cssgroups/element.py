"""Group elements as matched ball partitions with similarity labels.

An element is a list of regions ``(src, dst, label)``: the ball ``src`` is
carried onto the ball ``dst`` by the similarity ``label``.  Sources partition
the space, and so do targets.  The reduced form merges sibling regions until
no family can be merged; its sources are the maximal regions of the element,
so equal elements have equal reduced forms.
"""

from __future__ import annotations

import heapq
import json
import random
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

from .errors import ConstructionError, InsufficientDepth, PresentationError, Unsupported
from .simstruct import (CANONICAL, SimLabel, inv_label, label_from_doc, mul_labels,
                        run_label)
from .space import (ROOT, Address, SpacePresentation, comparable, format_address,
                    is_prefix, load_space, parse_address)


class Region(NamedTuple):
    src: Address
    dst: Address
    label: SimLabel = CANONICAL

    def to_doc(self):
        return {"src": format_address(self.src), "dst": format_address(self.dst),
                "label": self.label.to_doc()}


# region-list algebra ------------------------------------------------------

def _container(index: dict, addr: Address):
    for k in range(len(addr) + 1):
        r = index.get(addr[:k])
        if r is not None:
            return r
    return None


def _below(srcs: list, addr: Address):
    i = bisect_left(srcs, addr)
    while i < len(srcs) and is_prefix(addr, srcs[i]):
        yield srcs[i]
        i += 1


def compose_regions(space: SpacePresentation, outer, inner) -> list:
    """Regions of outer∘inner (inner applied first), not reduced.

    The image of every inner region must be covered by outer sources.
    """
    aut = space.automaton
    index = {r.src: r for r in outer}
    srcs = None
    out = []
    for s, t, lab in inner:
        r = _container(index, t)
        if r is not None:
            img, sub = run_label(aut, r.label, t[len(r.src):])
            out.append(Region(s, r.dst + img, mul_labels(aut, sub, lab)))
            continue
        if srcs is None:
            srcs = sorted(index)
        inv = inv_label(aut, lab)
        hit = False
        for src in _below(srcs, t):
            hit = True
            v, _ = run_label(aut, inv, src[len(t):])
            _, lv = run_label(aut, lab, v)
            r = index[src]
            out.append(Region(s + v, r.dst, mul_labels(aut, r.label, lv)))
        if not hit:
            raise PresentationError(f"ball {format_address(t)!r} is outside the outer map")
    return out


def invert_regions(space: SpacePresentation, regions) -> list:
    aut = space.automaton
    return [Region(t, s, inv_label(aut, lab)) for s, t, lab in regions]


def reduce_regions(space: SpacePresentation, regions, floor: Address = ROOT) -> list:
    """Merge complete sibling families bottom-up; never merge above `floor`."""
    aut = space.automaton
    table = {r.src: (r.dst, r.label) for r in regions}
    heap = []
    queued = set()
    for src in table:
        if len(src) > len(floor):
            p = src[:-1]
            if p not in queued:
                queued.add(p)
                heapq.heappush(heap, (-len(p), p))
    while heap:
        _, p = heapq.heappop(heap)
        k = space.arity(p)
        parts = []
        for i in range(k):
            entry = table.get(p + (i,))
            if entry is None or not entry[0]:
                break
            parts.append(entry)
        if len(parts) != k:
            continue
        w = parts[0][0][:-1]
        if any(dst[:-1] != w for dst, _ in parts):
            continue
        perm = tuple(dst[-1] for dst, _ in parts)
        if aut is None:
            if perm != tuple(range(k)) or any(lab.state is not None for _, lab in parts):
                continue
            label = CANONICAL
        else:
            state = aut.by_action.get((perm, tuple(aut.state(lab) for _, lab in parts)))
            if state is None:
                continue
            label = aut.label(state)
        if space.type_of(p) != space.type_of(w):
            continue
        for i in range(k):
            del table[p + (i,)]
        table[p] = (w, label)
        if len(p) > len(floor):
            q = p[:-1]
            if q not in queued:
                queued.add(q)
                heapq.heappush(heap, (-len(q), q))
    return [Region(s, d, lab) for s, (d, lab) in sorted(table.items())]


def restrict_regions(space: SpacePresentation, regions, ball: Address) -> list:
    """The part of a region list lying over `ball` (clipping a region that contains it)."""
    index = {r.src: r for r in regions}
    r = _container(index, ball)
    if r is not None:
        img, sub = run_label(space.automaton, r.label, ball[len(r.src):])
        return [Region(ball, r.dst + img, sub)]
    return [index[s] for s in _below(sorted(index), ball)]


def split_region(space: SpacePresentation, region: Region) -> list:
    """Replace one region by its restrictions to the children of its source."""
    aut = space.automaton
    out = []
    for i in range(space.arity(region.src)):
        (j,), sub = run_label(aut, region.label, (i,))
        out.append(Region(region.src + (i,), region.dst + (j,), sub))
    return out


def regions_key(space: SpacePresentation, regions) -> tuple:
    """Total order on region lists, used to pick canonical representatives."""
    aut = space.automaton
    if aut is None:
        return tuple((s, d) for s, d, _ in regions)
    return tuple((s, d, aut.order[aut.state(lab)]) for s, d, lab in regions)


# elements -------------------------------------------------------------------

class GroupElement:
    """A homeomorphism of the space pasted from finitely many similarities."""

    __slots__ = ("space", "regions", "reduced", "_nf", "_hash")

    def __init__(self, space: SpacePresentation, regions, reduced: bool = False):
        self.space = space
        self.regions = tuple(sorted(regions))
        self.reduced = reduced
        self._nf = self if reduced else None
        self._hash = None

    # construction

    @classmethod
    def from_regions(cls, space: SpacePresentation, regions) -> "GroupElement":
        regs = []
        for r in regions:
            if isinstance(r, Region):
                regs.append(r)
            else:
                src, dst, *rest = r
                lab = rest[0] if rest else CANONICAL
                if not isinstance(lab, SimLabel):
                    lab = label_from_doc(lab, space)
                src = parse_address(src) if isinstance(src, str) else tuple(src)
                dst = parse_address(dst) if isinstance(dst, str) else tuple(dst)
                regs.append(Region(src, dst, lab))
        if not space.covers([r.src for r in regs]):
            raise PresentationError("sources do not form a partition")
        if not space.covers([r.dst for r in regs]):
            raise PresentationError("targets do not form a partition")
        for r in regs:
            if space.type_of(r.src) != space.type_of(r.dst):
                raise PresentationError(
                    f"type mismatch on region {format_address(r.src)}->{format_address(r.dst)}")
            if r.label.state is not None:
                if space.automaton is None:
                    raise PresentationError("decorated label on a space without an automaton")
                space.automaton.label(r.label.state)
        return cls(space, regs)

    @classmethod
    def identity(cls, space: SpacePresentation) -> "GroupElement":
        return cls(space, [Region(ROOT, ROOT, CANONICAL)], reduced=True)

    # normal form and equality

    def reduce(self) -> "GroupElement":
        if self._nf is None:
            self._nf = GroupElement(self.space, reduce_regions(self.space, self.regions), True)
        return self._nf

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.space == other.space and self.reduce().regions == other.reduce().regions

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.reduce().regions)
        return self._hash

    def is_identity(self) -> bool:
        return self.reduce().regions == ((ROOT, ROOT, CANONICAL),)

    # arithmetic

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return compose(self, other)

    def inverse(self) -> "GroupElement":
        return inverse(self)

    def __pow__(self, n: int) -> "GroupElement":
        base = self if n >= 0 else self.inverse()
        out = GroupElement.identity(self.space)
        for _ in range(abs(n)):
            out = out * base
        return out

    def apply(self, addr) -> Address:
        return apply(self, addr)

    # serialization

    def to_doc(self) -> dict:
        return {"space": self.space.name, "regions": [r.to_doc() for r in self.regions]}

    def __repr__(self):
        body = ", ".join(f"{format_address(s) or 'X'}->{format_address(d) or 'X'}"
                         + ("" if lab.state is None else f"[{lab.state}]")
                         for s, d, lab in self.regions)
        return f"GroupElement({body})"

    @property
    def sources(self) -> list:
        return [r.src for r in self.regions]

    @property
    def targets(self) -> list:
        return sorted(r.dst for r in self.regions)


def identity(space: SpacePresentation) -> GroupElement:
    return GroupElement.identity(space)


def from_regions(space: SpacePresentation, regions) -> GroupElement:
    return GroupElement.from_regions(space, regions)


def _same_space(g, f):
    if g.space is not f.space and g.space != f.space:
        raise PresentationError("elements live on different spaces")


def compose(g: GroupElement, f: GroupElement) -> GroupElement:
    """g∘f: apply f first."""
    _same_space(g, f)
    regs = compose_regions(g.space, g.regions, f.regions)
    return GroupElement(g.space, reduce_regions(g.space, regs), reduced=True)


def inverse(g: GroupElement) -> GroupElement:
    g = g.reduce()
    return GroupElement(g.space, invert_regions(g.space, g.regions), reduced=True)


def reduce(g: GroupElement) -> GroupElement:
    return g.reduce()


def equals(g: GroupElement, h: GroupElement) -> bool:
    _same_space(g, h)
    return g == h


def conjugate(g: GroupElement, h: GroupElement) -> GroupElement:
    """h⁻¹ g h."""
    return compose(inverse(h), compose(g, h))


def commutator(g: GroupElement, h: GroupElement) -> GroupElement:
    """g⁻¹ h⁻¹ g h."""
    return compose(compose(inverse(g), inverse(h)), compose(g, h))


def apply(g: GroupElement, addr) -> Address:
    if isinstance(addr, str):
        addr = parse_address(addr)
    space = g.space
    if not space.is_valid(addr):
        raise PresentationError(f"invalid address {format_address(addr)!r}")
    index = {r.src: r for r in g.regions}
    r = _container(index, addr)
    if r is None:
        raise InsufficientDepth(f"ball {format_address(addr) or 'X'!r} spans several regions")
    img, _ = run_label(space.automaton, r.label, addr[len(r.src):])
    return r.dst + img


def image_cells(g: GroupElement, cells) -> list:
    """Ball cover of the image of a union of balls."""
    out = []
    for c in cells:
        out.extend(r.dst for r in restrict_regions(g.space, g.regions, c))
    return sorted(out)


# support --------------------------------------------------------------------

def _fixable_states(aut) -> frozenset:
    """States fixing at least one end (an infinite path of fixed letters)."""
    alive = set(aut.states)
    while True:
        keep = {q for q in alive
                if any(aut.perm[q][u] == u and aut.section[q][u] in alive
                       for u in range(aut.degree))}
        if keep == alive:
            return frozenset(alive)
        alive = keep


def _piece_status(space, r: Region) -> str:
    if r.src == r.dst:
        if r.label.state is None:
            return "fixed"
        return "mixed" if r.label.state in _fixable_states(space.automaton) else "moved"
    if comparable(r.src, r.dst):
        return "mixed"   # a contraction or expansion fixes exactly one end
    return "moved"


def ball_status(g: GroupElement, addr: Address) -> str:
    pieces = restrict_regions(g.space, g.regions, addr)
    found = {_piece_status(g.space, r) for r in pieces}
    return found.pop() if len(found) == 1 else "mixed"


def support(g: GroupElement, depth: int) -> dict:
    """Status (fixed, moved or mixed) of every ball at the given depth."""
    g = g.reduce()
    return {a: ball_status(g, a) for a in g.space.leaves(ROOT, depth)}


def moving_regions(g: GroupElement) -> list:
    """Reduced regions on which g is not the identity; their union is the support closure."""
    return [r for r in g.reduce().regions if r.src != r.dst or r.label.state is not None]


def support_within(g: GroupElement, cells) -> bool:
    """True when g fixes every point outside the union of `cells`."""
    g = g.reduce()
    return all(ball_status(g, c) == "fixed" for c in g.space.complement(cells))


def has_finite_support(g: GroupElement) -> bool:
    if g.space.automaton is not None:
        raise Unsupported("finite support is not decided for decorated structures")
    return all(g.space.is_finite_ball(r.src) for r in moving_regions(g))


# cosets of rigid stabilizers ----------------------------------------------

@dataclass(frozen=True)
class CosetRep:
    """The restriction of an element to a ball; it determines the coset fΓ_B."""
    base: Address
    regions: tuple

    def to_doc(self):
        return {"base": format_address(self.base), "regions": [r.to_doc() for r in self.regions]}


def restrict_coset(g: GroupElement, ball) -> CosetRep:
    if isinstance(ball, str):
        ball = parse_address(ball)
    if not ball:
        raise PresentationError("the whole space is not a proper ball")
    regs = restrict_regions(g.space, g.regions, ball)
    return CosetRep(ball, tuple(reduce_regions(g.space, regs, floor=ball)))


def coset_equals(r1: CosetRep, r2: CosetRep) -> bool:
    return r1 == r2


# random elements --------------------------------------------------------------

def random_partition(space: SpacePresentation, rng: random.Random, cells, count: int,
                     max_depth: int) -> list:
    cells = list(cells)
    while len(cells) < count:
        cand = [i for i, c in enumerate(cells)
                if not space.is_terminal_ball(c) and len(c) < max_depth]
        if not cand:
            break
        c = cells.pop(rng.choice(cand))
        cells.extend(space.child_addresses(c))
    return sorted(cells)


def _count_vector(space, cells, ncls):
    v = [0] * ncls
    for c in cells:
        v[space.type_of(c)] += 1
    return tuple(v)


def balance(space: SpacePresentation, p_cells, q_cells, max_moves: int = 40) -> tuple:
    """Refine two ball lists until they hold the same number of balls of each type.

    Searches breadth-first over type-count vectors for the fewest splits, then
    replays the splits on the shallowest, leftmost balls of the chosen types.
    """
    ncls = len(set(space.type_class.values()))
    delta = {}
    for t, kids in space.class_children.items():
        if kids:
            d = [0] * ncls
            d[t] -= 1
            for k in kids:
                d[k] += 1
            delta[t] = tuple(d)
    start = (_count_vector(space, p_cells, ncls), _count_vector(space, q_cells, ncls))
    parent = {start: None}
    queue = deque([(start, 0)])
    goal = start if start[0] == start[1] else None
    while queue and goal is None:
        (vp, vq), n = queue.popleft()
        if n >= max_moves:
            continue
        for side in (0, 1):
            vec = (vp, vq)[side]
            for t, d in delta.items():
                if vec[t] == 0:
                    continue
                moved = tuple(a + b for a, b in zip(vec, d))
                state = (moved, vq) if side == 0 else (vp, moved)
                if state in parent:
                    continue
                parent[state] = ((vp, vq), side, t)
                if state[0] == state[1]:
                    goal = state
                    break
                queue.append((state, n + 1))
            if goal is not None:
                break
    if goal is None:
        raise ConstructionError("cannot balance ball types between the two sets")
    moves = []
    state = goal
    while parent[state] is not None:
        prev, side, t = parent[state]
        moves.append((side, t))
        state = prev
    sides = [sorted(p_cells), sorted(q_cells)]
    for side, t in reversed(moves):
        cells = sides[side]
        c = min((c for c in cells if space.type_of(c) == t), key=lambda a: (len(a), a))
        cells.remove(c)
        cells.extend(space.child_addresses(c))
        cells.sort()
    return sides[0], sides[1]


def match_cells(space: SpacePresentation, p_cells, q_cells, rng: random.Random | None = None,
                keep_common: bool = True) -> list:
    """Pair two ball covers of clopen sets with equal type content.

    Balls present in both lists are paired with themselves when the rest can
    still be balanced (unless keep_common is off); the remainder is refined by `balance` and paired by
    type, in order or shuffled by rng.
    """
    common = set(p_cells) & set(q_cells) if keep_common else set()
    p_rest = [c for c in p_cells if c not in common]
    q_rest = [c for c in q_cells if c not in common]
    pairs = [(c, c) for c in sorted(common)]
    if not p_rest and not q_rest:
        return pairs
    try:
        p_rest, q_rest = balance(space, p_rest, q_rest)
    except ConstructionError:
        pairs = []
        p_rest, q_rest = balance(space, p_cells, q_cells)
    by_type = {}
    for c in q_rest:
        by_type.setdefault(space.type_of(c), []).append(c)
    if rng is not None:
        for t in sorted(by_type):
            rng.shuffle(by_type[t])
    for c in p_rest:
        pairs.append((c, by_type[space.type_of(c)].pop(0)))
    return sorted(pairs)


def random_element(space: SpacePresentation, rng: random.Random, depth: int = 4,
                   regions: int = 6, within=None) -> GroupElement:
    """A seeded random element supported in the union of `within` (default: everywhere)."""
    universe = [ROOT] if within is None else sorted(within)
    p = random_partition(space, rng, universe, regions, depth)
    q = random_partition(space, rng, universe, regions, depth)
    pairs = match_cells(space, p, q, rng, keep_common=False)
    aut = space.automaton
    regs = []
    for s, t in pairs:
        lab = CANONICAL if aut is None else aut.label(rng.choice(aut.states))
        regs.append(Region(s, t, lab))
    if within is not None:
        regs.extend(Region(c, c, CANONICAL) for c in space.complement(universe))
    return GroupElement(space, reduce_regions(space, regs), reduced=True)


def refine_noise(g: GroupElement, rng: random.Random, splits: int = 3) -> GroupElement:
    """The same element written over a randomly refined source partition."""
    regs = list(g.regions)
    for _ in range(splits):
        cand = [i for i, r in enumerate(regs) if not g.space.is_terminal_ball(r.src)]
        if not cand:
            break
        r = regs.pop(rng.choice(cand))
        regs.extend(split_region(g.space, r))
    return GroupElement(g.space, regs)


# files --------------------------------------------------------------------------

def element_from_doc(doc, space: SpacePresentation | None = None) -> GroupElement:
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    if space is None:
        space = load_space(doc["space"])
    regs = [(parse_address(r["src"]), parse_address(r["dst"]),
             label_from_doc(r.get("label", "canonical"), space)) for r in doc["regions"]]
    return GroupElement.from_regions(space, regs)


def element_to_doc(g: GroupElement) -> dict:
    return g.to_doc()
