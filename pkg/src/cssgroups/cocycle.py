"""The zipper cocycle.

Classes ``[f, B]`` pair a proper ball with a local similarity embedding of it;
two pairs are equivalent when they differ by a similarity of the ball.  Each
class is stored in a canonical form: the embedding is transported to a fixed
base ball of the type class of ``B`` and reduced.  The cocycle of ``g`` is
``+1`` on the classes ``[g|B, B]`` for balls ``B`` strictly above a maximal
region of ``g`` and ``-1`` on ``[incl, B]`` for balls strictly above a maximal
region of ``g⁻¹``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .element import (GroupElement, Region, compose_regions, reduce_regions,
                      regions_key, restrict_regions)
from .errors import PresentationError
from .simstruct import CANONICAL
from .space import ROOT, Address, SpacePresentation, format_address, parse_address


@dataclass(frozen=True, order=True)
class EmbeddingClass:
    base: Address
    regions: tuple

    def to_doc(self):
        return {"base": format_address(self.base), "regions": [r.to_doc() for r in self.regions]}


class CocycleVector:
    """Finitely supported integer vector over embedding classes."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {k: v for k, v in (coeffs or {}).items() if v}

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return CocycleVector(out)

    def __neg__(self):
        return CocycleVector({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, CocycleVector) and self.coeffs == other.coeffs

    def __len__(self):
        return len(self.coeffs)

    def norm_sq(self) -> int:
        return sum(v * v for v in self.coeffs.values())

    def to_doc(self) -> list:
        return [{"class": k.to_doc(), "coeff": v} for k, v in sorted(self.coeffs.items())]

    def __repr__(self):
        return f"CocycleVector({len(self.coeffs)} classes, norm²={self.norm_sq()})"


def base_ball(space: SpacePresentation, type_id: int) -> Address:
    """Shallowest, leftmost proper ball of the given type class."""
    cache = space.__dict__.setdefault("_base_balls", {})
    if type_id not in cache:
        depth = len(space.symbols) + 2
        for a in space.bfs(ROOT, depth):
            if a and space.type_of(a) == type_id:
                cache[type_id] = a
                break
        else:
            raise PresentationError(f"type class {type_id} does not occur at a proper ball")
    return cache[type_id]


def class_canonicalize(space: SpacePresentation, ball: Address, embedding) -> EmbeddingClass:
    """Canonical form of [f, ball] where f is given by regions whose sources partition ball."""
    base = base_ball(space, space.type_of(ball))
    aut = space.automaton
    states = [None] if aut is None else aut.states
    best = None
    for q in states:
        lab = CANONICAL if q is None else aut.label(q)
        moved = compose_regions(space, embedding, [Region(base, ball, lab)])
        regs = tuple(reduce_regions(space, moved, floor=base))
        if best is None or regions_key(space, regs) < regions_key(space, best):
            best = regs
    return EmbeddingClass(base, best)


def _strict_ancestors(cells) -> list:
    out = set()
    for c in cells:
        for k in range(1, len(c)):
            out.add(c[:k])
    return sorted(out)


def zipper_sets(g: GroupElement) -> tuple:
    """(plus, minus): proper balls strictly above maximal regions of g and of g⁻¹."""
    g = g.reduce()
    plus = _strict_ancestors(r.src for r in g.regions)
    minus = _strict_ancestors(r.dst for r in g.regions)
    return plus, minus


def cocycle_vector(g: GroupElement) -> CocycleVector:
    g = g.reduce()
    space = g.space
    plus, minus = zipper_sets(g)
    coeffs = {}
    for b in plus:
        k = class_canonicalize(space, b, restrict_regions(space, g.regions, b))
        coeffs[k] = coeffs.get(k, 0) + 1
    for b in minus:
        k = class_canonicalize(space, b, [Region(b, b, CANONICAL)])
        coeffs[k] = coeffs.get(k, 0) - 1
    return CocycleVector(coeffs)


def cocycle_norm_sq(g: GroupElement) -> int:
    plus, minus = zipper_sets(g)
    return len(plus) + len(minus)


def pi_apply(g: GroupElement, v: CocycleVector) -> CocycleVector:
    space = g.space
    coeffs = {}
    for k, c in v.coeffs.items():
        moved = compose_regions(space, g.regions, k.regions)
        nk = class_canonicalize(space, k.base, moved)
        coeffs[nk] = coeffs.get(nk, 0) + c
    return CocycleVector(coeffs)


def verify_cocycle_identity(g: GroupElement, h: GroupElement) -> bool:
    lhs = cocycle_vector(g * h)
    rhs = pi_apply(g, cocycle_vector(h)) + cocycle_vector(g)
    return lhs == rhs


def project_orbit(v: CocycleVector, ball, space: SpacePresentation) -> CocycleVector:
    """Keep the coefficients on classes whose base ball has the type of `ball`."""
    if isinstance(ball, str):
        ball = parse_address(ball)
    if not ball:
        raise PresentationError("the whole space is not a proper ball")
    t = space.type_of(ball)
    return CocycleVector({k: c for k, c in v.coeffs.items() if space.type_of(k.base) == t})


def orbit_infinite_witness(space: SpacePresentation, ball, n: int) -> list:
    """n distinct classes in the orbit of [incl, ball], each realised by a group element."""
    from . import builders
    if isinstance(ball, str):
        ball = parse_address(ball)
    if not ball:
        raise PresentationError("the whole space is not a proper ball")
    t = space.type_of(ball)
    incl = [Region(ball, ball, CANONICAL)]
    out = [class_canonicalize(space, ball, incl)]
    if space.is_finite_ball(ball):
        # disjoint copies of the ball inside infinite balls away from it
        used = [ball]
        while len(out) < n:
            copy = builders.allocate_ball(space, t, avoid=used)
            used.append(copy)
            g = builders.swap_involution(space, ball, copy)
            out.append(class_canonicalize(space, ball, restrict_regions(space, g.regions, ball)))
    else:
        # nested copies of the ball inside itself
        cur = ball
        while len(out) < n:
            cur = builders.allocate_ball(space, t, within=[cur], avoid=[], proper=True)
            g = builders.extend_partial(space, [(ball, cur, CANONICAL)])
            out.append(class_canonicalize(space, ball, restrict_regions(space, g.regions, ball)))
    return out
