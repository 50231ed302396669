"""Similarities between balls.

Two flavors are supported.  Canonical labels name the unique order-preserving
similarity between balls whose symbols share a type class.  Decorated labels
name a state of a finite automaton group acting on a uniform d-ary tree; the
state acts on the suffix below the source ball.  The identity state and the
canonical label are the same map and are stored as ``SimLabel(None)``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .errors import PresentationError
from .space import Address, SpacePresentation


@dataclass(frozen=True, order=True)
class SimLabel:
    state: str | None = None

    @property
    def is_canonical(self) -> bool:
        return self.state is None

    def to_doc(self):
        return "canonical" if self.state is None else {"state": self.state}

    def __repr__(self):
        return "Canonical" if self.state is None else f"Decorated({self.state})"


CANONICAL = SimLabel()


def label_from_doc(doc, space: SpacePresentation | None = None) -> SimLabel:
    if doc in (None, "canonical"):
        return CANONICAL
    if isinstance(doc, dict) and "state" in doc:
        aut = space.automaton if space is not None else None
        if aut is None:
            raise PresentationError("decorated label on a space without an automaton")
        return aut.label(str(doc["state"]))
    raise PresentationError(f"bad label {doc!r}")


class GroupAutomaton:
    """A finite group given by a complete self-similar (wreath) presentation."""

    def __init__(self, degree, states, identity, perm, section, product, inverse):
        self.degree = int(degree)
        self.states = tuple(states)
        self.identity = identity
        self.perm = {q: tuple(perm[q]) for q in self.states}
        self.section = {q: tuple(section[q]) for q in self.states}
        self.product = {(p, q): product[p][q] for p in self.states for q in self.states}
        self.inverse = {q: inverse[q] for q in self.states}
        self.order = {q: i for i, q in enumerate(self.states)}
        self._validate()
        self.key = (self.degree, self.states, self.identity,
                    tuple(self.perm[q] for q in self.states),
                    tuple(self.section[q] for q in self.states))
        # (permutation, sections) -> state, used when merging sibling regions
        self.by_action = {(self.perm[q], self.section[q]): q for q in self.states}

    def _validate(self):
        d, S = self.degree, self.states
        if d < 2 or not S or len(set(S)) != len(S):
            raise PresentationError("automaton needs degree >= 2 and distinct states")
        if self.identity not in S:
            raise PresentationError("identity state not declared")
        for q in S:
            if sorted(self.perm[q]) != list(range(d)):
                raise PresentationError(f"perm of {q!r} is not a permutation of {d} letters")
            if len(self.section[q]) != d or any(r not in S for r in self.section[q]):
                raise PresentationError(f"bad section row for {q!r}")
        for (p, q), r in self.product.items():
            if r not in S:
                raise PresentationError(f"product {p}.{q} = {r!r} undeclared")
        mul, e = self.product, self.identity
        for q in S:
            if mul[e, q] != q or mul[q, e] != q:
                raise PresentationError("identity law fails")
            if self.inverse.get(q) not in S or mul[q, self.inverse[q]] != e:
                raise PresentationError(f"inverse of {q!r} is wrong")
        for p, q, r in itertools.product(S, repeat=3):
            if mul[mul[p, q], r] != mul[p, mul[q, r]]:
                raise PresentationError(f"product not associative at {(p, q, r)}")
        if self.perm[e] != tuple(range(d)) or any(s != e for s in self.section[e]):
            raise PresentationError("identity state must act trivially")
        for p, q in itertools.product(S, repeat=2):
            pq = mul[p, q]
            for u in range(d):
                if self.perm[pq][u] != self.perm[p][self.perm[q][u]]:
                    raise PresentationError(f"wreath recursion (perm) fails at {(p, q, u)}")
                want = mul[self.section[p][self.perm[q][u]], self.section[q][u]]
                if self.section[pq][u] != want:
                    raise PresentationError(f"wreath recursion (section) fails at {(p, q, u)}")
        # distinct states must act differently, else normal forms are not unique
        block = {q: 0 for q in S}
        while True:
            sigs = {}
            new = {q: sigs.setdefault((self.perm[q], tuple(block[r] for r in self.section[q])),
                                      len(sigs)) for q in S}
            if len(sigs) == len(set(block.values())):
                break
            block = new
        if len(set(new.values())) != len(S):
            raise PresentationError("automaton is not faithful: two states act identically")

    def check_space(self, space: SpacePresentation):
        if space.terminals or len(set(space.type_class.values())) != 1:
            raise PresentationError("decorated structures need a uniform tree with one type class")
        if any(len(space.children[s]) != self.degree for s in space.symbols):
            raise PresentationError("automaton degree does not match the tree")

    def label(self, state: str) -> SimLabel:
        if state not in self.order:
            raise PresentationError(f"unknown automaton state {state!r}")
        return CANONICAL if state == self.identity else SimLabel(state)

    def state(self, label: SimLabel) -> str:
        return self.identity if label.state is None else label.state

    def run(self, q: str, word) -> tuple:
        """Image of word under state q, and the section of q along word."""
        out = []
        for u in word:
            out.append(self.perm[q][u])
            q = self.section[q][u]
        return tuple(out), q

    def to_doc(self) -> dict:
        return {
            "degree": self.degree,
            "states": list(self.states),
            "identity": self.identity,
            "perm": {q: list(self.perm[q]) for q in self.states},
            "section": {q: list(self.section[q]) for q in self.states},
            "product": {p: {q: self.product[p, q] for q in self.states} for p in self.states},
            "inverse": dict(self.inverse),
        }


def parse_automaton(doc) -> GroupAutomaton:
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    try:
        return GroupAutomaton(doc["degree"], doc["states"], doc["identity"], doc["perm"],
                              doc["section"], doc["product"], doc["inverse"])
    except KeyError as e:
        raise PresentationError(f"automaton document lacks field {e.args[0]!r}") from None


# label arithmetic ---------------------------------------------------------
# These take the automaton (or None) rather than the space so that element
# arithmetic can call them in tight loops.

def run_label(aut, label: SimLabel, word) -> tuple:
    """(image word, restricted label) for a label acting on a suffix word."""
    if label.state is None:
        return tuple(word), label
    img, q = aut.run(label.state, word)
    return img, aut.label(q)


def mul_labels(aut, l1: SimLabel, l2: SimLabel) -> SimLabel:
    """l1 after l2."""
    if l2.state is None:
        return l1
    if l1.state is None:
        return l2
    return aut.label(aut.product[l1.state, l2.state])


def inv_label(aut, label: SimLabel) -> SimLabel:
    if label.state is None:
        return label
    return aut.label(aut.inverse[label.state])


# public operations --------------------------------------------------------

def sim_nonempty(space: SpacePresentation, b1: Address, b2: Address) -> bool:
    return space.type_of(b1) == space.type_of(b2)


def _check_label(space, label, src, dst):
    if not sim_nonempty(space, src, dst):
        raise PresentationError("no similarity between balls of different type")
    if label.state is not None and space.automaton is None:
        raise PresentationError("decorated label on a space without an automaton")


def apply_sim(space: SpacePresentation, label: SimLabel, src: Address, dst: Address, suffix) -> tuple:
    _check_label(space, label, src, dst)
    suffix = tuple(suffix)
    if not space.is_valid(src + suffix):
        raise PresentationError("suffix is not valid below the source ball")
    return run_label(space.automaton, label, suffix)[0]


def compose_labels(l1: SimLabel, l2: SimLabel, automaton=None) -> SimLabel:
    if (l1.state or l2.state) and automaton is None:
        raise PresentationError("decorated labels need an automaton")
    return mul_labels(automaton, l1, l2)


def invert_label(label: SimLabel, automaton=None) -> SimLabel:
    if label.state is not None and automaton is None:
        raise PresentationError("decorated labels need an automaton")
    return inv_label(automaton, label)


def restrict_label(space: SpacePresentation, label: SimLabel, src: Address, dst: Address, child: int):
    _check_label(space, label, src, dst)
    if not 0 <= child < space.arity(src):
        raise PresentationError("child index out of range")
    (img,), sub = run_label(space.automaton, label, (child,))
    return src + (child,), dst + (img,), sub
