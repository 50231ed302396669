"""Compact ultrametric spaces presented as end spaces of finite symbolic trees.

A presentation lists symbols, the ordered children of each symbol, a root
symbol and the terminal symbols (no children, one end point each).  Balls are
addressed by words of child positions starting at the root; the empty word is
the whole space.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from importlib import resources
from typing import Iterable, Iterator, Mapping

from .errors import PresentationError

Address = tuple  # tuple[int, ...]
ROOT: Address = ()


def parse_address(text) -> Address:
    """Accept "0110", "1.12.0", "" or a list of ints."""
    if isinstance(text, (list, tuple)):
        return tuple(int(i) for i in text)
    text = text.strip()
    if not text:
        return ()
    if "." in text:
        return tuple(int(p) for p in text.split("."))
    if not text.isdigit():
        raise PresentationError(f"bad ball address {text!r}")
    return tuple(int(c) for c in text)


def format_address(addr: Address) -> str:
    if any(i >= 10 for i in addr):
        return ".".join(str(i) for i in addr)
    return "".join(str(i) for i in addr)


def is_prefix(a: Address, b: Address) -> bool:
    return len(a) <= len(b) and b[: len(a)] == a


def comparable(a: Address, b: Address) -> bool:
    """True when the balls are nested (one address is a prefix of the other)."""
    return is_prefix(a, b) or is_prefix(b, a)


@dataclass(frozen=True, eq=False)
class SpacePresentation:
    symbols: tuple
    children: Mapping
    root: str
    terminals: frozenset
    labels: Mapping | None = None
    name: str = ""
    automaton: object = None
    _key: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if not self.symbols:
            raise PresentationError("empty symbol list")
        if len(set(self.symbols)) != len(self.symbols):
            raise PresentationError("duplicate symbol names")
        declared = set(self.symbols)
        if self.root not in declared:
            raise PresentationError(f"root {self.root!r} is not a declared symbol")
        for s in self.symbols:
            if s not in self.children:
                raise PresentationError(f"symbol {s!r} has no children entry")
        for s, kids in self.children.items():
            if s not in declared:
                raise PresentationError(f"children given for undeclared symbol {s!r}")
            for k in kids:
                if k not in declared:
                    raise PresentationError(f"undeclared symbol {k!r} under {s!r}")
        for t in self.terminals:
            if t not in declared:
                raise PresentationError(f"undeclared terminal {t!r}")
            if self.children[t]:
                raise PresentationError(f"terminal {t!r} has children")
        for s in self.symbols:
            if not self.children[s] and s not in self.terminals:
                raise PresentationError(f"symbol {s!r} has no children but is not terminal")
        if self.labels is not None:
            missing = declared - set(self.labels)
            if missing:
                raise PresentationError(f"labels missing for {sorted(missing)}")
        self._reject_unary_cycles()
        kids = tuple(tuple(self.children[s]) for s in self.symbols)
        labels = None if self.labels is None else tuple(self.labels[s] for s in self.symbols)
        aut = None if self.automaton is None else self.automaton.key
        object.__setattr__(self, "_key", (self.symbols, kids, self.root, labels, aut))
        if self.automaton is not None:
            self.automaton.check_space(self)

    def _reject_unary_cycles(self):
        # a cycle of one-child symbols is a single isolated end; use a terminal
        for s in self.symbols:
            seen = set()
            cur = s
            while len(self.children[cur]) == 1 and cur not in seen:
                seen.add(cur)
                cur = self.children[cur][0]
            if len(self.children[cur]) == 1:
                raise PresentationError(
                    f"symbol {s!r} leads into a cycle of one-child symbols; use a terminal")

    def __eq__(self, other):
        return isinstance(other, SpacePresentation) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"SpacePresentation({self.name or self.root!r}, {len(self.symbols)} symbols)"

    # symbol graph -------------------------------------------------------

    @cached_property
    def type_class(self) -> dict:
        """Coarsest partition of symbols stable under position-wise children."""
        if self.labels is None:
            block = {s: 0 for s in self.symbols}
        else:
            order = {}
            block = {s: order.setdefault(self.labels[s], len(order)) for s in self.symbols}
        count = len(set(block.values()))
        while True:
            sigs = {}
            new = {}
            for s in self.symbols:
                sig = (block[s], tuple(block[c] for c in self.children[s]))
                new[s] = sigs.setdefault(sig, len(sigs))
            block = new
            if len(sigs) == count:
                return block
            count = len(sigs)

    @cached_property
    def finite_symbols(self) -> frozenset:
        finite = set(self.terminals)
        changed = True
        while changed:
            changed = False
            for s in self.symbols:
                if s not in finite and all(c in finite for c in self.children[s]):
                    finite.add(s)
                    changed = True
        return frozenset(finite)

    @cached_property
    def proper_symbols(self) -> tuple:
        """Symbols occurring at some proper (non-root) ball, in declaration order."""
        seen = set()
        todo = list(self.children[self.root])
        while todo:
            s = todo.pop()
            if s in seen:
                continue
            seen.add(s)
            todo.extend(self.children[s])
        return tuple(s for s in self.symbols if s in seen)

    def reachable(self, s: str) -> frozenset:
        """Symbols reachable from s in zero or more steps."""
        return self._reach[s]

    @cached_property
    def _reach(self) -> dict:
        out = {}
        for s in self.symbols:
            seen = {s}
            todo = [s]
            while todo:
                for c in self.children[todo.pop()]:
                    if c not in seen:
                        seen.add(c)
                        todo.append(c)
            out[s] = frozenset(seen)
        return out

    @cached_property
    def class_children(self) -> dict:
        """TypeClass id -> tuple of children TypeClass ids."""
        tc = self.type_class
        return {tc[s]: tuple(tc[c] for c in self.children[s]) for s in self.symbols}

    @cached_property
    def class_terminal(self) -> dict:
        tc = self.type_class
        return {tc[s]: s in self.terminals for s in self.symbols}

    @cached_property
    def class_finite(self) -> dict:
        tc = self.type_class
        return {tc[s]: s in self.finite_symbols for s in self.symbols}

    # addresses ------------------------------------------------------------

    @cached_property
    def _sym_cache(self) -> dict:
        return {(): self.root}

    def symbol_at(self, addr: Address) -> str:
        cache = self._sym_cache
        sym = cache.get(addr)
        if sym is not None:
            return sym
        sym = self.symbol_at(addr[:-1])
        kids = self.children[sym]
        i = addr[-1]
        if not 0 <= i < len(kids):
            raise PresentationError(f"invalid address {format_address(addr)!r}")
        sym = kids[i]
        cache[addr] = sym
        return sym

    def is_valid(self, addr: Address) -> bool:
        try:
            self.symbol_at(addr)
        except PresentationError:
            return False
        return True

    def type_of(self, addr: Address) -> int:
        return self.type_class[self.symbol_at(addr)]

    def arity(self, addr: Address) -> int:
        return len(self.children[self.symbol_at(addr)])

    def child_addresses(self, addr: Address) -> list:
        return [addr + (i,) for i in range(self.arity(addr))]

    def is_finite_ball(self, addr: Address) -> bool:
        return self.symbol_at(addr) in self.finite_symbols

    def is_terminal_ball(self, addr: Address) -> bool:
        return self.symbol_at(addr) in self.terminals

    def bfs(self, start: Address = (), max_depth: int = 64) -> Iterator[Address]:
        """Descendants of start (itself first), shallowest first, then left to right."""
        queue = deque([start])
        limit = len(start) + max_depth
        while queue:
            a = queue.popleft()
            yield a
            if len(a) < limit:
                queue.extend(self.child_addresses(a))

    def leaves(self, addr: Address, depth: int) -> list:
        """Addresses below addr at absolute length `depth`, or terminal sooner."""
        out = []
        stack = [addr]
        while stack:
            a = stack.pop()
            if len(a) >= depth or self.is_terminal_ball(a):
                out.append(a)
            else:
                stack.extend(reversed(self.child_addresses(a)))
        return out

    # partitions -----------------------------------------------------------

    def covers(self, cells: Iterable[Address], universe: Iterable[Address] = (ROOT,)) -> bool:
        """True when cells are disjoint, lie in the universe and cover it exactly."""
        cells = sorted(set(cells))
        for a, b in zip(cells, cells[1:]):
            if is_prefix(a, b):
                return False
        if any(not self.is_valid(c) for c in cells):
            return False
        cellset = set(cells)
        for u in universe:
            if not self._frontier_covered(u, cellset):
                return False
        inside = [c for c in cells if any(is_prefix(u, c) for u in universe)]
        return len(inside) == len(cells)

    def _frontier_covered(self, top: Address, cellset: set) -> bool:
        # every end through top must pass through exactly one cell
        if any(top[:k] in cellset for k in range(len(top))):
            return False
        longest = max((len(c) for c in cellset), default=0)
        stack = [top]
        while stack:
            a = stack.pop()
            if a in cellset:
                continue
            if self.is_terminal_ball(a) or len(a) >= longest:
                return False
            stack.extend(self.child_addresses(a))
        return True

    def complement(self, cells: Iterable[Address], universe: Iterable[Address] = (ROOT,)) -> list:
        """Coarsest ball cover of the universe minus the union of the given cells."""
        cells = set(cells)
        marked = set()
        for c in cells:
            for k in range(len(c)):
                marked.add(c[:k])
        out = []
        stack = sorted(set(universe), reverse=True)
        while stack:
            a = stack.pop()
            if a in cells or any(a[:k] in cells for k in range(len(a))):
                continue
            if a in marked:
                stack.extend(reversed(self.child_addresses(a)))
            else:
                out.append(a)
        return sorted(out)


# module-level operations ------------------------------------------------

def parse_space(doc, name: str = "") -> SpacePresentation:
    """Build a presentation from a JSON string or an already decoded dict."""
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    if not isinstance(doc, dict):
        raise PresentationError("space document must be an object")
    try:
        symbols = tuple(str(s) for s in doc["symbols"])
        children = {str(k): tuple(str(c) for c in v) for k, v in doc["children"].items()}
        root = str(doc["root"])
    except KeyError as e:
        raise PresentationError(f"space document lacks field {e.args[0]!r}") from None
    for s in symbols:
        children.setdefault(s, ())
    terminals = frozenset(str(t) for t in doc.get("terminals", []))
    labels = doc.get("labels")
    if labels is not None:
        labels = {str(k): str(v) for k, v in labels.items()}
    automaton = doc.get("automaton")
    if automaton is not None:
        from .simstruct import parse_automaton
        if isinstance(automaton, str):
            automaton = load_automaton_fixture(automaton)
        else:
            automaton = parse_automaton(automaton)
    return SpacePresentation(symbols, children, root, terminals, labels,
                             name or str(doc.get("name", "")), automaton)


def space_to_doc(space: SpacePresentation) -> dict:
    doc = {
        "name": space.name,
        "symbols": list(space.symbols),
        "children": {s: list(space.children[s]) for s in space.symbols},
        "root": space.root,
        "terminals": [s for s in space.symbols if s in space.terminals],
    }
    if space.labels is not None:
        doc["labels"] = dict(space.labels)
    if space.automaton is not None:
        doc["automaton"] = space.automaton.to_doc()
    return doc


def type_classes(space: SpacePresentation) -> dict:
    return dict(space.type_class)


def is_finite_type(space: SpacePresentation, symbol: str) -> bool:
    if symbol not in space.children:
        raise PresentationError(f"unknown symbol {symbol!r}")
    return symbol in space.finite_symbols


def ball_depth(space: SpacePresentation, addr: Address) -> int:
    if not addr:
        raise PresentationError("the whole space is not a proper ball")
    space.symbol_at(addr)
    return len(addr) - 1


def minimal_ball_partition(space: SpacePresentation) -> list:
    if space.root in space.terminals:
        raise PresentationError("root is terminal: the space is a single point")
    return space.child_addresses(ROOT)


def refine(space: SpacePresentation, p1, p2) -> list:
    """Coarsest common refinement of two partitions."""
    s1, s2 = set(p1), set(p2)
    out = {c for c in s1 if any(c[:k] in s2 for k in range(len(c) + 1))}
    out |= {c for c in s2 if any(c[:k] in s1 for k in range(len(c) + 1))}
    return sorted(out)


def distance_exponent(space: SpacePresentation, a1: Address, a2: Address):
    """Common prefix length m (distance e^-m), or None for nested balls."""
    if comparable(a1, a2):
        return None
    m = 0
    while a1[m] == a2[m]:
        m += 1
    return m


# fixtures -----------------------------------------------------------------

FIXTURES = ("binary", "golden-mean", "houghton-H2", "qaut", "binary-flip", "binary-klein")


def fixture_text(name: str) -> str:
    return resources.files("cssgroups").joinpath("fixtures", f"{name}.json").read_text("utf-8")


@lru_cache(maxsize=None)
def load_fixture(name: str) -> SpacePresentation:
    if name.startswith("vdr(") and name.endswith(")"):
        d, r = (int(x) for x in name[4:-1].split(","))
        return vdr(d, r)
    try:
        text = fixture_text(name)
    except FileNotFoundError:
        raise PresentationError(f"unknown space fixture {name!r}") from None
    return parse_space(text, name)


@lru_cache(maxsize=None)
def load_automaton_fixture(name: str):
    from .simstruct import parse_automaton
    try:
        text = fixture_text(name)
    except FileNotFoundError:
        raise PresentationError(f"unknown automaton fixture {name!r}") from None
    return parse_automaton(text)


def vdr(d: int, r: int) -> SpacePresentation:
    """Root with r children, every other vertex with d children."""
    if d < 2 or r < 1:
        raise PresentationError("vdr needs d >= 2 and r >= 1")
    if d == r:
        return SpacePresentation(("x",), {"x": ("x",) * d}, "x", frozenset(), name=f"vdr({d},{r})")
    return SpacePresentation(("r", "x"), {"r": ("x",) * r, "x": ("x",) * d}, "r",
                             frozenset(), name=f"vdr({d},{r})")


def load_space(ref) -> SpacePresentation:
    """A fixture name, a path to a space file, or a decoded document."""
    if isinstance(ref, SpacePresentation):
        return ref
    if isinstance(ref, dict):
        return parse_space(ref)
    ref = str(ref)
    if ref in FIXTURES or ref.startswith("vdr("):
        return load_fixture(ref)
    if ref.endswith(".json"):
        stem = ref.rsplit("/", 1)[-1][:-5]
        try:
            with open(ref, encoding="utf-8") as fh:
                doc = json.load(fh)
        except FileNotFoundError:
            if stem in FIXTURES:
                return load_fixture(stem)
            raise
        return parse_space(doc, stem)
    raise PresentationError(f"cannot resolve space {ref!r}")
