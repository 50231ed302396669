"""Groups of homeomorphisms of compact ultrametric spaces that are locally
determined by finite similarity structures."""

from .space import (SpacePresentation, parse_space, load_fixture, load_space, vdr,
                    parse_address, format_address)
from .simstruct import CANONICAL, SimLabel, GroupAutomaton, parse_automaton
from .element import GroupElement, Region, identity, from_regions, compose, inverse

__all__ = [
    "SpacePresentation", "parse_space", "load_fixture", "load_space", "vdr",
    "parse_address", "format_address", "CANONICAL", "SimLabel", "GroupAutomaton",
    "parse_automaton", "GroupElement", "Region", "identity", "from_regions",
    "compose", "inverse",
]
