import copy
import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cssgroups.errors import PresentationError
from cssgroups.simstruct import (CANONICAL, SimLabel, apply_sim, compose_labels, invert_label,
                                 label_from_doc, parse_automaton, restrict_label, sim_nonempty)
from cssgroups.space import load_automaton_fixture, load_fixture, parse_space

KLEIN = load_automaton_fixture("klein")
FLIP = load_automaton_fixture("flip")


def test_sim_nonempty(binary, golden, houghton):
    assert sim_nonempty(binary, (0,), (1, 1, 0))
    # (0,) carries symbol 0 and (1,) carries symbol 1
    assert not sim_nonempty(golden, (0,), (1,))
    assert sim_nonempty(golden, (0,), (1, 0))
    assert not sim_nonempty(houghton, (0,), (1,))


def test_apply_sim_canonical(binary):
    assert apply_sim(binary, CANONICAL, (0,), (1, 1), (0, 1, 0)) == (0, 1, 0)


def test_apply_sim_decorated():
    space = load_fixture("binary-flip")
    f = space.automaton.label("f")
    assert apply_sim(space, f, (0,), (1,), (0,)) == (1,)
    assert apply_sim(space, f, (0,), (1,), (0, 1)) == (1, 0)
    k = load_fixture("binary-klein")
    b = k.automaton.label("b")
    # b swaps the first letter and continues as b
    assert apply_sim(k, b, (0,), (1,), (0, 1)) == (1, 0)
    c = k.automaton.label("c")
    # c fixes the first letter and continues as b
    assert apply_sim(k, c, (0,), (1,), (0, 1)) == (0, 0)


def test_apply_sim_bad_suffix(golden):
    with pytest.raises(PresentationError):
        apply_sim(golden, CANONICAL, (1,), (1,), (1,))


def test_compose_and_invert_labels():
    assert compose_labels(CANONICAL, CANONICAL) == CANONICAL
    a, b, c = (KLEIN.label(q) for q in "abc")
    assert compose_labels(a, b, KLEIN) == c
    for q in KLEIN.states:
        lab = KLEIN.label(q)
        assert compose_labels(lab, invert_label(lab, KLEIN), KLEIN) == CANONICAL
    with pytest.raises(PresentationError):
        compose_labels(a, b)


def test_identity_state_is_canonical():
    assert KLEIN.label("e") == CANONICAL
    assert label_from_doc("canonical") == CANONICAL
    space = load_fixture("binary-klein")
    assert label_from_doc({"state": "a"}, space) == SimLabel("a")
    with pytest.raises(PresentationError):
        label_from_doc({"state": "a"}, load_fixture("binary"))


def test_restrict_label(binary, golden):
    assert restrict_label(binary, CANONICAL, (0,), (1,), 1) == ((0, 1), (1, 1), CANONICAL)
    space = load_fixture("binary-flip")
    f = space.automaton.label("f")
    assert restrict_label(space, f, (0,), (1,), 0) == ((0, 0), (1, 1), f)
    # two 0-balls of the golden mean tree; child 1 carries symbol 1 on both sides
    src, dst, lab = restrict_label(golden, CANONICAL, (0,), (1, 0), 1)
    assert (src, dst, lab) == ((0, 1), (1, 0, 1), CANONICAL)
    assert golden.symbol_at(src) == golden.symbol_at(dst) == "1"


@pytest.mark.parametrize("name", ["binary-flip", "binary-klein"])
def test_apply_sim_is_bijective_on_suffixes(name):
    space = load_fixture(name)
    words = list(itertools.product(range(2), repeat=5))
    for q in space.automaton.states:
        lab = space.automaton.label(q)
        imgs = {apply_sim(space, lab, (0,), (1,), w) for w in words}
        assert len(imgs) == len(words)


@given(st.sampled_from(["e", "a", "b", "c"]),
       st.lists(st.integers(0, 1), min_size=1, max_size=8))
def test_restrict_then_apply_equals_apply_then_truncate(q, word):
    space = load_fixture("binary-klein")
    lab = space.automaton.label(q)
    src, dst, sub = restrict_label(space, lab, (0,), (1,), word[0])
    head = dst[-1]
    tail = apply_sim(space, sub, src, dst, word[1:])
    assert (head, *tail) == apply_sim(space, lab, (0,), (1,), word)


@given(st.sampled_from(["e", "a", "b", "c"]), st.sampled_from(["e", "a", "b", "c"]),
       st.lists(st.integers(0, 1), max_size=8))
def test_composition_matches_sequential_runs(p, q, word):
    space = load_fixture("binary-klein")
    lp, lq = KLEIN.label(p), KLEIN.label(q)
    both = apply_sim(space, compose_labels(lp, lq, KLEIN), (0,), (0,), word)
    seq = apply_sim(space, lp, (0,), (0,), apply_sim(space, lq, (0,), (0,), word))
    assert both == seq


def _doc(aut):
    return copy.deepcopy(aut.to_doc())


def test_automaton_round_trip():
    assert parse_automaton(_doc(KLEIN)).key == KLEIN.key


def test_automaton_rejects_broken_group_table():
    doc = _doc(KLEIN)
    doc["product"]["a"]["a"] = "b"
    with pytest.raises(PresentationError):
        parse_automaton(doc)


def test_automaton_rejects_broken_wreath_recursion():
    doc = _doc(FLIP)
    # f·f = e, but the sections of f·f would be (f, f)
    doc["section"]["f"] = ["f", "e"]
    with pytest.raises(PresentationError):
        parse_automaton(doc)


def test_automaton_rejects_unfaithful_states():
    # two states acting the same way
    doc = {"degree": 2, "states": ["e", "z"], "identity": "e",
           "perm": {"e": [0, 1], "z": [0, 1]}, "section": {"e": ["e", "e"], "z": ["z", "z"]},
           "product": {"e": {"e": "e", "z": "z"}, "z": {"e": "z", "z": "e"}},
           "inverse": {"e": "e", "z": "z"}}
    with pytest.raises(PresentationError):
        parse_automaton(doc)


def test_automaton_needs_uniform_tree():
    with pytest.raises(PresentationError):
        parse_space({"symbols": ["R", "0", "1"],
                     "children": {"R": ["0", "1"], "0": ["0", "1"], "1": ["0"]},
                     "root": "R", "automaton": "flip"})
