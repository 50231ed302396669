import itertools
import random
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cssgroups.builders import (PingPong, classify_stratum, commutator_separation_witness,
                                extend_partial, icc_conjugates, leftmost_infinite_cell,
                                malnormal_witness, move_witness, paradox_data, pingpong_containment,
                                pingpong_pair, reduced_words, split_small_support, swap_involution,
                                unbounded_sequence, verify_paradox, verify_words, vigorous_witness)
from cssgroups.cocycle import cocycle_norm_sq
from cssgroups.element import (apply, ball_status, compose, conjugate, equals, identity, inverse,
                               random_element, restrict_coset, support, support_within)
from cssgroups.errors import ConstructionError, PresentationError
from cssgroups.space import comparable, is_prefix, load_fixture, parse_address

A = parse_address


def cells(g):
    return [(r.src, r.dst) for r in g.reduce().regions]


def agrees_below(g, src, dst, depth):
    space = g.space
    return all(apply(g, src + w) == dst + w
               for k in range(depth + 1) for w in itertools.product(range(2), repeat=k)
               if space.is_valid(src + w))


# extension property ---------------------------------------------------------------------

def test_extend_single_pair(binary):
    g = extend_partial(binary, [("0", "00")])
    assert agrees_below(g, A("0"), A("00"), 6)
    assert cells(g) == [(A("0"), A("00")), (A("10"), A("01")), (A("11"), A("1"))]


def test_extend_disjoint_pair_is_a_swap(binary):
    g = extend_partial(binary, [("00", "10")])
    assert cells(g) == [(A("00"), A("10")), (A("01"), A("01")),
                        (A("10"), A("00")), (A("11"), A("11"))]


def test_extend_errors(binary, golden):
    with pytest.raises(PresentationError):
        extend_partial(binary, [("0", "1"), ("1", "0")])
    with pytest.raises(PresentationError):
        extend_partial(binary, [("0", "10"), ("00", "11")])
    with pytest.raises(PresentationError):
        extend_partial(golden, [("0", "1")])


@given(st.integers(0, 2 ** 32), st.sampled_from(["binary", "golden-mean", "houghton-H2"]))
def test_extend_reproduces_requested_pieces(seed, name):
    space = load_fixture(name)
    rng = random.Random(seed)
    f = random_element(space, rng, depth=3, regions=5).reduce()
    infinite = [r for r in f.regions if not space.is_finite_ball(r.src)]
    chosen = rng.sample(infinite, min(len(infinite), rng.randint(1, 2)))
    if len(chosen) == len(f.regions):
        chosen = chosen[:-1] or chosen
    pairs = [(r.src, r.dst) for r in chosen if r.src]
    try:
        g = extend_partial(space, pairs)
    except PresentationError:
        return
    for b, d in pairs:
        for a in space.bfs(b, 4):
            assert apply(g, a) == d + a[len(b):]


def test_extend_within_keeps_outside_fixed(binary):
    g = extend_partial(binary, [("000", "001")], within=["0"])
    assert support_within(g, [A("0")])
    assert apply(g, "000") == A("001")


# involutions and witnesses -------------------------------------------------------------------

def test_swap_involution(binary, golden, qaut):
    h = swap_involution(binary, "00", "10")
    assert cells(h)[0] == (A("00"), A("10"))
    assert compose(h, h).is_identity()
    # the leftmost 1-typed ball inside the 0-ball "0" is "01"
    t = swap_involution(golden, "1", "0")
    assert apply(t, "1") == A("01")
    assert compose(t, t).is_identity()
    with pytest.raises(PresentationError):
        swap_involution(binary, "0", "01")
    u = swap_involution(qaut, "1", "21")
    assert u.reduce() != identity(qaut) and compose(u, u).is_identity()


def test_move_witness(g0, s_elem, binary):
    assert move_witness(s_elem) == A("0")
    b = move_witness(g0)
    assert not comparable(b, apply(g0, b))
    with pytest.raises(PresentationError):
        move_witness(identity(binary))


@pytest.mark.parametrize("seed", range(30))
def test_move_witness_random(seed):
    space = load_fixture(["binary", "golden-mean", "qaut", "houghton-H2"][seed % 4])
    g = random_element(space, random.Random(seed))
    if g.is_identity():
        return
    b = move_witness(g)
    assert not comparable(b, apply(g, b))


def test_split_small_support_of_s(s_elem, binary):
    h1, h2 = split_small_support(s_elem)
    assert cells(h1)[0] == (A("00"), A("10"))
    assert support_within(h2, [A("01"), A("11")])
    assert equals(compose(h1, h2), s_elem)
    with pytest.raises(PresentationError):
        split_small_support(identity(binary))


@pytest.mark.parametrize("name", ["binary", "golden-mean", "qaut", "houghton-H2"])
def test_split_round_trip(name):
    space = load_fixture(name)
    rng = random.Random(11)
    done = 0
    while done < 25:
        g = random_element(space, rng)
        if g.is_identity():
            continue
        h1, h2 = split_small_support(g)
        assert equals(compose(h1, h2), g)
        for h in (h1, h2):
            assert "fixed" in set(support(h, 6).values())
        done += 1


def test_vigorous_witness(binary, qaut):
    g = vigorous_witness(binary, ["0"], ["00"], ["01"])
    assert support_within(g, [A("0")])
    assert is_prefix(A("01"), apply(g, "00"))
    assert vigorous_witness(binary, ["0"], ["00"], ["00"]).is_identity()
    with pytest.raises(ConstructionError):
        vigorous_witness(qaut, ["0"], ["00"], ["01"])
    with pytest.raises(PresentationError):
        vigorous_witness(binary, ["0"], ["1"], ["01"])


# ping-pong ----------------------------------------------------------------------------

def test_reduced_word_count():
    words = list(reduced_words(8))
    assert len(words) == sum(4 * 3 ** (k - 1) for k in range(1, 9))
    assert sum(len(w) == 8 for w in words) == 4 * 3 ** 7
    assert all("gG" not in w and "Gg" not in w and "hH" not in w and "Hh" not in w for w in words)


@pytest.mark.parametrize("name", ["binary", "golden-mean"])
def test_pingpong_containment(name):
    pp = pingpong_pair(load_fixture(name))
    assert pingpong_containment(pp) == []


def test_pingpong_binary_balls(binary):
    pp = pingpong_pair(binary)
    assert sorted(pp.balls.values()) == [A("00"), A("01"), A("10"), A("11")]


def test_pingpong_short_words_nontrivial(golden):
    report = verify_words(pingpong_pair(golden), 5)
    assert report["identity_words"] == []
    assert report["by_length"][5] == 4 * 3 ** 4


def test_broken_pingpong_is_detected(binary):
    pp = pingpong_pair(binary)
    bad = PingPong(pp.g, identity(binary), pp.balls)
    assert pingpong_containment(bad)
    assert verify_words(bad, 2)["identity_words"]


# paradoxical decomposition -------------------------------------------------------------

def test_classify_examples(binary, s_elem):
    data = paradox_data(binary)
    assert len(data.strata) == 6
    assert classify_stratum(data, identity(binary)) == (1, 2)
    assert classify_stratum(data, s_elem) == (2, 2)
    assert leftmost_infinite_cell(s_elem, "0") == (A("0"), A("1"))
    assert classify_stratum(data, restrict_coset(s_elem, data.base)) == (2, 2)


def test_paradox_data_invariants(binary, golden, houghton):
    # a Houghton ray holds no two disjoint balls of its own type
    with pytest.raises(ConstructionError):
        paradox_data(houghton)
    for space in (binary, golden):
        data = paradox_data(space)
        assert len(data.strata) == 3 * len(data.balls)
        for b, (b1, b2), g, h in zip(data.balls, data.subballs, data.g, data.h):
            assert is_prefix(b, b1) and is_prefix(b, b2) and not comparable(b1, b2)
            assert apply(g, b1) == b and apply(h, b2) == b


def test_cell_anchor_counterexample(binary):
    # g_1 lies in stratum (1,2) yet g_1^-1 g_1 = id lies there too, not in (1,1)
    data = paradox_data(binary)
    g1 = data.g[0]
    assert classify_stratum(data, g1) == (1, 2)
    assert classify_stratum(data, compose(inverse(g1), g1)) == (1, 2)


def test_point_anchor_examples(binary):
    data = paradox_data(binary)
    assert classify_stratum(data, identity(binary), "point") == (1, 1)
    assert classify_stratum(data, data.g[0], "point") == (1, 1)
    with pytest.raises(PresentationError):
        classify_stratum(data, identity(binary), "middle")


@pytest.mark.parametrize("name", ["binary", "golden-mean"])
def test_point_anchor_translates(name):
    data = paradox_data(load_fixture(name))
    rep = verify_paradox(data, samples=30, seed=3, pairs=20, anchor="point")
    assert rep["violations"] == 0 and rep["coset_violations"] == 0


def test_corrupted_translations_are_flagged(binary):
    data = paradox_data(binary)
    e = identity(binary)
    bad = replace(data, g=[e] * len(data.g))
    rep = verify_paradox(bad, samples=20, seed=1, pairs=5)
    assert rep["violations"] > 0 and rep["witnesses"]


@given(st.integers(0, 2 ** 32))
def test_strata_constant_on_cosets(seed):
    space = load_fixture("golden-mean")
    data = paradox_data(space)
    rng = random.Random(seed)
    f = random_element(space, rng)
    k = random_element(space, rng, within=space.complement([data.base]))
    assert restrict_coset(f, data.base) == restrict_coset(compose(f, k), data.base)
    assert classify_stratum(data, f) == classify_stratum(data, compose(f, k))
    assert classify_stratum(data, f) in data.strata


# ICC, malnormality, unbounded cocycles, commutators -----------------------------------------

def _pairwise_distinct(gs):
    return all(not equals(a, b) for a, b in itertools.combinations(gs, 2))


def test_icc_examples(s_elem, g0, qaut):
    for f, n in ((s_elem, 5), (g0, 10)):
        out = icc_conjugates(f, n)
        assert len(out) == n and _pairwise_distinct(out)
    t = swap_involution(qaut, "1", "21")
    out = icc_conjugates(t, 5)
    assert _pairwise_distinct(out)
    with pytest.raises(PresentationError):
        icc_conjugates(identity(qaut), 3)


@pytest.mark.parametrize("name", ["golden-mean", "houghton-H2", "binary-klein"])
def test_icc_on_other_spaces(name):
    space = load_fixture(name)
    rng = random.Random(5)
    f = random_element(space, rng)
    out = icc_conjugates(f, 6)
    assert _pairwise_distinct(out)
    assert not any(c.is_identity() for c in out)


def test_malnormal_witness(binary):
    g = malnormal_witness(binary, "0")
    assert is_prefix(A("0"), apply(g, "1"))
    assert compose(g, g).is_identity()
    with pytest.raises(PresentationError):
        malnormal_witness(binary, "")


def test_malnormal_spot_check(binary):
    g = malnormal_witness(binary, "0")
    rng = random.Random(2)
    for _ in range(100):
        f = random_element(binary, rng, within=[A("1")])
        if support_within(conjugate(f, g), [A("1")]):
            assert f.is_identity()


def test_unbounded_sequence(binary):
    assert len(unbounded_sequence(binary, "0", 1).reduce().regions) >= 3
    norms = [cocycle_norm_sq(unbounded_sequence(binary, "0", n)) for n in range(1, 11)]
    assert all(a < b for a, b in zip(norms, norms[1:]))
    assert all(v >= 2 * n for n, v in enumerate(norms, 1))
    with pytest.raises(PresentationError):
        unbounded_sequence(binary, "0", 0)


@pytest.mark.parametrize("which", ["s", "g0"])
def test_commutator_separation(which, s_elem, g0):
    g = s_elem if which == "s" else g0
    w = commutator_separation_witness(g)
    assert ball_status(w.commutator, w.ball) == "moved"
    assert ball_status(w.commutator, w.image) == "fixed"
    assert apply(g, w.ball) == w.image


def test_commutator_separation_errors(binary, qaut):
    with pytest.raises(PresentationError):
        commutator_separation_witness(identity(binary))
    with pytest.raises(ConstructionError):
        commutator_separation_witness(swap_involution(qaut, "1", "21"))
