import itertools
import random

import pytest

from cssgroups.builders import malnormal_witness, swap_involution
from cssgroups.checks import (centralizer_probe, check_matrix, cocycle_identity_fuzz,
                              finite_support_points, finite_support_probe, group_law_fuzz,
                              in_rigid_stabilizer, is_irreducible, malnormal_probe,
                              noncommuting_partner, normal_form_fuzz, sft_from_matrix,
                              two_followed_symbols, verify_css_star)
from cssgroups.element import commutator, identity, random_element
from cssgroups.errors import PresentationError, Unsupported
from cssgroups.space import load_fixture, parse_address, parse_space, type_classes
from oracles import irreducible_by_powers

GOLDEN = [[1, 1], [1, 0]]


def all_matrices(n):
    for bits in itertools.product((0, 1), repeat=n * n):
        m = [list(bits[i * n:(i + 1) * n]) for i in range(n)]
        if all(any(r) for r in m):
            yield m


def random_matrix(rng, n):
    while True:
        p = rng.uniform(0.2, 0.8)
        m = [[int(rng.random() < p) for _ in range(n)] for _ in range(n)]
        if all(any(r) for r in m):
            return m


# matrices ------------------------------------------------------------------------------

def test_sft_from_golden_matrix(golden):
    space = sft_from_matrix(GOLDEN)
    assert space.children["R"] == ("0", "1")
    assert space.children["0"] == ("0", "1") and space.children["1"] == ("0",)
    assert len(set(type_classes(space).values())) == len(set(type_classes(golden).values()))
    assert space.type_class["R"] == space.type_class["0"] != space.type_class["1"]


def test_full_shift_has_one_type():
    space = sft_from_matrix([[1] * 3] * 3)
    assert len(set(space.type_class.values())) == 1


@pytest.mark.parametrize("m", [[[0, 1], [0, 0]], [[1, 2], [1, 1]], [[1, 1]], []])
def test_bad_matrices(m):
    with pytest.raises(PresentationError):
        check_matrix(m)


def test_irreducible_examples():
    assert is_irreducible(GOLDEN)
    assert not is_irreducible([[1, 1], [0, 1]])
    assert is_irreducible([[1] * 4] * 4)


def test_two_followed_examples():
    assert two_followed_symbols(GOLDEN) == ["0"]
    assert two_followed_symbols([[0, 1, 0], [0, 0, 1], [1, 0, 0]]) == []
    assert two_followed_symbols([[1] * 3] * 3) == ["0", "1", "2"]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_irreducible_exhaustive(n):
    for m in all_matrices(n):
        assert is_irreducible(m) == irreducible_by_powers(m), m


def test_irreducible_random_up_to_five():
    rng = random.Random(0)
    for _ in range(400):
        m = random_matrix(rng, rng.randint(4, 5))
        assert is_irreducible(m) == irreducible_by_powers(m), m


def test_irreducible_sft_with_branching_passes():
    rng = random.Random(1)
    done = 0
    while done < 200:
        m = random_matrix(rng, rng.randint(2, 6))
        if not irreducible_by_powers(m) or not any(sum(r) >= 2 for r in m):
            continue
        rep = verify_css_star(sft_from_matrix(m))
        assert rep.passed, m
        done += 1


def test_permutation_matrix_is_rejected():
    # every symbol has one follower: the tree is a bare ray
    with pytest.raises(PresentationError):
        sft_from_matrix([[0, 1], [1, 0]])


# the homogeneity conditions ------------------------------------------------------------------

@pytest.mark.parametrize("name", ["binary", "golden-mean", "qaut", "binary-flip"])
def test_css_star_pass(name):
    rep = verify_css_star(load_fixture(name))
    assert rep.passed and rep.to_doc()["verdict"] == "PASS"


def test_houghton_fails_both(houghton):
    rep = verify_css_star(houghton)
    assert not rep.condition1 and not rep.condition2
    assert rep.condition1_witness == "x1"
    assert rep.condition2_witness == ("x1", "x2")
    doc = rep.to_doc()
    assert doc["verdict"] == "FAIL" and doc["condition2_witness"] == ["x1", "x2"]


def test_finite_space_fails():
    space = parse_space({"symbols": ["r", "a"], "children": {"r": ["a", "a"], "a": []},
                         "root": "r", "terminals": ["a"]})
    assert not verify_css_star(space).passed


# probes ---------------------------------------------------------------------------------

def test_rigid_stabilizer(binary, s_elem):
    assert in_rigid_stabilizer(identity(binary), "0")
    assert not in_rigid_stabilizer(s_elem, "0")
    g = random_element(binary, random.Random(1), within=[parse_address("1")])
    assert in_rigid_stabilizer(g, "0")


def test_noncommuting_partner_for_s(s_elem):
    h = noncommuting_partner(s_elem, parse_address("0"))
    assert in_rigid_stabilizer(h, "0")
    assert not commutator(h, s_elem).is_identity()


@pytest.mark.parametrize("name", ["binary", "golden-mean", "qaut"])
def test_centralizer_probe(name):
    rep = centralizer_probe(load_fixture(name), "0", samples=60, seed=2)
    assert rep["positive_failures"] == 0 and rep["negative_failures"] == 0


def test_finite_support_probe(binary, qaut, houghton):
    assert finite_support_probe(binary, 10)["lambda_trivial"]
    rep = finite_support_probe(qaut, 60, seed=1)
    assert rep["failures"] == 0 and rep["n"] == 1
    assert finite_support_probe(houghton, 60, seed=1)["failures"] == 0
    with pytest.raises(Unsupported):
        finite_support_probe(load_fixture("binary-flip"), 5)


def test_finite_support_points(qaut, s_elem):
    t = swap_involution(qaut, "1", "21")
    assert finite_support_points(t) == {parse_address("1"), parse_address("21")}
    with pytest.raises(PresentationError):
        finite_support_points(s_elem)


def test_malnormal_probe(binary):
    g = malnormal_witness(binary, "0")
    rep = malnormal_probe(binary, "0", g, samples=100, seed=4)
    assert rep["counterexamples"] == 0 and rep["stabilized"] >= 10


def test_malnormal_probe_catches_a_bad_witness(binary):
    # the identity conjugates Γ_B into itself, so every f is a counterexample
    rep = malnormal_probe(binary, "0", identity(binary), samples=30, seed=4)
    assert rep["counterexamples"] > 0


# fuzz harnesses ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["binary", "binary-klein"])
def test_fuzz_harnesses(name):
    space = load_fixture(name)
    assert group_law_fuzz(space, 50, seed=3)["failures"] == 0
    assert normal_form_fuzz(space, 50, seed=3)["failures"] == 0
    assert cocycle_identity_fuzz(space, 50, seed=3)["failures"] == 0


def test_fuzz_is_deterministic(golden):
    assert group_law_fuzz(golden, 20, seed=9) == group_law_fuzz(golden, 20, seed=9)
