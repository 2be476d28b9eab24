"""Model layer: partial operations, their laws, classification, enumeration."""

import pytest

from compalg.errors import (
    ChainMismatch,
    CoarsenMismatch,
    GroundSetTooLarge,
    InsertMismatch,
    NotAFactor,
    NotRefinable,
    TooManyPaths,
)
from compalg.model import (
    GroundSet,
    atomic_measurement,
    chain,
    classify,
    coarsen,
    enumerate_partitions,
    enumerate_paths,
    equal_measurements,
    factorize,
    find_igps,
    fully_coarse_measurement,
    insert_cyclic,
    insert_measurement,
    is_possible,
    measurement,
    path,
    refine,
    reverse,
    sequence,
    unchain_left,
    unchain_right,
    weakly_equivalent,
)

from conftest import AM, BM, DM, G3, GM, UM

N = GroundSet("N", ("n1", "n2"))
AN = atomic_measurement(N, "aN")
O_ = GroundSet("O", ("o1", "o2"))
AO = atomic_measurement(O_, "aO")


def test_weak_equivalence():
    assert weakly_equivalent(AM, BM)
    assert weakly_equivalent(AM, AM)
    assert not weakly_equivalent(AM, AN)


def test_measurement_equality():
    assert equal_measurements(AM, AM)
    assert not equal_measurements(AM, DM)
    relabeled = measurement("other-label", G3, [["m2"], ["m1"], ["m"]])
    assert equal_measurements(AM, relabeled)


def test_partition_invariant_enforced():
    with pytest.raises(ValueError):
        measurement("bad", G3, [["m"], ["m1"]])  # misses m2
    with pytest.raises(ValueError):
        measurement("bad", G3, [["m", "m1"], ["m1", "m2"]])  # overlap


def test_sequence_invariants():
    with pytest.raises(ValueError):
        sequence([AM])
    with pytest.raises(ValueError):
        sequence([BM, AM])  # non-atomic source
    with pytest.raises(ValueError):
        sequence([AM, UM])  # non-atomic target


def test_path_results_must_be_detectors():
    with pytest.raises(ValueError):
        path([AM, AM], [["m"], ["m", "m1"]])


# -- chaining -------------------------------------------------------------------

def test_chain_length_and_junction():
    a = path([AN, AM], [["n1"], ["m"]])
    b = path([AM, AO], [["m"], ["o1"]])
    c = chain(a, b)
    assert len(c) == 3
    assert c.results == (frozenset({"n1"}), frozenset({"m"}), frozenset({"o1"}))


def test_chain_mismatch():
    a = path([AN, AM], [["n1"], ["m"]])
    b = path([AM, AO], [["m1"], ["o1"]])
    with pytest.raises(ChainMismatch):
        chain(a, b)
    with pytest.raises(ChainMismatch):
        chain(a, path([AN, AO], [["n1"], ["o1"]]))


def test_chain_with_trivial_path_is_redundant():
    from compalg.model import equivalent
    a = path([AN, AM], [["n1"], ["m"]])
    trivial = path([AM, AM], [["m"], ["m"]])
    assert equivalent(chain(a, trivial), a)


def test_chain_associativity():
    a = path([AN, AM], [["n1"], ["m"]])
    b = path([AM, AO], [["m"], ["o1"]])
    c = path([AO, AN], [["o1"], ["n2"]])
    assert chain(chain(a, b), c) == chain(a, chain(b, c))


def test_unchaining_roundtrips():
    a = path([AN, AM], [["n1"], ["m"]])
    b = path([AM, AO], [["m"], ["o1"]])
    c = chain(a, b)
    assert unchain_right(c, b) == a
    assert unchain_left(a, c) == b
    with pytest.raises(NotAFactor):
        unchain_right(c, path([AN, AO], [["n1"], ["o1"]]))
    with pytest.raises(NotAFactor):
        unchain_right(c, c)


# -- coarsening and refinement ------------------------------------------------------

def bracket(mid_result):
    return path([AN, AM, AN], [["n1"], mid_result, ["n1"]])


def test_coarsen_merges_blocks():
    c = coarsen(bracket(["m"]), bracket(["m1"]))
    assert c.results[1] == frozenset({"m", "m1"})
    assert c.steps[1].blocks == frozenset({
        frozenset({"m", "m1"}), frozenset({"m2"})})


def test_coarsen_commutative():
    a, b = bracket(["m"]), bracket(["m1"])
    assert coarsen(a, b) == coarsen(b, a)


def test_coarsen_partial_associativity():
    a, b, c = bracket(["m"]), bracket(["m1"]), bracket(["m2"])
    assert coarsen(coarsen(a, b), c) == coarsen(a, coarsen(b, c))


def test_coarsen_endpoint_rejected():
    a = path([AN, AM], [["n1"], ["m"]])
    b = path([AN, AM], [["n2"], ["m"]])
    with pytest.raises(CoarsenMismatch):
        coarsen(a, b)


def test_coarsen_overlapping_rejected():
    a = bracket(["m"])
    with pytest.raises(CoarsenMismatch):
        coarsen(a, a)


def test_coarsen_extended_over_redundant_representatives():
    # operands of different lengths align after removing a duplicated step
    a = path([AN, AM, AM, AN], [["n1"], ["m"], ["m"], ["n1"]])
    b = bracket(["m1"])
    c = coarsen(a, b)
    assert c.results[1] == frozenset({"m", "m1"})


def test_refine_examples():
    a, b = bracket(["m"]), bracket(["m1"])
    c = coarsen(a, b)
    assert refine(c, b) == a
    assert refine(c, a) == b
    with pytest.raises(NotRefinable):
        refine(c, bracket(["m2"]))
    with pytest.raises(NotRefinable):
        refine(a, c)


def test_distributivity_of_chaining_over_coarsening():
    pre = path([AO, AN], [["o1"], ["n1"]])
    b, c = bracket(["m"]), bracket(["m1"])
    left = chain(pre, coarsen(b, c))
    right = coarsen(chain(pre, b), chain(pre, c))
    assert left == right
    post = path([AN, AO], [["n1"], ["o2"]])
    assert chain(coarsen(b, c), post) == coarsen(chain(b, post), chain(c, post))


# -- reversal -----------------------------------------------------------------------

def test_reverse_basics():
    a = path([AN, AM, AO], [["n1"], ["m"], ["o2"]])
    r = reverse(a)
    assert r.results == tuple(reversed(a.results))
    assert reverse(r) == a


def test_reverse_antidistributes_over_chain():
    a = path([AN, AM], [["n1"], ["m"]])
    b = path([AM, AO], [["m"], ["o1"]])
    assert reverse(chain(a, b)) == chain(reverse(b), reverse(a))


def test_reverse_distributes_over_coarsen():
    b, c = bracket(["m"]), bracket(["m1"])
    assert reverse(coarsen(b, c)) == coarsen(reverse(b), reverse(c))


def test_reverse_of_symmetric_path_is_itself():
    a = path([AN, AM, AN], [["n1"], ["m"], ["n1"]])
    assert reverse(a) == a


# -- insertion ------------------------------------------------------------------------

def test_insert_single_certain_measurement():
    a = path([AN, AO], [["n1"], ["o1"]])
    grown = insert_measurement(a, 1, UM, G3.elements)
    assert len(grown) == 3
    assert grown.results[1] == frozenset(G3.elements)
    with pytest.raises(InsertMismatch):
        insert_measurement(a, 0, UM, G3.elements)
    with pytest.raises(InsertMismatch):
        insert_measurement(a, 2, UM, G3.elements)


def test_insert_cyclic_path():
    a = path([AN, AM, AO], [["n1"], ["m"], ["o1"]])
    x = path([AM, AO, AM], [["m"], ["o2"], ["m"]])
    grown = insert_cyclic(a, 1, x)
    assert len(grown) == len(a) + len(x) - 1
    assert [sorted(r) for r in grown.results] == \
        [["n1"], ["m"], ["o2"], ["m"], ["o1"]]
    non_cyclic = path([AM, AO], [["m"], ["o1"]])
    with pytest.raises(InsertMismatch):
        insert_cyclic(a, 1, non_cyclic)
    with pytest.raises(InsertMismatch):
        insert_cyclic(a, 2, x)  # junction measurement differs


# -- factorization ----------------------------------------------------------------------

def test_factorize_at_interior_atomic_steps():
    a = path([AN, AM, AO], [["n1"], ["m"], ["o1"]])
    parts = factorize(a)
    assert len(parts) == 2
    assert parts[0] == path([AN, AM], [["n1"], ["m"]])
    assert parts[1] == path([AM, AO], [["m"], ["o1"]])
    rebuilt = parts[0]
    for f in parts[1:]:
        rebuilt = chain(rebuilt, f)
    assert rebuilt == a


def test_factorize_three_factors():
    a = path([AN, AM, AO, AN], [["n1"], ["m"], ["o1"], ["n2"]])
    assert len(factorize(a)) == 3


def test_factorize_undecomposable():
    a = path([AN, UM, AO], [["n1"], G3.elements, ["o1"]])
    assert factorize(a) == [a]


# -- impossibility ------------------------------------------------------------------------

def test_find_igps_worked_example():
    b = path([AM, BM, GM, AM], [["m1"], ["m2"], ["m1", "m2"], ["m1"]])
    igps = find_igps(b)
    assert (0, 1) in igps and igps
    a = path([AM, BM, GM, AM], [["m1"], ["m", "m1"], ["m1", "m2"], ["m1"]])
    assert find_igps(a) == ()
    trivial = path([AM, AM], [["m"], ["m"]])
    assert find_igps(trivial) == ()


def test_thread_death_without_adjacent_disjointness():
    # every adjacent pair overlaps, yet no single element survives the run
    c = path([AM, BM, GM, AM], [["m1"], ["m", "m1"], ["m"], ["m"]])
    assert find_igps(c) == ((1, 2),)
    assert not is_possible(c)


def test_possible_path_count_from_fixed_source():
    s = sequence([AM, BM, GM, AM])
    start = frozenset({"m1"})
    possible = [p for p in enumerate_paths(s)
                if p.results[0] == start and is_possible(p)]
    assert len(possible) == 1


# -- classification --------------------------------------------------------------------------

def test_classify_cyclic_not_symmetric():
    p = path([AN, AM, AO, DM, AN], [["n1"], ["m1"], ["o1"], ["m1"], ["n1"]])
    flags = classify(p)
    assert flags.cyclic and not flags.symmetric
    assert flags.possible and not flags.trivial


def test_classify_symmetric():
    p = path([AN, AM, AN], [["n1"], ["m"], ["n1"]])
    flags = classify(p)
    assert flags.symmetric and flags.cyclic


def test_classify_trivial():
    p = path([AM, AM], [["m"], ["m"]])
    flags = classify(p)
    assert flags.trivial and flags.symmetric and flags.cyclic and flags.possible


def test_classify_symmetric_in_nonredundant_form_only():
    p = path([AN, AM, AM, AN], [["n1"], ["m"], ["m"], ["n1"]])
    assert classify(p).symmetric


# -- enumeration -------------------------------------------------------------------------------

def test_enumerate_partitions_counts():
    assert len(enumerate_partitions(G3)) == 5
    g1 = GroundSet("g1", ("only",))
    assert len(enumerate_partitions(g1)) == 1
    g4 = GroundSet("g4", tuple("abcd"))
    assert len(enumerate_partitions(g4)) == 15
    big = GroundSet("big", tuple(f"e{i}" for i in range(11)))
    with pytest.raises(GroundSetTooLarge):
        enumerate_partitions(big)


def test_enumerate_partitions_matches_worked_five():
    found = {m.blocks for m in enumerate_partitions(G3)}
    expected = {m.blocks for m in (AM, BM, GM, DM, UM)}
    assert found == expected


def test_enumerate_paths_product_count():
    s = sequence([AM, AN])
    assert len(enumerate_paths(s)) == 6
    with pytest.raises(TooManyPaths):
        enumerate_paths(s, max_paths=5)


def test_enumerate_paths_fully_coarse_interior():
    s = sequence([AN, UM, AN])
    paths_ = enumerate_paths(s)
    assert len(paths_) == 4  # 2 sources x 1 interior x 2 targets
    starts = {p.results[0] for p in paths_}
    assert starts == {frozenset({"n1"}), frozenset({"n2"})}


def test_length_bookkeeping():
    a = path([AN, AM], [["n1"], ["m"]])
    b = path([AM, AO], [["m"], ["o1"]])
    assert len(chain(a, b)) == len(a) + len(b) - 1
    grown = insert_measurement(chain(a, b), 1, UM, G3.elements)
    assert len(grown) == len(chain(a, b)) + 1


def test_classify_flag_invariants():
    from conftest import universe_paths
    from compalg.model import normal_form, is_possible, reverse as rev
    for p in universe_paths([G3], 4):
        flags = classify(p)
        assert flags.possible == (not flags.igps)
        if flags.symmetric:
            assert flags.cyclic
        if flags.trivial:
            assert flags.possible and flags.symmetric
        if flags.possible and flags.symmetric:
            nf = normal_form(p)
            assert rev(nf) == nf
