"""Finite group actions: profiles, block systems, reconstruction, search."""

import random

import numpy as np
import pytest

from returnspec.gset import (
    Action,
    BlockSystem,
    CapExceededError,
    GSetError,
    PermGroup,
    actions_isomorphic,
    block_system_generated,
    catalog,
    check_reconstruction,
    enumerate_group,
    expand_catalog_names,
    is_simple,
    profile_codes,
    reconstruct_from_return_subset,
    return_subset,
    search_counterexamples,
    setwise_stabilizer,
    sweep_reconstruction,
    transitive_actions,
    verify_certificate,
    verify_sweep_record,
)

from oracles import (
    close_generators,
    coarsest_valid_partition,
    invariant_partitions,
    naive_profile_partition,
    naive_setwise_stabilizer,
)


def cyc(n):
    return tuple((i + 1) % n for i in range(n))


def test_generate_closure_matches_bfs_oracle():
    cases = [
        [cyc(5)],                                  # C5
        [cyc(4), (0, 3, 2, 1)],                    # D4
        [(1, 0, 2, 3), cyc(4)],                    # S4
        [(1, 2, 0, 3), (0, 2, 3, 1)],              # A4 from two 3-cycles
    ]
    for gens in cases:
        G = PermGroup.generate(gens)
        assert set(G.elements) == close_generators(gens)
        assert G.elements == tuple(sorted(G.elements))  # canonical order
        assert G.elements[0] == tuple(range(G.degree))  # identity first


def test_group_laws_and_index():
    G = PermGroup.generate([cyc(4), (0, 3, 2, 1)])  # D4, order 8
    assert G.order == 8
    rng = random.Random(3)
    e = G.index(tuple(range(G.degree)))
    for _ in range(50):
        i, j, k = (rng.randrange(G.order) for _ in range(3))
        assert G.mul[i, e] == i and G.mul[e, i] == i
        assert G.mul[i, G.inv[i]] == e
        assert G.mul[G.mul[i, j], k] == G.mul[i, G.mul[j, k]]
        pi, pj = G.elements[i], G.elements[j]
        composed = tuple(pi[pj[x]] for x in range(G.degree))
        assert G.mul[i, j] == G.index(composed)


def test_generate_cap():
    s8 = [tuple([1, 0] + list(range(2, 8))), cyc(8)]
    with pytest.raises(CapExceededError):
        PermGroup.generate(s8)
    with pytest.raises(CapExceededError):
        enumerate_group(s8)
    big = PermGroup.generate(s8, cap=50000)
    assert big.order == 40320


def test_catalog_contents():
    cat = catalog()
    assert list(cat) == ["C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10",
                         "C11", "C12", "D3", "D4", "D5", "D6", "S3", "S4", "A4", "Q8"]
    orders = {name: G.order for name, G in cat.items()}
    assert orders["C7"] == 7 and orders["C12"] == 12
    assert orders["D3"] == 6 and orders["D6"] == 12
    assert orders["S3"] == 6 and orders["S4"] == 24
    assert orders["A4"] == 12 and orders["Q8"] == 8
    # Q8 has a unique element of order 2 (minus one), unlike D4
    Q8 = cat["Q8"]
    e = Q8.index(tuple(range(Q8.degree)))
    order2 = [g for g in range(8) if g != e and Q8.mul[g, g] == e]
    assert len(order2) == 1


def test_expand_catalog_names():
    assert expand_catalog_names("C2..C4, S3") == ["C2", "C3", "C4", "S3"]
    assert expand_catalog_names(["D3..D5"]) == ["D3", "D4", "D5"]
    # expansion only unfolds ranges; catalog() is where names are validated
    assert expand_catalog_names("E8") == ["E8"]
    with pytest.raises(GSetError):
        catalog("E8")
    assert catalog("C1")["C1"].order == 1  # trivial group is allowed


def test_transitive_actions_of_s4():
    G = catalog("S4")["S4"]
    acts = transitive_actions(G)
    assert [a.degree for a in acts] == [1, 2, 3, 4, 6, 6, 6, 8, 12, 12, 24]
    for a in acts:
        assert a.is_transitive()
        assert len(a.stabilizer(0)) * a.degree == G.order
    # without conjugacy folding there is one action per subgroup
    assert len(transitive_actions(G, up_to_conjugacy=False)) == 30


def test_subgroup_counts_frozen():
    S4 = catalog("S4")["S4"]
    assert len(S4.subgroups) == 30
    assert len(S4.subgroup_classes) == 11
    A4 = catalog("A4")["A4"]
    assert len(A4.subgroups) == 10
    assert len(A4.subgroup_classes) == 5


def test_coset_action_stabilizer_is_the_subgroup():
    G = catalog("S4")["S4"]
    for cls in G.subgroup_classes:
        H = cls[0]
        act = Action.on_cosets(G, H)
        assert act.stabilizer(0) == H
        assert act.degree * len(H) == G.order


def test_regular_action_is_the_multiplication_table():
    G = catalog("D4")["D4"]
    reg = Action.regular(G)
    assert reg.degree == G.order
    assert np.array_equal(reg.table, G.mul)
    assert reg.stabilizer(0) == frozenset({G.index(tuple(range(G.degree)))})


def test_orbits_partition_nontransitive_action():
    G = PermGroup.generate([(1, 0, 2, 3)])  # single swap, C2 on 4 points
    act = Action.natural(G)
    orbs = sorted(act.orbits(), key=min)
    assert orbs == [frozenset({0, 1}), frozenset({2}), frozenset({3})]
    assert not act.is_transitive()


def test_profile_codes_match_naive_buckets():
    rng = random.Random(19)
    actions = []
    for name in ("C6", "D4", "S4", "A4"):
        G = catalog(name)[name]
        actions.extend(transitive_actions(G))
    for _ in range(200):
        act = rng.choice(actions)
        mask = np.array([rng.random() < 0.4 for _ in range(act.degree)])
        codes = profile_codes(act, mask)
        blocks = {}
        for x in range(act.degree):
            blocks.setdefault(int(codes[x]), set()).add(x)
        got = sorted((frozenset(b) for b in blocks.values()), key=min)
        assert got == naive_profile_partition(act.table, mask)


def test_setwise_stabilizer_matches_naive():
    rng = random.Random(29)
    for name in ("C8", "D6", "S4"):
        G = catalog(name)[name]
        act = Action.natural(G) if name != "S4" else transitive_actions(G)[4]
        for _ in range(60):
            subset = [x for x in range(act.degree) if rng.random() < 0.5]
            assert set(setwise_stabilizer(act, subset)) == naive_setwise_stabilizer(
                act.table, subset)


def test_c4_worked_example():
    C4 = catalog("C4")["C4"]
    nat = Action.natural(C4)
    st = setwise_stabilizer(nat, [0, 2])
    assert {C4.elements[g] for g in st} == {(1, 2, 3, 0), (0, 1, 2, 3), (2, 3, 0, 1)} - {(1, 2, 3, 0)}
    bs = block_system_generated(nat, [0, 2])
    assert set(bs.blocks) == {frozenset({0, 2}), frozenset({1, 3})}
    assert not is_simple(nat, [0, 2])
    assert not bs.is_discrete()
    assert bs.is_invariant(nat)
    assert is_simple(nat, [0])
    assert block_system_generated(nat, [0]).is_discrete()


def test_block_system_is_coarsest_invariant_partition():
    # brute force over every set partition on every subset of small actions
    for name in ("C4", "C6", "S3", "D4"):
        G = catalog(name)[name]
        for act in transitive_actions(G):
            if act.degree > 6:
                continue
            inv = invariant_partitions(act.table)
            for bits in range(1 << act.degree):
                mask = np.array([(bits >> x) & 1 == 1 for x in range(act.degree)])
                got = sorted(block_system_generated(act, mask).blocks, key=min)
                want = coarsest_valid_partition(inv, mask)
                assert got == want


def test_return_subset_membership_law():
    rng = random.Random(37)
    for name in ("C6", "D4", "A4"):
        G = catalog(name)[name]
        for act in transitive_actions(G)[:4]:
            for _ in range(10):
                mask = np.array([rng.random() < 0.4 for _ in range(act.degree)])
                x0 = rng.randrange(act.degree)
                s = return_subset(act, x0, mask)
                assert s.dtype == bool and s.shape == (G.order,)
                for g in range(G.order):
                    assert s[g] == mask[act.apply(g, x0)]


def test_return_subset_operator_laws():
    rng = random.Random(41)
    G = catalog("D6")["D6"]
    act = Action.natural(G)
    n, order = act.degree, G.order
    for _ in range(40):
        u = np.array([rng.random() < 0.5 for _ in range(n)])
        v = np.array([rng.random() < 0.5 for _ in range(n)])
        x0 = rng.randrange(n)
        su, sv = return_subset(act, x0, u), return_subset(act, x0, v)
        # complements and intersections pass through the operator
        assert np.array_equal(return_subset(act, x0, ~u), ~su)
        assert np.array_equal(return_subset(act, x0, u & v), su & sv)
        # translating U by g translates S on the left
        g = rng.randrange(order)
        gu = np.zeros_like(u)
        for x in np.flatnonzero(u):
            gu[act.apply(g, int(x))] = True
        sgu = return_subset(act, x0, gu)
        left = np.zeros_like(su)
        for h in np.flatnonzero(su):
            left[int(G.mul[g, int(h)])] = True
        assert np.array_equal(sgu, left)


def test_reconstruction_round_trip_on_simple_subsets():
    rng = random.Random(43)
    for name in ("C5", "C6", "D4", "S3", "A4"):
        G = catalog(name)[name]
        for act in transitive_actions(G):
            if act.degree > 8:
                continue
            for bits in range(1 << act.degree):
                mask = np.array([(bits >> x) & 1 == 1 for x in range(act.degree)])
                if not is_simple(act, mask):
                    continue
                assert check_reconstruction(act, 0, mask)


def test_reconstruction_of_quotient_for_non_simple_subset():
    C4 = catalog("C4")["C4"]
    nat = Action.natural(C4)
    mask = np.array([True, False, True, False])
    s = return_subset(nat, 0, mask)
    rec = reconstruct_from_return_subset(C4, s)
    # the rebuilt action only sees the two blocks
    assert rec.action.degree == 2
    assert rec.action.is_transitive()
    # and it still reproduces the observed return subset exactly
    back = return_subset(rec.action, rec.base_point, rec.subset)
    assert np.array_equal(back, s)


def test_reconstructed_degree_equals_block_count():
    rng = random.Random(47)
    for name in ("C6", "D4", "S4"):
        G = catalog(name)[name]
        for act in transitive_actions(G)[:5]:
            for _ in range(15):
                mask = np.array([rng.random() < 0.5 for _ in range(act.degree)])
                s = return_subset(act, 0, mask)
                rec = reconstruct_from_return_subset(G, s)
                assert rec.action.degree == block_system_generated(act, mask).size
                back = return_subset(rec.action, rec.base_point, rec.subset)
                assert np.array_equal(back, s)


def test_actions_isomorphic_positive_and_mapping_validity():
    C4 = catalog("C4")["C4"]
    nat = Action.natural(C4)
    m = actions_isomorphic(nat, 0, nat, 2)
    assert m is not None
    assert m[0] == 2
    for g in range(C4.order):
        for x in range(nat.degree):
            assert m[nat.apply(g, x)] == nat.apply(g, int(m[x]))


def test_actions_isomorphic_separates_degree_six_cousins():
    G = catalog("S4")["S4"]
    sixes = [a for a in transitive_actions(G) if a.degree == 6]
    assert len(sixes) == 3
    for i in range(3):
        assert actions_isomorphic(sixes[i], 0, sixes[i]) is not None
        for j in range(3):
            if i != j:
                assert actions_isomorphic(sixes[i], 0, sixes[j]) is None


def test_verify_certificate_positive_and_tampered():
    G = catalog("D6")["D6"]
    recs = search_counterexamples({"D6": G}, exhaustive_degree=12, samples=32, seed=0)
    ces = [r for r in recs if r.is_counterexample]
    assert len(ces) == 6  # regular D6 action: six stable non-simple orbit reps
    acts = {a.name: a for a in transitive_actions(G)}
    for r in ces:
        assert r.orbit_size == 12
        assert r.stable and not r.simple
        assert r.stabilizer_order == 1
        assert r.certificate_verified
        act = acts[r.action]
        assert verify_certificate(act, r.subset, r.certificate)
        # tamper: swap one point between the first two blocks
        blocks = [list(b) for b in r.certificate]
        blocks[0][0], blocks[1][0] = blocks[1][0], blocks[0][0]
        assert not verify_certificate(act, r.subset, blocks)
        # a discrete "certificate" never certifies a counterexample
        singletons = [[x] for x in range(act.degree)]
        assert not verify_certificate(act, r.subset, singletons)


def test_small_groups_have_no_counterexamples():
    groups = catalog("C2..C6, S3, D4")
    recs = search_counterexamples(groups, exhaustive_degree=12, samples=64, seed=0)
    assert recs  # the search did cover these groups
    assert not [r for r in recs if r.is_counterexample]
    for r in recs:
        if r.certificate is not None:
            assert r.certificate_verified


def test_a4_counterexamples_frozen():
    G = catalog("A4")["A4"]
    recs = search_counterexamples({"A4": G}, exhaustive_degree=12, samples=32, seed=0)
    ces = [r for r in recs if r.is_counterexample]
    assert len(ces) == 6
    assert all(r.degree == 12 for r in ces)  # they all live on the regular action
    assert all(r.certificate_verified for r in ces)


def test_sweep_records_and_independent_reverification():
    groups = catalog("C4, S3")
    records = sweep_reconstruction(groups, exhaustive_degree=12, samples=32, seed=1)
    assert sum(r.failures for r in records) == 0
    by_key = {(r.group, r.action): r for r in records}
    nat_c4 = by_key[("C4", "C4/H1.0")]
    assert nat_c4.degree == 4
    assert nat_c4.mode == "exhaustive"
    assert nat_c4.subsets_tested == 6   # subset orbits of C4 on itself
    assert nat_c4.simple_count == 3     # {}, {0}, {0,1} up to translation
    for r in records:
        assert r.witness_ok
        assert verify_sweep_record(groups, r)
    # tampering with the reported verdict must be caught
    bad = nat_c4.__class__(**{**nat_c4.__dict__, "witness_ok": False})
    assert not verify_sweep_record(groups, bad)


def test_sampled_mode_kicks_in_above_exhaustive_degree():
    G = catalog("S4")["S4"]
    recs = search_counterexamples({"S4": G}, exhaustive_degree=8, samples=40, seed=5)
    modes = {r.degree: r.mode for r in recs}
    assert modes[24] == "sampled"
    assert modes[4] == "exhaustive"
    sampled = [r for r in recs if r.mode == "sampled"]
    assert all(r.seed == 5 for r in sampled)


def test_block_system_helpers():
    bs = BlockSystem.from_labels([0, 1, 0, 1])
    assert bs.size == 2
    assert bs.block_of(2) == frozenset({0, 2})
    assert not bs.is_discrete()
    C4 = catalog("C4")["C4"]
    assert bs.is_invariant(Action.natural(C4))
    lop = BlockSystem.from_labels([0, 0, 1, 1])
    assert not lop.is_invariant(Action.natural(C4))
