import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bpolsep.automata import EPSILON, EpsNfa, Nfa
from bpolsep.oracles import (
    ALL_CLASSES,
    BASES,
    AmtBackend,
    ClassSpec,
    GroupCatalogEntry,
    LinearSet,
    OracleCache,
    OracleUndecided,
    SemilinearSet,
    brute_force_group_search,
    default_catalog,
    eps_inseparable,
    get_backend,
    gr_relation,
    gr_relation_reference,
    inseparability_matrix,
    parikh_image,
    verify_morphism,
)
from bpolsep.oracles.groups import cyclic, direct_product, symmetric
from bpolsep.oracles.lattice import hnf, in_span, reduce

import reference as ref

AB = ("a", "b")
SINGLE = Nfa(2, ("a",), {(0, "a", 1)})
AB_PLUS = Nfa(3, AB, {(0, "a", 2), (2, "b", 1), (1, "a", 2)})  # (ab)+ from 0 to 1


def small_eps_nfas():
    """All epsilon-NFAs with <= 2 states, <= 2 letters and at most one epsilon edge."""
    for n in (1, 2):
        for alphabet in (("a",), AB):
            slots = [(s, a, d) for s in range(n) for a in alphabet for d in range(n)]
            eps_choices = [None] + [(s, EPSILON, d) for s in range(n) for d in range(n)]
            for mask in range(1 << len(slots)):
                base = {t for i, t in enumerate(slots) if mask >> i & 1}
                for e in eps_choices:
                    yield EpsNfa(n, alphabet, frozenset(base | ({e} if e else set())))


def rand_eps_nfa(rng, n, p=None, max_eps=2):
    p = rng.choice((0.15, 0.3, 0.5)) if p is None else p
    trans = {(s, a, d) for s in range(n) for a in AB for d in range(n) if rng.random() < p}
    trans |= {(rng.randrange(n), EPSILON, rng.randrange(n)) for _ in range(rng.randint(0, max_eps))}
    return EpsNfa(n, AB, frozenset(trans))


class TestClassSpec:
    @pytest.mark.parametrize("ident", ["bpol-st", "bpol-st+", "bpol-mod", "bpol-mod+", "bpol-amt", "bpol-amt+", "bpol-gr", "bpol-gr+"])
    def test_round_trip(self, ident):
        assert ClassSpec.parse(ident).ident == ident

    def test_unknown(self):
        with pytest.raises(ValueError):
            ClassSpec.parse("bpol-xyz")

    def test_all_classes(self):
        assert len(ALL_CLASSES) == 8 and len({c.ident for c in ALL_CLASSES}) == 8


class TestDispatcher:
    @pytest.mark.parametrize("base", BASES)
    def test_src_equals_dst(self, base):
        assert eps_inseparable(base, SINGLE, 1, 1, cache=None).inseparable

    @pytest.mark.parametrize("base", BASES)
    def test_empty_pair_language(self, base):
        assert not eps_inseparable(base, SINGLE, 1, 0, cache=None).inseparable

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            eps_inseparable("st", SINGLE, 0, 5)

    def test_cache_hits(self):
        cache = OracleCache()
        first = eps_inseparable("mod", AB_PLUS, 0, 1, cache=cache)
        second = eps_inseparable("mod", AB_PLUS, 0, 1, cache=cache)
        assert first == second and cache.hits == 1 and len(cache) == 1

    def test_trivial_facts_exhaustive(self):
        """Backends themselves (no dispatcher shortcut) respect the trivial facts."""
        backends = {b: get_backend(b) for b in BASES}
        count = 0
        for b in small_eps_nfas():
            n = b.state_count
            nodes = np.arange(n)
            for base, backend in backends.items():
                m = np.asarray(backend.matrix(b, nodes, nodes), dtype=bool)
                for s, d in itertools.product(range(n), repeat=2):
                    if s == d:
                        assert m[s, d], (base, b, s)
                    if not ref.nonempty(b, s, d) and s != d:
                        assert not m[s, d], (base, b, s, d)
            count += 1
        assert count > 1000

    def test_class_order_randomised(self):
        rng = random.Random(11)
        backends = {b: get_backend(b) for b in BASES}
        for _ in range(300):
            b = rand_eps_nfa(rng, rng.randint(1, 4))
            nodes = np.arange(b.state_count)
            m = {k: inseparability_matrix(v, b, nodes, nodes) for k, v in backends.items()}
            assert (m["mod"] <= m["st"]).all() and (m["gr"] <= m["mod"]).all()
            assert (m["amt"] <= m["st"]).all() and (m["gr"] <= m["amt"]).all()


class TestSt:
    def test_examples(self):
        assert eps_inseparable("st", SINGLE, 0, 1, cache=None).inseparable
        assert not eps_inseparable("st", SINGLE, 1, 0, cache=None).inseparable
        eps_only = EpsNfa(2, ("a",), {(0, EPSILON, 1)})
        assert eps_inseparable("st", eps_only, 0, 1, cache=None).inseparable


class TestMod:
    def test_single_letter_separable_with_modulus_two(self):
        ans = eps_inseparable("mod", SINGLE, 0, 1, cache=None)
        assert not ans.inseparable and ans.evidence == {"modulus": 2}

    def test_self_loop(self):
        loop = Nfa(1, ("a",), {(0, "a", 0)})
        assert eps_inseparable("mod", loop, 0, 0, cache=None).inseparable

    def test_cofinite_lengths(self):
        # a then a 2-cycle and a 3-cycle at state 1: lengths 1 + {2i + 3j}
        b = Nfa(5, ("a",), {(0, "a", 1), (1, "a", 2), (2, "a", 1), (1, "a", 3), (3, "a", 4), (4, "a", 1)})
        got = eps_inseparable("mod", b, 0, 1, cache=None).inseparable
        assert got and ref.mod_sweep(b, 0, 1)

    def test_union_of_progressions_is_separable(self):
        # lengths (1 + 2N) u (1 + 3N): the global cycle gcd is 1, yet m = 6 avoids 0
        b = EpsNfa(7, ("a",), {
            (0, "a", 1), (1, "a", 2), (2, "a", 1),  # 2-cycle after one letter
            (0, "a", 3), (3, "a", 4), (4, "a", 5), (5, "a", 3),  # 3-cycle after one letter
            (1, EPSILON, 6), (3, EPSILON, 6),
        })
        ans = eps_inseparable("mod", b, 0, 6, cache=None)
        assert not ans.inseparable and ans.evidence == {"modulus": 6}
        assert not ref.mod_sweep(b, 0, 6)

    def test_separating_modulus_is_genuine(self):
        rng = random.Random(2)
        for _ in range(200):
            b = rand_eps_nfa(rng, rng.randint(1, 4))
            s, d = rng.randrange(b.state_count), rng.randrange(b.state_count)
            ans = eps_inseparable("mod", b, s, d, cache=None)
            if not ans.inseparable and "modulus" in ans.evidence:
                assert not ref.lengths_hit_zero(b, s, d, ans.evidence["modulus"])

    def test_agrees_with_sweep(self):
        rng = random.Random(4)
        backend = get_backend("mod")
        for _ in range(300):
            b = rand_eps_nfa(rng, rng.randint(1, 4))
            nodes = np.arange(b.state_count)
            m = inseparability_matrix(backend, b, nodes, nodes)
            for s, d in itertools.product(range(b.state_count), repeat=2):
                assert m[s, d] == ref.mod_sweep(b, s, d), (b, s, d)


class TestLattice:
    def test_hnf_canonical(self):
        assert hnf([(2, 0), (0, 3), (2, 3)], 2) == hnf([(2, 3), (0, 3)], 2) == ((2, 0), (0, 3))

    def test_reduce(self):
        assert reduce((5, 7), ((2, 0), (0, 3))) == (1, 1)

    def test_in_span(self):
        assert in_span((1, 1), [(1, 1)])
        assert not in_span((1, 0), [(2, 0)])

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6)), max_size=4),
           st.tuples(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6)))
    def test_reduce_is_a_class_invariant(self, gens, v):
        basis = hnf(gens, 3)
        for g in gens:
            shifted = tuple(x + 2 * y for x, y in zip(v, g))
            assert reduce(shifted, basis) == reduce(v, basis)
            assert not any(reduce(g, basis))

    def test_linear_sets(self):
        assert LinearSet((1, 1), ((1, 1),)).contains_zero_mod_all()
        assert not LinearSet((1, 0), ((2, 0),)).contains_zero_mod_all()
        assert LinearSet((1, 0), ((2, 0),)).hits_zero_mod((1, 1))
        assert not LinearSet((1, 0), ((2, 0),)).hits_zero_mod((2, 1))


class TestAmt:
    def test_ab_plus_inseparable(self):
        assert eps_inseparable("amt", AB_PLUS, 0, 1, cache=None).inseparable

    def test_a_plus_b_separable(self):
        b = Nfa(3, AB, {(0, "a", 1), (1, "a", 1), (1, "b", 2)})
        ans = eps_inseparable("amt", b, 0, 2, cache=None)
        assert not ans.inseparable and ans.evidence["moduli"] == [1, 2]

    def test_odd_as_separable(self):
        b = Nfa(3, AB, {(0, "a", 1), (1, "a", 2), (2, "a", 1)})
        assert not eps_inseparable("amt", b, 0, 1, cache=None).inseparable
        assert not ref.parikh_hits_zero(b, 0, 1, (2, 1))

    def test_parikh_image_of_a_odd(self):
        b = Nfa(3, AB, {(0, "a", 1), (1, "a", 2), (2, "a", 1)})
        image = parikh_image(b, 0, 1)
        assert isinstance(image, SemilinearSet)
        assert all(len(c.base) == 2 for c in image.components)
        assert not image.zero_mod_all()

    def test_parikh_components_are_realised(self):
        """Bases, and bases plus one period, are Parikh vectors of actual words."""
        rng = random.Random(9)
        for _ in range(60):
            b = rand_eps_nfa(rng, rng.randint(1, 3))
            s, d = rng.randrange(b.state_count), rng.randrange(b.state_count)
            for comp in parikh_image(b, s, d).components:
                assert ref.has_parikh_vector(b, s, d, comp.base)
                for p in comp.periods:
                    assert ref.has_parikh_vector(b, s, d, tuple(x + y for x, y in zip(comp.base, p)))

    def test_budget_exhaustion_is_reported(self):
        b = Nfa(4, AB, {(0, "a", 1), (1, "a", 1), (1, "b", 2), (2, "b", 2), (2, "a", 3), (3, "b", 3), (3, "a", 1)})
        with pytest.raises(OracleUndecided):
            AmtBackend(budget=3).answer(b, 0, 3)

    def test_agrees_with_sweep(self):
        rng = random.Random(6)
        backend = get_backend("amt")
        for _ in range(120):
            b = rand_eps_nfa(rng, rng.randint(1, 3))
            nodes = np.arange(b.state_count)
            m = inseparability_matrix(backend, b, nodes, nodes)
            for s, d in itertools.product(range(b.state_count), repeat=2):
                assert m[s, d] == ref.amt_sweep(b, s, d), (b, s, d)

    def test_separating_moduli_are_genuine(self):
        rng = random.Random(8)
        for _ in range(100):
            b = rand_eps_nfa(rng, rng.randint(1, 3))
            s, d = rng.randrange(b.state_count), rng.randrange(b.state_count)
            ans = eps_inseparable("amt", b, s, d, cache=None)
            if not ans.inseparable and "moduli" in ans.evidence:
                assert not ref.parikh_hits_zero(b, s, d, tuple(ans.evidence["moduli"]))


class TestGr:
    def test_ab_plus_inseparable(self):
        assert eps_inseparable("gr", AB_PLUS, 0, 1, cache=None).inseparable

    def test_single_letter_separable(self):
        ans = eps_inseparable("gr", SINGLE, 0, 1, cache=None)
        assert not ans.inseparable and ans.evidence["group"] == "Z2"

    def test_odd_positions_separable(self):
        # a(ab)*: every word from 0 to 1 has odd length
        b = Nfa(3, AB, {(0, "a", 1), (1, "a", 2), (2, "b", 1)})
        assert not eps_inseparable("gr", b, 0, 1, cache=None).inseparable

    def test_edge_into_dead_end_is_not_reversed(self):
        # L(0, 3) = a b* a; the last edge leaves the component of 1, so it is never reversed
        b = Nfa(4, AB, {(0, "a", 1), (1, "b", 1), (1, "a", 3)})
        assert not gr_relation(b)[0, 3]
        assert brute_force_group_search(b, 0, 3) is not None

    def test_matches_literal_loop_rule(self):
        rng = random.Random(12)
        for _ in range(150):
            b = rand_eps_nfa(rng, rng.randint(1, 4))
            assert np.array_equal(gr_relation(b), gr_relation_reference(b)), b

    def test_sound_against_group_catalog(self):
        rng = random.Random(13)
        for _ in range(200):
            b = rand_eps_nfa(rng, rng.randint(1, 4))
            s, d = rng.randrange(b.state_count), rng.randrange(b.state_count)
            if gr_relation(b)[s, d]:
                assert brute_force_group_search(b, s, d) is None


class TestGroups:
    def test_catalog_contents(self):
        names = {g.name for g in default_catalog()}
        assert {f"Z{n}" for n in range(2, 13)} <= names
        assert {"Z2xZ2", "Z2xZ4", "S3", "S4"} <= names

    @pytest.mark.parametrize("group", default_catalog(), ids=lambda g: g.name)
    def test_group_laws(self, group):
        n = group.order
        for x in range(n):
            assert any(group.mul(x, y) == 0 for y in range(n))

    def test_orders(self):
        assert symmetric(4).order == 24 and direct_product(cyclic(2), cyclic(4)).order == 8

    def test_rejects_non_group(self):
        with pytest.raises(ValueError):
            GroupCatalogEntry("bad", ((0, 1), (1, 1)))

    def test_rejects_non_associative(self):
        # a Latin square with identity 0 that is not associative
        table = ((0, 1, 2, 3, 4), (1, 0, 3, 4, 2), (2, 4, 0, 1, 3), (3, 2, 4, 0, 1), (4, 3, 1, 2, 0))
        with pytest.raises(ValueError):
            GroupCatalogEntry("quasi", table)

    def test_single_letter(self):
        group, images = brute_force_group_search(SINGLE, 0, 1)
        assert group.name == "Z2" and images == [1]

    def test_ab_plus_has_no_separator(self):
        assert brute_force_group_search(AB_PLUS, 0, 1) is None

    def test_src_equals_dst(self):
        assert brute_force_group_search(AB_PLUS, 1, 1) is None

    def test_results_verified_independently(self):
        rng = random.Random(21)
        for _ in range(100):
            b = rand_eps_nfa(rng, rng.randint(1, 3))
            s, d = rng.randrange(b.state_count), rng.randrange(b.state_count)
            found = brute_force_group_search(b, s, d)
            if found is not None:
                group, images = found
                assert verify_morphism(b, s, d, group, images)
                imap = dict(zip(b.alphabet, images))
                assert not ref.group_word_hits_identity(b, s, d, group.mul, 0, imap)
