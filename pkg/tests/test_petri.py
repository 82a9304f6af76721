"""Net semantics, exploration, and the brute-force oracles."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tfgkit.petri import (
    IncompleteStateSpaceError,
    Marking,
    NotEnabledError,
    PetriNet,
    enabled,
    explore,
    fire,
    is_safe,
    oracle_concurrency,
    oracle_reachable,
    random_walk,
)

T1 = PetriNet(("a", "b"), ("t",), {"t": {"a": 1}}, {"t": {"b": 1}})
D1 = PetriNet(("p", "q", "r"), ("t",), {"t": {"p": 1}}, {"t": {"q": 1, "r": 1}})
U1 = PetriNet(("x",), ("t",), {"t": {}}, {"t": {"x": 1}})


class TestMarking:
    def test_absent_place_reads_zero(self):
        m = Marking({"a": 1})
        assert m["a"] == 1
        assert m["b"] == 0

    def test_sparse_and_dense_compare_equal(self):
        assert Marking({"a": 1, "b": 0}) == Marking({"a": 1})
        assert hash(Marking({"a": 1, "b": 0})) == hash(Marking({"a": 1}))

    def test_is_safe(self):
        assert Marking({"a": 1}).is_safe
        assert not Marking({"a": 2}).is_safe

    def test_negative_count_rejected(self):
        with pytest.raises(ValueError):
            Marking({"a": -1})


class TestNetValidation:
    def test_place_transition_names_disjoint(self):
        with pytest.raises(ValueError):
            PetriNet(("a",), ("a",), {"a": {}}, {"a": {}})

    def test_unknown_place_in_flow(self):
        with pytest.raises(ValueError):
            PetriNet(("a",), ("t",), {"t": {"zz": 1}}, {"t": {}})

    def test_duplicate_places(self):
        with pytest.raises(ValueError):
            PetriNet(("a", "a"), (), {}, {})

    def test_zero_weight_rejected(self):
        with pytest.raises(ValueError):
            PetriNet(("a",), ("t",), {"t": {"a": 0}}, {"t": {}})


class TestEnabledFire:
    def test_single_enabled(self):
        assert enabled(T1, Marking({"a": 1})) == ["t"]

    def test_precondition_unmet(self):
        assert enabled(T1, Marking({"b": 1})) == []

    def test_d1_enabled(self):
        assert enabled(D1, Marking({"p": 1})) == ["t"]

    def test_fire_t1(self):
        assert fire(T1, Marking({"a": 1}), "t") == Marking({"b": 1})

    def test_fire_d1(self):
        assert fire(D1, Marking({"p": 1}), "t") == Marking({"q": 1, "r": 1})

    def test_fire_disabled_raises(self):
        with pytest.raises(NotEnabledError):
            fire(T1, Marking({"b": 1}), "t")


class TestExplore:
    def test_t1_space(self):
        space = explore(T1, Marking({"a": 1}), max_states=100, max_token=10)
        assert space.markings == frozenset({Marking({"a": 1}), Marking({"b": 1})})
        assert space.is_complete

    def test_d1_space(self):
        space = explore(D1, Marking({"p": 1}), max_states=100, max_token=10)
        assert space.markings == frozenset(
            {Marking({"p": 1}), Marking({"q": 1, "r": 1})}
        )
        assert space.is_complete

    def test_unbounded_truncates(self):
        space = explore(U1, Marking({}), max_states=5, max_token=10)
        assert not space.is_complete
        assert "truncated" in space.status

    def test_initial_always_present(self):
        space = explore(U1, Marking({}), max_states=1, max_token=10)
        assert Marking({}) in space.markings

    def test_edges_recorded_on_request(self):
        space = explore(T1, Marking({"a": 1}), record_edges=True)
        assert space.edges[Marking({"a": 1})] == (("t", Marking({"b": 1})),)


class TestOracles:
    def test_reachable_t1(self):
        space = explore(T1, Marking({"a": 1}))
        assert oracle_reachable(space, Marking({"b": 1}))
        assert not oracle_reachable(space, Marking({"a": 1, "b": 1}))
        assert oracle_reachable(space, space.initial)

    def test_reachable_refuses_truncated(self):
        space = explore(U1, Marking({}), max_states=2, max_token=10)
        with pytest.raises(IncompleteStateSpaceError):
            oracle_reachable(space, Marking({}))

    def test_concurrency_d1(self):
        space = explore(D1, Marking({"p": 1}))
        mat = oracle_concurrency(space, D1.places)
        assert mat.get("q", "r") == 1
        assert mat.get("p", "q") == 0
        assert mat.get("p", "r") == 0
        for place in D1.places:
            assert mat.get(place, place) == 1

    def test_concurrency_t1(self):
        space = explore(T1, Marking({"a": 1}))
        mat = oracle_concurrency(space, T1.places)
        assert mat.get("a", "b") == 0
        assert mat.get("a", "a") == 1
        assert mat.get("b", "b") == 1

    def test_dead_place_row_all_zero(self):
        net = PetriNet(("a", "b", "d"), ("t",), {"t": {"a": 1}}, {"t": {"b": 1}})
        space = explore(net, Marking({"a": 1}))
        mat = oracle_concurrency(space, net.places)
        assert mat.get("d", "d") == 0
        assert mat.get("d", "a") == 0
        assert mat.get("d", "b") == 0

    def test_concurrency_refuses_truncated(self):
        space = explore(U1, Marking({}), max_states=2, max_token=10)
        with pytest.raises(IncompleteStateSpaceError):
            oracle_concurrency(space, U1.places)

    def test_concurrency_implies_nondead(self, corpus):
        for inst in corpus:
            mat = oracle_concurrency(inst.space1, inst.net.places)
            for v, w, value in mat.cells():
                if value == 1:
                    assert mat.get(v, v) == 1 and mat.get(w, w) == 1


class TestRandomWalk:
    def test_zero_steps_returns_initial(self):
        assert random_walk(T1, Marking({"a": 1}), steps=0, seed=7) == Marking({"a": 1})

    def test_single_path(self):
        assert random_walk(T1, Marking({"a": 1}), steps=1, seed=0) == Marking({"b": 1})

    def test_deterministic(self):
        net = PetriNet(
            ("h", "x", "y"),
            ("tx", "ty", "bx", "by"),
            {"tx": {"h": 1}, "ty": {"h": 1}, "bx": {"x": 1}, "by": {"y": 1}},
            {"tx": {"x": 1}, "ty": {"y": 1}, "bx": {"h": 1}, "by": {"h": 1}},
        )
        runs = {random_walk(net, Marking({"h": 1}), steps=9, seed=42) for _ in range(5)}
        assert len(runs) == 1

    def test_walk_lands_on_reachable_marking(self, corpus):
        for inst in corpus[:10]:
            for seed in range(3):
                m = random_walk(inst.net, inst.m0, steps=7, seed=seed)
                assert oracle_reachable(inst.space1, m)


@st.composite
def small_nets(draw):
    n_places = draw(st.integers(1, 5))
    places = tuple(f"p{i}" for i in range(n_places))
    n_trans = draw(st.integers(0, 4))
    transitions = tuple(f"t{i}" for i in range(n_trans))
    pre = {}
    post = {}
    for t in transitions:
        pre[t] = draw(
            st.dictionaries(st.sampled_from(places), st.integers(1, 2), max_size=2)
        )
        post[t] = draw(
            st.dictionaries(st.sampled_from(places), st.integers(1, 2), max_size=2)
        )
    m0 = Marking(
        {p: draw(st.integers(0, 1)) for p in places}
    )
    return PetriNet(places, transitions, pre, post), m0


class TestProperties:
    @given(small_nets())
    def test_transition_order_does_not_change_marking_set(self, net_m0):
        net, m0 = net_m0
        space = explore(net, m0, max_states=200, max_token=2)
        reordered = PetriNet(
            net.places, tuple(reversed(net.transitions)), net.pre, net.post
        )
        other = explore(reordered, m0, max_states=200, max_token=2)
        if space.is_complete and other.is_complete:
            assert space.markings == other.markings

    @given(small_nets())
    def test_fired_markings_stay_nonnegative(self, net_m0):
        net, m0 = net_m0
        space = explore(net, m0, max_states=100, max_token=2)
        for m in space.markings:
            assert all(count >= 0 for _, count in m.items())

    def test_safe_corpus_spaces_are_one_bounded(self, corpus):
        for inst in corpus:
            assert is_safe(inst.space1), inst.name
