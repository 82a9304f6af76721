"""Text format round-trips and parse errors."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tfgkit.net_io import (
    DuplicateAssignmentError,
    DuplicateNameError,
    MatrixDocument,
    ParseError,
    RaggedRowError,
    TaggedEquation,
    UnknownPlaceError,
    UnsupportedFeatureError,
    parse_equations,
    parse_marking_query,
    parse_matrix,
    parse_net,
    parse_pnml,
    write_equations,
    write_marking_query,
    write_matrix,
    write_net,
)
from tfgkit.petri import Marking

CASCADE_EQUATIONS = """\
# R |- p5 = p4
# A |- a1 = p2 + p1
# A |- a2 = p4 + p3
# R |- a1 = a2
"""


class TestParseNet:
    def test_t1(self):
        net, m0 = parse_net("pl a 1\npl b 0\ntr t a -> b")
        assert net.places == ("a", "b")
        assert net.transitions == ("t",)
        assert net.pre["t"] == {"a": 1}
        assert net.post["t"] == {"b": 1}
        assert m0 == Marking({"a": 1})

    def test_d1(self):
        net, m0 = parse_net("pl p 1\npl q 0\npl r 0\ntr t p -> q r")
        assert net.post["t"] == {"q": 1, "r": 1}

    def test_undeclared_place(self):
        with pytest.raises(UnknownPlaceError):
            parse_net("tr t x -> y")

    def test_weighted_arcs(self):
        net, _ = parse_net("pl a 0\npl b 0\ntr t a*2 -> b*3")
        assert net.pre["t"] == {"a": 2}
        assert net.post["t"] == {"b": 3}

    def test_comments_and_blanks(self):
        net, _ = parse_net("# heading\n\npl a 1\n  # indented\ntr t a ->\n")
        assert net.places == ("a",)
        assert net.post["t"] == {}

    def test_duplicate_place(self):
        with pytest.raises(DuplicateNameError):
            parse_net("pl a 1\npl a 0")

    def test_error_carries_line_number(self):
        with pytest.raises(ParseError) as exc:
            parse_net("pl a 1\npl b oops")
        assert exc.value.line == 2

    def test_numeric_place_name_rejected(self):
        with pytest.raises(ParseError):
            parse_net("pl 17 1")

    def test_duplicate_arc_entry_rejected(self):
        with pytest.raises(ParseError):
            parse_net("pl a 1\ntr t a a -> ")

    def test_empty_input_is_empty_net(self):
        net, m0 = parse_net("")
        assert net.places == ()
        assert m0 == Marking({})


class TestParsePnml:
    MINIMAL = """\
<?xml version="1.0"?>
<pnml xmlns="http://www.pnml.org/version-2009/grammar/pnml">
  <net id="n" type="http://www.pnml.org/version-2009/grammar/ptnet">
    <page id="g">
      <place id="a"><initialMarking><text>1</text></initialMarking></place>
      <place id="b"/>
      <transition id="t"/>
      <arc id="x1" source="a" target="t"/>
      <arc id="x2" source="t" target="b"/>
    </page>
  </net>
</pnml>
"""

    def test_minimal(self):
        net, m0 = parse_pnml(self.MINIMAL)
        assert net.places == ("a", "b")
        assert net.pre["t"] == {"a": 1}
        assert net.post["t"] == {"b": 1}
        assert m0 == Marking({"a": 1})

    def test_inscription_weight(self):
        text = self.MINIMAL.replace(
            '<arc id="x1" source="a" target="t"/>',
            '<arc id="x1" source="a" target="t">'
            "<inscription><text>2</text></inscription></arc>",
        )
        net, _ = parse_pnml(text)
        assert net.pre["t"] == {"a": 2}

    def test_inhibitor_arc_unsupported(self):
        text = self.MINIMAL.replace(
            '<arc id="x1" source="a" target="t"/>',
            '<arc id="x1" source="a" target="t">'
            "<type><text>inhibitor</text></type></arc>",
        )
        with pytest.raises(UnsupportedFeatureError):
            parse_pnml(text)

    def test_non_pt_net_unsupported(self):
        text = self.MINIMAL.replace("grammar/ptnet", "grammar/hlpng")
        with pytest.raises(UnsupportedFeatureError):
            parse_pnml(text)

    def test_malformed_xml(self):
        with pytest.raises(ParseError):
            parse_pnml("<pnml><net>")


class TestEquations:
    def test_cascade_order_preserved(self):
        eqs = parse_equations(CASCADE_EQUATIONS)
        assert [(e.tag, e.lhs, e.terms) for e in eqs] == [
            ("R", "p5", ("p4",)),
            ("A", "a1", ("p2", "p1")),
            ("A", "a2", ("p4", "p3")),
            ("R", "a1", ("a2",)),
        ]

    def test_constant_form(self):
        (eq,) = parse_equations("# R |- c = 1")
        assert eq.lhs == "c"
        assert eq.constant == 1
        assert eq.terms == ()

    def test_unknown_tag(self):
        with pytest.raises(ParseError):
            parse_equations("# X |- a = b")

    def test_constant_must_stand_alone(self):
        with pytest.raises(ParseError):
            parse_equations("# A |- a = b + 1")

    def test_duplicate_term_rejected(self):
        with pytest.raises(ParseError):
            parse_equations("# A |- a = b + b")

    def test_lhs_in_rhs_rejected(self):
        with pytest.raises(ParseError):
            parse_equations("# R |- a = a")

    def test_round_trip(self):
        eqs = parse_equations(CASCADE_EQUATIONS)
        assert write_equations(eqs) == CASCADE_EQUATIONS
        assert parse_equations(write_equations(eqs)) == list(eqs)


class TestMatrix:
    def test_single_nondead_place(self):
        doc = MatrixDocument(("p",), (("1",),))
        assert write_matrix(doc) == "# order: p\n1\n"

    def test_run_length_written_at_four(self):
        rows = [tuple("0" * i + "1") for i in range(0, 6)]
        rows[5] = tuple("000001")
        doc = MatrixDocument(
            ("a", "b", "c", "d", "e", "f"),
            tuple(tuple(r) for r in rows),
        )
        text = write_matrix(doc)
        assert "0(5)1" in text
        assert parse_matrix(text) == doc

    def test_short_runs_stay_literal(self):
        doc = MatrixDocument(("a", "b", "c"), (("1",), ("0", "1"), ("0", "0", "1")))
        text = write_matrix(doc)
        assert "(" not in text.splitlines()[2]

    def test_triangular_parse(self):
        doc = parse_matrix("# order: a b\n1\n01\n")
        assert doc.place_order == ("a", "b")
        assert doc.rows == (("1",), ("0", "1"))

    def test_ragged_row(self):
        with pytest.raises(RaggedRowError):
            parse_matrix("# order: a b\n1\n011\n")

    def test_missing_header(self):
        with pytest.raises(ParseError):
            parse_matrix("1\n01\n")

    def test_unknown_symbol_preserved(self):
        doc = parse_matrix("# order: a b\n.\n01\n")
        assert doc.rows[0] == (".",)

    @given(
        st.integers(1, 8).flatmap(
            lambda n: st.tuples(
                st.just(n),
                st.lists(
                    st.sampled_from("01."), min_size=n * (n + 1) // 2,
                    max_size=n * (n + 1) // 2,
                ),
            )
        )
    )
    def test_round_trip_any_document(self, size_and_cells):
        n, flat = size_and_cells
        order = tuple(f"p{i}" for i in range(n))
        rows = []
        at = 0
        for i in range(n):
            rows.append(tuple(flat[at : at + i + 1]))
            at += i + 1
        doc = MatrixDocument(order, tuple(rows))
        assert parse_matrix(write_matrix(doc)) == doc


class TestMarkingQuery:
    def test_doubled_target_projects(self):
        m = parse_marking_query("p1=2 p3=1 p4=1 p5=1")
        assert m == Marking({"p1": 2, "p3": 1, "p4": 1, "p5": 1})

    def test_empty_query_is_zero_marking(self):
        assert parse_marking_query("") == Marking({})

    def test_duplicate_assignment(self):
        with pytest.raises(DuplicateAssignmentError):
            parse_marking_query("p1=2 p1=3")

    def test_place_set_enforced_when_given(self):
        with pytest.raises(UnknownPlaceError):
            parse_marking_query("zz=1", places=("a", "b"))

    def test_round_trip(self):
        m = Marking({"b": 2, "a": 1})
        assert parse_marking_query(write_marking_query(m)) == m


@st.composite
def arbitrary_nets(draw):
    n_places = draw(st.integers(1, 6))
    places = tuple(f"p{i}" for i in range(n_places))
    n_trans = draw(st.integers(0, 5))
    transitions = tuple(f"t{i}" for i in range(n_trans))
    pre = {}
    post = {}
    for t in transitions:
        pre[t] = draw(
            st.dictionaries(st.sampled_from(places), st.integers(1, 3), max_size=3)
        )
        post[t] = draw(
            st.dictionaries(st.sampled_from(places), st.integers(1, 3), max_size=3)
        )
    marking = Marking({p: draw(st.integers(0, 2)) for p in places})
    return places, transitions, pre, post, marking


class TestNetRoundTrip:
    @given(arbitrary_nets())
    def test_write_then_parse_is_identity(self, parts):
        from tfgkit.petri import PetriNet

        places, transitions, pre, post, m0 = parts
        net = PetriNet(places, transitions, pre, post)
        parsed_net, parsed_m0 = parse_net(write_net(net, m0))
        assert parsed_net == net
        assert parsed_m0 == m0
