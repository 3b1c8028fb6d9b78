import pytest
from hypothesis import given, settings, strategies as st

from deltablocks.delta import (
    AddConnection, AddPort, After, And, Direction, Not, Or, PortSel, ProductConfiguration, Remove,
    Replace, ModelSub, TRUE, ModifySubsystem, AddSubsystem, BlockSel, ConnectionSel, AddModelRef,
    SubsystemSub,
)
from deltablocks.dsl import (
    ParseError, parse_delta, parse_deltas, parse_library, parse_products, render_aoc, render_delta,
    render_library, render_products, tokenize,
)
from deltablocks.model import Boundary, ChildPort, ModelLibrary, ModelReference, Subsystem

from conftest import FIXTURES
from strategies import aoc_exprs, libraries

FIG2 = (FIXTURES / "models" / "BrakingSystem.dbm").read_text()
DABS = (FIXTURES / "deltas" / "DABS.dbd").read_text()


def test_parse_braking_core():
    (m,) = parse_library(FIG2).models
    assert m.name == "BrakingSystem"
    assert len(m.body.in_ports) == 1 and len(m.body.out_ports) == 4
    assert m.body.blocks == (ModelReference("brakefunction", "PressureCalculator"),)
    assert len(m.body.connections) == 5
    assert m.body.connections[0].source == Boundary("brake")
    assert m.body.connections[0].target == ChildPort("brakefunction", "brake")


def test_parse_empty_model():
    (m,) = parse_library("model Empty { }").models
    assert m.body.in_ports == m.body.out_ports == m.body.blocks == m.body.connections == ()


def test_duplicate_port_name():
    with pytest.raises(ParseError) as exc:
        parse_library("model X { in a in a }")
    assert exc.value.code == "DuplicateName"
    assert (exc.value.pos.line, exc.value.pos.col) == (1, 19)


def test_duplicate_across_kinds():
    with pytest.raises(ParseError, match="DuplicateName"):
        parse_library("model X { in a mref a : Y }")


def test_duplicate_model():
    with pytest.raises(ParseError, match="DuplicateName"):
        parse_library("model X { } model X { }")


def test_nested_subsystem_and_comments():
    lib = parse_library("""
        // leading comment
        model M {
            subsystem S { in x  subsystem T { out y } }  // trailing
        }
    """)
    s = lib["M"].body.block("S")
    assert isinstance(s, Subsystem) and isinstance(s.body.block("T"), Subsystem)


def test_syntax_error_position_and_expected():
    with pytest.raises(ParseError) as exc:
        parse_library("model M {\n  in a\n  connect a => b\n}")
    err = exc.value
    assert err.code == "SyntaxError"
    assert err.pos.line == 3
    assert "'->'" in err.expected or err.expected == ()


def test_unexpected_character():
    with pytest.raises(ParseError) as exc:
        parse_library("model M { in a$ }")
    assert exc.value.pos.col == 15


def test_keyword_is_not_identifier():
    with pytest.raises(ParseError) as exc:
        parse_library("model model { }")
    assert "identifier" in exc.value.expected


# -- deltas ------------------------------------------------------------------------

def test_parse_dabs():
    d = parse_delta(DABS)
    assert d.name == "DABS"
    assert d.aoc == Not(After("DTW_post"))
    (mm,) = d.modifications
    assert mm.target_model == "BrakingSystem"
    kinds = [type(op) for op in mm.ops]
    assert kinds.count(AddPort) == 4 and kinds.count(AddConnection) == 4 and kinds.count(Replace) == 1
    assert mm.ops[4] == Replace("brakefunction", ModelSub("ABS", "brakefunction"))


def test_empty_modification():
    d = parse_delta("delta D { modify model M { } }")
    assert d.aoc == TRUE
    assert d.modifications[0].ops == ()


def test_multiple_aoc_clauses_conjoined():
    d = parse_delta("delta D { aoc after A aoc after B modify model M { } }")
    assert d.aoc == And(After("A"), After("B"))


def test_empty_delta():
    with pytest.raises(ParseError) as exc:
        parse_delta("delta D { aoc after A }")
    assert exc.value.code == "EmptyDelta"


def test_aoc_precedence():
    d = parse_delta("delta D { aoc after A && after B || after C modify model M { } }")
    assert d.aoc == Or(And(After("A"), After("B")), After("C"))
    d = parse_delta("delta D { aoc after A || after B && !after C modify model M { } }")
    assert d.aoc == Or(After("A"), And(After("B"), Not(After("C"))))
    d = parse_delta("delta D { aoc !(after A || after B) modify model M { } }")
    assert d.aoc == Not(Or(After("A"), After("B")))


def test_all_operation_forms():
    d = parse_delta("""
        delta D {
            modify model M {
                add in a
                add out b
                add mref r : R
                add subsystem s { in x }
                add connect a -> r.p
                remove in a
                remove weak out b
                remove block r
                remove weak connect a -> r.p
                replace s with subsystem t { in x in z }
                replace r with model R2 as r
                modify subsystem s { add in y modify subsystem u { } }
            }
        }
    """)
    ops = d.modifications[0].ops
    assert ops[0] == AddPort(Direction.IN, "a")
    assert ops[1] == AddPort(Direction.OUT, "b")
    assert ops[2] == AddModelRef("r", "R")
    assert isinstance(ops[3], AddSubsystem) and ops[3].body.in_ports == ("x",)
    assert ops[4] == AddConnection(Boundary("a"), ChildPort("r", "p"))
    assert ops[5] == Remove(PortSel(Direction.IN, "a"))
    assert ops[6] == Remove(PortSel(Direction.OUT, "b"), weak=True)
    assert ops[7] == Remove(BlockSel("r"))
    assert ops[8] == Remove(ConnectionSel(Boundary("a"), ChildPort("r", "p")), weak=True)
    assert isinstance(ops[9].substitute, SubsystemSub) and ops[9].substitute.body.in_ports == ("x", "z")
    assert ops[10] == Replace("r", ModelSub("R2", "r"))
    assert isinstance(ops[11], ModifySubsystem) and isinstance(ops[11].ops[1], ModifySubsystem)
    assert parse_delta(render_delta(d)) == d


def test_multiple_deltas_per_file():
    ds = parse_deltas("delta A { modify model M { } } delta B { modify model M { } }")
    assert [d.name for d in ds] == ["A", "B"]
    with pytest.raises(ParseError):
        parse_delta("delta A { modify model M { } } delta B { modify model M { } }")
    with pytest.raises(ParseError, match="DuplicateName"):
        parse_deltas("delta A { modify model M { } } delta A { modify model M { } }")


# -- products -----------------------------------------------------------------------

def test_products():
    ps = parse_products("""
        product BSwithABS { deltas DABS }
        product BasicBikeBS { deltas DTW_pre, DTW, DTW_post }
        product Core { deltas }
    """)
    assert ps[0] == ProductConfiguration("BSwithABS", frozenset({"DABS"}))
    assert ps[1].deltas == {"DTW_pre", "DTW", "DTW_post"}
    assert ps[2].deltas == frozenset()
    assert parse_products(render_products(ps)) == ps


def test_duplicate_product():
    with pytest.raises(ParseError) as exc:
        parse_products("product P { deltas } product P { deltas A }")
    assert exc.value.code == "DuplicateProductName"


def test_duplicate_delta_in_product():
    with pytest.raises(ParseError):
        parse_products("product P { deltas A, A }")


# -- rendering ---------------------------------------------------------------------

def test_render_empty_library():
    assert render_library(ModelLibrary()) == ""


def test_render_braking_core_canonical():
    lib = parse_library(FIG2)
    text = render_library(lib)
    assert parse_library(text) == lib
    assert text.startswith("model BrakingSystem {\n    in brake\n")
    assert "connect brakefunction.brakePressure4 -> brakePressure4\n}" in text


def test_abs_golden_reparses():
    from conftest import GOLDEN
    lib = parse_library((GOLDEN / "BSwithABS.dbm").read_text())
    assert len(lib["BrakingSystem"].body.in_ports) == 5


@given(libraries())
@settings(max_examples=250)
def test_round_trip(lib):
    text = render_library(lib)
    again = parse_library(text)
    assert again == lib
    assert render_library(again) == text


@given(aoc_exprs(["A", "B", "C"]))
def test_aoc_render_round_trip(expr):
    d = parse_delta(f"delta D {{ aoc {render_aoc(expr)} modify model M {{ }} }}")
    assert d.aoc == expr


@given(st.text(alphabet=st.sampled_from(list("model{}in out->.,:!&|() aocafterdeltaX\n/")), max_size=80))
@settings(max_examples=300)
def test_parser_total_on_error_channel(text):
    for fn in (parse_library, parse_deltas, parse_products):
        try:
            fn(text)
        except ParseError as exc:
            assert exc.pos.line >= 1 and exc.pos.col >= 1


@given(st.text(max_size=60))
def test_parser_total_on_arbitrary_text(text):
    try:
        parse_library(text)
    except ParseError:
        pass


def test_deep_nesting_is_a_parse_error():
    text = "model M { " + "subsystem s { " * 2000 + "}" * 2000 + " }"
    with pytest.raises(ParseError):
        parse_library(text)


def test_tokenize_positions():
    toks = tokenize("model\n  M {")
    assert [(t.text, t.pos.line, t.pos.col) for t in toks[:3]] == [("model", 1, 1), ("M", 2, 3), ("{", 2, 5)]
