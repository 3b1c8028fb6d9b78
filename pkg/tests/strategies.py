"""Hypothesis strategies for random libraries and AOC expressions."""
from hypothesis import strategies as st

from deltablocks.delta import (
    AddConnection, AddModelRef, AddPort, AddSubsystem, After, And, BlockSel, ConnectionSel, Direction,
    ModelSub, ModifySubsystem, Not, Or, PortSel, Remove, Replace, SubsystemSub,
)
from deltablocks.dsl import parse_library
from deltablocks.model import (
    KEYWORDS, Boundary, ChildPort, Connection, Context, Model, ModelLibrary, ModelReference, Subsystem,
)

identifiers = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,6}", fullmatch=True).filter(lambda s: s not in KEYWORDS)


@st.composite
def contexts(draw, model_names, depth=2):
    names = draw(st.lists(identifiers, unique=True, max_size=8))
    n_in = draw(st.integers(0, len(names)))
    n_out = draw(st.integers(0, len(names) - n_in))
    ins, outs, block_names = names[:n_in], names[n_in:n_in + n_out], names[n_in + n_out:]
    blocks = []
    for b in block_names:
        if depth > 0 and draw(st.booleans()):
            blocks.append(Subsystem(b, draw(contexts(model_names, depth - 1))))
        else:
            blocks.append(ModelReference(b, draw(st.sampled_from(model_names))))
    endpoints = [Boundary(p) for p in ins + outs]
    endpoints += [ChildPort(b, p) for b in block_names for p in draw(st.lists(identifiers, max_size=2))]
    conns = []
    if endpoints:
        pairs = draw(st.lists(st.tuples(st.sampled_from(endpoints), st.sampled_from(endpoints)), max_size=6))
        conns = [Connection(s, t) for s, t in pairs]
    return Context(tuple(ins), tuple(outs), tuple(blocks), tuple(conns))


@st.composite
def libraries(draw):
    names = draw(st.lists(identifiers, unique=True, max_size=4))
    refs = names or ["Missing"]
    return ModelLibrary(tuple(Model(n, draw(contexts(refs))) for n in names))


def aoc_exprs(names):
    atoms = st.sampled_from(names).map(After)
    return st.recursive(
        atoms,
        lambda sub: st.one_of(sub.map(Not), st.builds(And, sub, sub), st.builds(Or, sub, sub)),
        max_leaves=5,
    )


# -- delta operations over a small fixed library ----------------------------------

SMALL = parse_library("""
    model Leaf { in p, p2 out q }
    model Big { in p, p2, p3 out q, q2 }
    model Top {
        in a, b
        out c
        mref l : Leaf
        subsystem S { in x out y connect x -> y }
        connect a -> l.p
        connect l.q -> c
    }
""")

names = st.sampled_from(["a", "b", "c", "d", "l", "S", "x", "y", "p", "q", "n"])
endpoints = st.one_of(names.map(Boundary), st.builds(ChildPort, st.sampled_from(["l", "S", "n"]),
                                                     st.sampled_from(["p", "p2", "q", "x", "y"])))
directions = st.sampled_from(list(Direction))
leaf_ops = st.one_of(
    st.builds(AddPort, directions, names),
    st.builds(AddModelRef, names, st.sampled_from(["Leaf", "Big"])),
    st.builds(AddSubsystem, names),
    st.builds(AddConnection, endpoints, endpoints),
    st.builds(Remove, st.one_of(st.builds(PortSel, directions, names), names.map(BlockSel),
                                st.builds(ConnectionSel, endpoints, endpoints)), st.booleans()),
    st.builds(Replace, names, st.one_of(st.builds(ModelSub, st.sampled_from(["Leaf", "Big", "Gone"]), names),
                                        st.builds(SubsystemSub, names))),
)
ops = st.one_of(leaf_ops, st.builds(ModifySubsystem, names, st.lists(leaf_ops, max_size=3).map(tuple)))


