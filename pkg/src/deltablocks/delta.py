"""Delta abstract syntax: operations, application-order constraints, products."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union

from .model import Context, Endpoint, Pos, _check_ident


# -- application order constraints ------------------------------------------------

@dataclass(frozen=True)
class TrueAoc:
    pass


@dataclass(frozen=True)
class After:
    delta: str


@dataclass(frozen=True)
class Not:
    expr: "AocExpr"


@dataclass(frozen=True)
class And:
    left: "AocExpr"
    right: "AocExpr"


@dataclass(frozen=True)
class Or:
    left: "AocExpr"
    right: "AocExpr"


AocExpr = Union[TrueAoc, After, Not, And, Or]

TRUE = TrueAoc()


def conjoin(exprs: list[AocExpr]) -> AocExpr:
    """Fold constraints left to right with And; no constraints is TRUE."""
    if not exprs:
        return TRUE
    acc = exprs[0]
    for e in exprs[1:]:
        acc = And(acc, e)
    return acc


def mentioned(expr: AocExpr) -> set[str]:
    """Delta names referenced by ``after`` atoms in ``expr``."""
    if isinstance(expr, After):
        return {expr.delta}
    if isinstance(expr, Not):
        return mentioned(expr.expr)
    if isinstance(expr, (And, Or)):
        return mentioned(expr.left) | mentioned(expr.right)
    return set()


# -- operations ---------------------------------------------------------------------

class Direction(str, Enum):
    IN = "in"
    OUT = "out"


@dataclass(frozen=True)
class AddPort:
    direction: Direction
    name: str
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class AddModelRef:
    name: str
    ref_model: str
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class AddSubsystem:
    name: str
    body: Context = Context()
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class AddConnection:
    source: Endpoint
    target: Endpoint
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class PortSel:
    direction: Direction
    name: str


@dataclass(frozen=True)
class BlockSel:
    name: str


@dataclass(frozen=True)
class ConnectionSel:
    source: Endpoint
    target: Endpoint


ElementSelector = Union[PortSel, BlockSel, ConnectionSel]


@dataclass(frozen=True)
class Remove:
    selector: ElementSelector
    weak: bool = False
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ModelSub:
    ref_model: str
    new_block_name: str


@dataclass(frozen=True)
class SubsystemSub:
    new_block_name: str
    body: Context = Context()


Substitute = Union[ModelSub, SubsystemSub]


@dataclass(frozen=True)
class Replace:
    target_block: str
    substitute: Substitute
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ModifySubsystem:
    name: str
    ops: tuple["DeltaOp", ...] = ()
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


DeltaOp = Union[AddPort, AddModelRef, AddSubsystem, AddConnection, Remove, Replace, ModifySubsystem]


@dataclass(frozen=True)
class ModifyModel:
    target_model: str
    ops: tuple[DeltaOp, ...] = ()
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Delta:
    name: str
    modifications: tuple[ModifyModel, ...]
    aoc: AocExpr = TRUE
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        _check_ident(self.name, "delta")
        if not self.modifications:
            raise ValueError(f"delta {self.name!r} has no modify block")

    def walk(self) -> Iterator[tuple[tuple[int, ...], object]]:
        """Yield ``(op_path, op)`` for every modify block and operation, depth first."""
        def rec(ops, prefix):
            for i, op in enumerate(ops):
                yield prefix + (i,), op
                if isinstance(op, ModifySubsystem):
                    yield from rec(op.ops, prefix + (i,))
        for i, mm in enumerate(self.modifications):
            yield (i,), mm
            yield from rec(mm.ops, (i,))


@dataclass(frozen=True)
class ProductConfiguration:
    name: str
    deltas: frozenset[str] = frozenset()
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        _check_ident(self.name, "product")
        object.__setattr__(self, "deltas", frozenset(self.deltas))
