"""Delta application with per-operation application-condition checks.

Application is functional: every function returns a new value and leaves its
inputs untouched, so a failed :func:`apply_delta` has no observable effect.
"""
from __future__ import annotations

from dataclasses import replace
from enum import Enum
from typing import Collection

from .delta import (
    AddConnection, AddModelRef, AddPort, AddSubsystem, BlockSel, ConnectionSel, Delta, DeltaOp,
    Direction, ModelSub, ModifyModel, ModifySubsystem, PortSel, Remove, Replace, Substitute,
)
from .model import (
    Boundary, ChildPort, Connection, Context, Endpoint, ModelLibrary, ModelReference, Subsystem,
    UnknownModel, iter_contexts, resolve_interface,
)


class AppCode(str, Enum):
    DuplicateName = "DuplicateName"
    DanglingConnectionEnd = "DanglingConnectionEnd"
    TargetOccupied = "TargetOccupied"
    PortStillConnected = "PortStillConnected"
    MissingElement = "MissingElement"
    ElementStillConnected = "ElementStillConnected"
    InvalidContextKind = "InvalidContextKind"
    ContextNotFound = "ContextNotFound"
    ReplaceTargetMissing = "ReplaceTargetMissing"
    NameClashAfterReplace = "NameClashAfterReplace"
    UnknownSubstituteModel = "UnknownSubstituteModel"
    IncompatibleInterface = "IncompatibleInterface"

    @property
    def condition(self) -> str:
        return _CONDITIONS[self]


_CONDITIONS = {
    AppCode.DuplicateName: "1",
    AppCode.DanglingConnectionEnd: "2a",
    AppCode.TargetOccupied: "2b",
    AppCode.PortStillConnected: "3",
    AppCode.MissingElement: "4",
    AppCode.ElementStillConnected: "remove-block",
    AppCode.InvalidContextKind: "5a/5b",
    AppCode.ContextNotFound: "5c",
    AppCode.ReplaceTargetMissing: "6a",
    AppCode.NameClashAfterReplace: "6b",
    AppCode.UnknownSubstituteModel: "6c",
    AppCode.IncompatibleInterface: "6d",
}


class ApplicationError(Exception):
    def __init__(self, code: AppCode, detail: str, delta: str = "", op_path: tuple[int, ...] = ()):
        self.code = code
        self.detail = detail
        self.delta = delta
        self.op_path = op_path
        super().__init__(str(self))

    def located(self, delta: str, op_path: tuple[int, ...]) -> "ApplicationError":
        return ApplicationError(self.code, self.detail, delta, op_path)

    def __str__(self) -> str:
        where = f"delta {self.delta} op {'.'.join(map(str, self.op_path))}: " if self.delta else ""
        return f"{where}{self.code.value} (condition {self.code.condition}): {self.detail}"


def _fail(code: AppCode, detail: str) -> ApplicationError:
    return ApplicationError(code, detail)


# -- delta ---------------------------------------------------------------------------

def apply_delta(lib: ModelLibrary, delta: Delta) -> ModelLibrary:
    """Apply every modify block of ``delta`` in order; raise on the first violation."""
    for mi, mm in enumerate(delta.modifications):
        try:
            if not isinstance(mm, ModifyModel):
                raise _fail(AppCode.InvalidContextKind, "top-level modify block must target a model")
            model = lib.get(mm.target_model)
            if model is None:
                if _is_subsystem_name(lib, mm.target_model):
                    raise _fail(AppCode.InvalidContextKind,
                                f"{mm.target_model!r} is a subsystem; top-level modify blocks must target a model")
                raise _fail(AppCode.ContextNotFound, f"no model {mm.target_model!r}")
        except ApplicationError as err:
            raise err.located(delta.name, (mi,)) from None
        outside = _model_ports_used_by_references(lib, model.name)
        body = _apply_ops(model.body, mm.ops, lib, outside, delta.name, (mi,))
        lib = lib.with_model(replace(model, body=body))
    return lib


def _is_subsystem_name(lib: ModelLibrary, name: str) -> bool:
    return any(isinstance(b, Subsystem) and b.name == name
               for m in lib for _, ctx in iter_contexts(m.body) for b in ctx.blocks)


def _model_ports_used_by_references(lib: ModelLibrary, model: str) -> set[str]:
    ports = set()
    for m in lib:
        for _, ctx in iter_contexts(m.body):
            for b in ctx.blocks:
                if isinstance(b, ModelReference) and b.ref_model == model:
                    ports |= _child_ports_used(ctx, b.name)
    return ports


def _child_ports_used(ctx: Context, block: str) -> set[str]:
    return {e.port for c in ctx.connections for e in (c.source, c.target)
            if isinstance(e, ChildPort) and e.block == block}


def _apply_ops(ctx: Context, ops, lib: ModelLibrary, outside: Collection[str],
               delta: str, prefix: tuple[int, ...]) -> Context:
    for j, op in enumerate(ops):
        path = prefix + (j,)
        try:
            if isinstance(op, ModifySubsystem):
                ctx = _modify_subsystem(ctx, op, lib, delta, path)
                continue
            if isinstance(op, ModifyModel):
                raise _fail(AppCode.InvalidContextKind, "nested modify block must target a subsystem")
            if isinstance(op, (AddPort, AddModelRef, AddSubsystem, AddConnection)):
                ctx = apply_add(ctx, op, lib)
            elif isinstance(op, Remove):
                ctx = apply_remove(ctx, op.selector, op.weak, outside)
            elif isinstance(op, Replace):
                ctx = apply_replace(ctx, op.target_block, op.substitute, lib)
            else:
                raise TypeError(f"not a delta operation: {op!r}")
        except ApplicationError as err:
            if err.delta or err.op_path:
                raise
            raise err.located(delta, path) from None
    return ctx


def _modify_subsystem(ctx: Context, op: ModifySubsystem, lib: ModelLibrary,
                      delta: str, path: tuple[int, ...]) -> Context:
    block = ctx.block(op.name)
    if block is None:
        raise _fail(AppCode.ContextNotFound, f"no subsystem {op.name!r}")
    if not isinstance(block, Subsystem):
        raise _fail(AppCode.InvalidContextKind, f"{op.name!r} is a model reference, not a subsystem")
    body = _apply_ops(block.body, op.ops, lib, _child_ports_used(ctx, op.name), delta, path)
    return replace(ctx, blocks=tuple(replace(b, body=body) if b is block else b for b in ctx.blocks))


# -- add ------------------------------------------------------------------------------

def apply_add(ctx: Context, op, lib: ModelLibrary) -> Context:
    if isinstance(op, AddConnection):
        return _add_connection(ctx, Connection(op.source, op.target), lib)
    if ctx.has_name(op.name):
        raise _fail(AppCode.DuplicateName, f"element {op.name!r} already exists")
    if isinstance(op, AddPort):
        if op.direction is Direction.IN:
            return replace(ctx, in_ports=ctx.in_ports + (op.name,))
        return replace(ctx, out_ports=ctx.out_ports + (op.name,))
    if isinstance(op, AddModelRef):
        # ref_model is resolved by well-formedness, not here
        return replace(ctx, blocks=ctx.blocks + (ModelReference(op.name, op.ref_model),))
    if isinstance(op, AddSubsystem):
        return replace(ctx, blocks=ctx.blocks + (Subsystem(op.name, _validated_body(op.body, lib)),))
    raise TypeError(f"not an add operation: {op!r}")


def _validated_body(body: Context, lib: ModelLibrary) -> Context:
    """Rebuild an inline subsystem body element by element, checking conditions 1 and 2."""
    ctx = Context()
    for p in body.in_ports:
        ctx = apply_add(ctx, AddPort(Direction.IN, p), lib)
    for p in body.out_ports:
        ctx = apply_add(ctx, AddPort(Direction.OUT, p), lib)
    for b in body.blocks:
        if ctx.has_name(b.name):
            raise _fail(AppCode.DuplicateName, f"element {b.name!r} already exists")
        if isinstance(b, Subsystem):
            b = replace(b, body=_validated_body(b.body, lib))
        ctx = replace(ctx, blocks=ctx.blocks + (b,))
    for c in body.connections:
        ctx = _add_connection(ctx, c, lib)
    return ctx


def _endpoint_exists(ctx: Context, end: Endpoint, lib: ModelLibrary, as_source: bool) -> bool:
    if isinstance(end, Boundary):
        return end.port in (ctx.in_ports if as_source else ctx.out_ports)
    block = ctx.block(end.block)
    if block is None:
        return False
    try:
        iface = resolve_interface(block, lib)
    except UnknownModel:
        return False
    return end.port in (iface.out_ports if as_source else iface.in_ports)


def _add_connection(ctx: Context, conn: Connection, lib: ModelLibrary) -> Context:
    for end, as_source in ((conn.source, True), (conn.target, False)):
        if not _endpoint_exists(ctx, end, lib, as_source):
            role = "source" if as_source else "target"
            raise _fail(AppCode.DanglingConnectionEnd, f"{role} {end} of {conn} does not exist")
    if any(c.target == conn.target for c in ctx.connections):
        raise _fail(AppCode.TargetOccupied, f"{conn.target} is already the target of a connection")
    return replace(ctx, connections=ctx.connections + (Connection(conn.source, conn.target),))


# -- remove ----------------------------------------------------------------------------

def apply_remove(ctx: Context, sel, weak: bool = False,
                 connected_outside: Collection[str] = ()) -> Context:
    """Remove the selected element.

    ``connected_outside`` names boundary ports wired from the enclosing context
    (or from any block referencing this model); they count as connected.
    """
    if isinstance(sel, PortSel):
        ports = ctx.in_ports if sel.direction is Direction.IN else ctx.out_ports
        if sel.name not in ports:
            if weak:
                return ctx
            raise _fail(AppCode.MissingElement, f"no {sel.direction.value}-port {sel.name!r}")
        if sel.name in connected_outside or any(Boundary(sel.name) in (c.source, c.target)
                                                 for c in ctx.connections):
            raise _fail(AppCode.PortStillConnected, f"port {sel.name!r} is still connected")
        rest = tuple(p for p in ports if p != sel.name)
        if sel.direction is Direction.IN:
            return replace(ctx, in_ports=rest)
        return replace(ctx, out_ports=rest)
    if isinstance(sel, BlockSel):
        if ctx.block(sel.name) is None:
            if weak:
                return ctx
            raise _fail(AppCode.MissingElement, f"no block {sel.name!r}")
        if any(c.touches_block(sel.name) for c in ctx.connections):
            raise _fail(AppCode.ElementStillConnected, f"block {sel.name!r} still has connections")
        return replace(ctx, blocks=tuple(b for b in ctx.blocks if b.name != sel.name))
    if isinstance(sel, ConnectionSel):
        wanted = Connection(sel.source, sel.target)
        if wanted not in ctx.connections:
            if weak:
                return ctx
            raise _fail(AppCode.MissingElement, f"no connection {wanted}")
        return replace(ctx, connections=tuple(c for c in ctx.connections if c != wanted))
    raise TypeError(f"not a selector: {sel!r}")


# -- replace --------------------------------------------------------------------------

def apply_replace(ctx: Context, target_block: str, sub: Substitute, lib: ModelLibrary) -> Context:
    old = ctx.block(target_block)
    if old is None:
        raise _fail(AppCode.ReplaceTargetMissing, f"no block {target_block!r} to replace")
    if isinstance(sub, ModelSub):
        if sub.ref_model not in lib:
            raise _fail(AppCode.UnknownSubstituteModel, f"no model {sub.ref_model!r}")
        new = ModelReference(sub.new_block_name, sub.ref_model)
    else:
        new = Subsystem(sub.new_block_name, _validated_body(sub.body, lib))

    remaining = list(ctx.names())
    remaining.remove(target_block)
    if new.name in remaining:
        raise _fail(AppCode.NameClashAfterReplace, f"element {new.name!r} exists besides {target_block!r}")

    try:
        old_iface = resolve_interface(old, lib)
    except UnknownModel as exc:
        raise _fail(AppCode.IncompatibleInterface, f"interface of {target_block!r} unknown: {exc}") from None
    new_iface = resolve_interface(new, lib)
    if not new_iface.covers(old_iface):
        missing = sorted((old_iface.in_ports - new_iface.in_ports) | (old_iface.out_ports - new_iface.out_ports))
        raise _fail(AppCode.IncompatibleInterface, f"substitute lacks ports {missing}")

    def rename(e: Endpoint) -> Endpoint:
        return ChildPort(new.name, e.port) if isinstance(e, ChildPort) and e.block == target_block else e

    blocks = tuple(new if b.name == target_block else b for b in ctx.blocks)
    conns = tuple(Connection(rename(c.source), rename(c.target)) if c.touches_block(target_block) else c
                  for c in ctx.connections)
    return replace(ctx, blocks=blocks, connections=conns)


# -- modify --------------------------------------------------------------------------

def apply_modify_subsystem(ctx: Context, name: str, ops: tuple[DeltaOp, ...],
                           lib: ModelLibrary = ModelLibrary()) -> Context:
    """Apply ``ops`` in order to the body of subsystem ``name`` inside ``ctx``."""
    return _apply_ops(ctx, (ModifySubsystem(name, tuple(ops)),), lib, (), "", ())
