"""Well-formedness checking for model libraries and generated variants."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .model import (
    Boundary, ChildPort, Connection, Context, Endpoint, ModelLibrary, ModelReference,
    iter_contexts, referenced_models, resolve_interface, UnknownModel,
)


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


class DiagCode(str, Enum):
    DuplicateName = "DuplicateName"
    DanglingEndpoint = "DanglingEndpoint"
    DirectionError = "DirectionError"
    TargetOccupied = "TargetOccupied"
    UnknownModel = "UnknownModel"
    ReferenceCycle = "ReferenceCycle"
    UnconnectedPort = "UnconnectedPort"
    # workspace-level checks, used by the CLI
    UnknownDelta = "UnknownDelta"
    UnknownAocReference = "UnknownAocReference"

    @property
    def severity(self) -> Severity:
        if self in (DiagCode.UnconnectedPort, DiagCode.UnknownAocReference):
            return Severity.WARNING
        return Severity.ERROR


@dataclass(frozen=True, order=True)
class Location:
    model: str
    path: tuple[str, ...] = ()
    element: Optional[str] = None

    def __str__(self) -> str:
        s = "/".join((self.model, *self.path))
        return f"{s}:{self.element}" if self.element else s


@dataclass(frozen=True)
class Diagnostic:
    code: DiagCode
    location: Location
    message: str

    @property
    def severity(self) -> Severity:
        return self.code.severity

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def sort_key(self) -> tuple:
        return (self.location.model, self.location.path, self.code.value,
                self.location.element or "", self.message)

    def __str__(self) -> str:
        return f"{self.severity.value} {self.code.value} {self.location}: {self.message}"


def sort_diagnostics(diags: list[Diagnostic]) -> list[Diagnostic]:
    return sorted(diags, key=Diagnostic.sort_key)


def errors(diags: list[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if d.is_error]


def warnings(diags: list[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if not d.is_error]


def check_wellformed(lib: ModelLibrary) -> list[Diagnostic]:
    """Return every diagnostic for ``lib``, sorted by (model, path, code)."""
    out: list[Diagnostic] = []
    for model in lib:
        for path, ctx in iter_contexts(model.body):
            out.extend(_check_context(lib, model.name, path, ctx))
    out.extend(_check_cycles(lib))
    return sort_diagnostics(out)


def _check_context(lib: ModelLibrary, model: str, path: tuple[str, ...], ctx: Context) -> list[Diagnostic]:
    out: list[Diagnostic] = []

    def diag(code: DiagCode, element: Optional[str], msg: str) -> None:
        out.append(Diagnostic(code, Location(model, path, element), msg))

    for name, n in Counter(ctx.names()).items():
        if n > 1:
            diag(DiagCode.DuplicateName, name, f"name {name!r} declared {n} times")

    # interfaces of children whose ports can be resolved
    ifaces = {}
    for b in ctx.blocks:
        try:
            ifaces[b.name] = resolve_interface(b, lib)
        except UnknownModel:
            assert isinstance(b, ModelReference)
            diag(DiagCode.UnknownModel, b.name, f"block {b.name!r} references unknown model {b.ref_model!r}")
        except ValueError as exc:
            # port declared in both directions; reported where that body is checked
            diag(DiagCode.DuplicateName, b.name, str(exc))
    block_names = {b.name for b in ctx.blocks}

    def check_end(conn: Connection, end: Endpoint, as_source: bool) -> bool:
        role = "source" if as_source else "target"
        if isinstance(end, Boundary):
            good, bad = (ctx.in_ports, ctx.out_ports) if as_source else (ctx.out_ports, ctx.in_ports)
            if end.port in good:
                return True
            if end.port in bad:
                diag(DiagCode.DirectionError, str(conn),
                     f"{role} {end} is an {'out' if as_source else 'in'}-port of this context")
            else:
                diag(DiagCode.DanglingEndpoint, str(conn), f"{role} {end} is not a port of this context")
            return False
        if end.block not in block_names:
            diag(DiagCode.DanglingEndpoint, str(conn), f"{role} {end}: no block {end.block!r}")
            return False
        iface = ifaces.get(end.block)
        if iface is None:
            return False
        good_s, bad_s = (iface.out_ports, iface.in_ports) if as_source else (iface.in_ports, iface.out_ports)
        if end.port in good_s:
            return True
        if end.port in bad_s:
            diag(DiagCode.DirectionError, str(conn),
                 f"{role} {end} is an {'in' if as_source else 'out'}-port of block {end.block!r}")
        else:
            diag(DiagCode.DanglingEndpoint, str(conn), f"{role} {end}: block {end.block!r} has no such port")
        return False

    for conn in ctx.connections:
        check_end(conn, conn.source, True)
        check_end(conn, conn.target, False)

    for target, n in Counter(c.target for c in ctx.connections).items():
        if n > 1:
            diag(DiagCode.TargetOccupied, str(target), f"target {target} receives {n} connections")

    used: set[Endpoint] = set()
    for c in ctx.connections:
        used.add(c.source)
        used.add(c.target)
    if not ctx.is_opaque():
        for p in (*ctx.in_ports, *ctx.out_ports):
            if Boundary(p) not in used:
                diag(DiagCode.UnconnectedPort, p, f"port {p!r} has no connection")
    for b in ctx.blocks:
        iface = ifaces.get(b.name)
        if iface is None:
            continue
        for p in sorted(iface.in_ports | iface.out_ports):
            if ChildPort(b.name, p) not in used:
                diag(DiagCode.UnconnectedPort, f"{b.name}.{p}", f"port {p!r} of block {b.name!r} has no connection")
    return out


def _check_cycles(lib: ModelLibrary) -> list[Diagnostic]:
    graph = {m.name: sorted(set(r for r in referenced_models(m.body) if r in lib)) for m in lib}
    out = []
    for start in lib.names:
        # is start reachable from itself?
        seen: set[str] = set()
        stack = list(graph[start])
        while stack:
            n = stack.pop()
            if n == start:
                out.append(Diagnostic(DiagCode.ReferenceCycle, Location(start),
                                      f"model {start!r} references itself transitively"))
                break
            if n not in seen:
                seen.add(n)
                stack.extend(graph[n])
    return out
