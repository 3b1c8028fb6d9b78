"""Block-diagram data model: libraries, models, contexts, blocks and connections.

All values are frozen dataclasses over tuples so a library can be shared freely
and transformed functionally with :func:`dataclasses.replace`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Union

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

KEYWORDS = frozenset({
    "model", "in", "out", "mref", "subsystem", "connect",
    "delta", "aoc", "after", "modify", "add", "remove", "weak", "block",
    "replace", "with", "as", "product", "deltas",
})


def is_identifier(name: object) -> bool:
    return isinstance(name, str) and bool(IDENT_RE.match(name)) and name not in KEYWORDS


def _check_ident(name: object, what: str) -> None:
    if not is_identifier(name):
        raise ValueError(f"invalid {what} name: {name!r}")


@dataclass(frozen=True)
class Pos:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


# -- endpoints and connections ------------------------------------------------

@dataclass(frozen=True)
class Boundary:
    """A port on the boundary of the enclosing context."""
    port: str

    def __str__(self) -> str:
        return self.port


@dataclass(frozen=True)
class ChildPort:
    """A port on the interface of a child block."""
    block: str
    port: str

    def __str__(self) -> str:
        return f"{self.block}.{self.port}"


Endpoint = Union[Boundary, ChildPort]


@dataclass(frozen=True)
class Connection:
    source: Endpoint
    target: Endpoint
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)

    def touches_block(self, block: str) -> bool:
        return any(isinstance(e, ChildPort) and e.block == block
                   for e in (self.source, self.target))

    def __str__(self) -> str:
        return f"{self.source} -> {self.target}"


# -- contexts and blocks --------------------------------------------------------

@dataclass(frozen=True)
class Context:
    in_ports: tuple[str, ...] = ()
    out_ports: tuple[str, ...] = ()
    blocks: tuple["Block", ...] = ()
    connections: tuple[Connection, ...] = ()

    def names(self) -> list[str]:
        """Every name in the flat namespace, duplicates included."""
        return [*self.in_ports, *self.out_ports, *(b.name for b in self.blocks)]

    def has_name(self, name: str) -> bool:
        return name in self.in_ports or name in self.out_ports or self.block(name) is not None

    def block(self, name: str) -> Optional["Block"]:
        for b in self.blocks:
            if b.name == name:
                return b
        return None

    def is_opaque(self) -> bool:
        # no structure inside: stands in for computation blocks we do not model
        return not self.blocks and not self.connections


@dataclass(frozen=True)
class Subsystem:
    name: str
    body: Context = Context()
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        _check_ident(self.name, "block")


@dataclass(frozen=True)
class ModelReference:
    name: str
    ref_model: str
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        _check_ident(self.name, "block")
        _check_ident(self.ref_model, "model")


Block = Union[Subsystem, ModelReference]


@dataclass(frozen=True)
class Interface:
    in_ports: frozenset[str]
    out_ports: frozenset[str]

    def __post_init__(self) -> None:
        if self.in_ports & self.out_ports:
            raise ValueError(f"ports in both directions: {sorted(self.in_ports & self.out_ports)}")

    def covers(self, other: "Interface") -> bool:
        """True if this interface has at least the ports of ``other``, per direction."""
        return self.in_ports >= other.in_ports and self.out_ports >= other.out_ports


@dataclass(frozen=True)
class Model:
    name: str
    body: Context = Context()
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        _check_ident(self.name, "model")


@dataclass(frozen=True)
class ModelLibrary:
    """Ordered collection of uniquely named models."""
    models: tuple[Model, ...] = ()

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for m in self.models:
            if m.name in seen:
                raise ValueError(f"duplicate model {m.name!r}")
            seen.add(m.name)

    def __contains__(self, name: object) -> bool:
        return any(m.name == name for m in self.models)

    def __getitem__(self, name: str) -> Model:
        for m in self.models:
            if m.name == name:
                return m
        raise KeyError(name)

    def __iter__(self) -> Iterator[Model]:
        return iter(self.models)

    def __len__(self) -> int:
        return len(self.models)

    def get(self, name: str) -> Optional[Model]:
        return next((m for m in self.models if m.name == name), None)

    @property
    def names(self) -> list[str]:
        return [m.name for m in self.models]

    def with_model(self, model: Model) -> "ModelLibrary":
        """Replace the model of the same name, or append it."""
        if model.name in self:
            return ModelLibrary(tuple(model if m.name == model.name else m for m in self.models))
        return ModelLibrary(self.models + (model,))


# -- errors -------------------------------------------------------------------------

class UnknownModel(LookupError):
    def __init__(self, name: str):
        super().__init__(f"unknown model {name!r}")
        self.name = name


class PathNotFound(LookupError):
    def __init__(self, path: tuple[str, ...], detail: str):
        super().__init__(f"{'/'.join(path)}: {detail}")
        self.path = path
        self.detail = detail


# -- operations ---------------------------------------------------------------------

def resolve_interface(block: Block, lib: ModelLibrary) -> Interface:
    if isinstance(block, Subsystem):
        body = block.body
    else:
        model = lib.get(block.ref_model)
        if model is None:
            raise UnknownModel(block.ref_model)
        body = model.body
    return Interface(frozenset(body.in_ports), frozenset(body.out_ports))


def lookup_context(lib: ModelLibrary, path: tuple[str, ...] | list[str]) -> Context:
    """Descend from a model through nested subsystems.

    Model references are not followed; a referenced model is reached by
    naming it as the first path segment instead.
    """
    path = tuple(path)
    if not path:
        raise PathNotFound(path, "empty path")
    model = lib.get(path[0])
    if model is None:
        raise PathNotFound(path, f"no model {path[0]!r}")
    ctx = model.body
    for i, seg in enumerate(path[1:], start=1):
        b = ctx.block(seg)
        if b is None:
            raise PathNotFound(path, f"no block {seg!r} in {'/'.join(path[:i])}")
        if not isinstance(b, Subsystem):
            raise PathNotFound(path, f"{seg!r} is a model reference, not a subsystem")
        ctx = b.body
    return ctx


def replace_context(lib: ModelLibrary, path: tuple[str, ...], new: Context) -> ModelLibrary:
    """Return ``lib`` with the context at ``path`` swapped for ``new``."""
    model = lib.get(path[0]) if path else None
    if model is None:
        raise PathNotFound(tuple(path), "no such model")

    def rebuild(ctx: Context, rest: tuple[str, ...]) -> Context:
        if not rest:
            return new
        blocks = list(ctx.blocks)
        for i, b in enumerate(blocks):
            if b.name == rest[0] and isinstance(b, Subsystem):
                blocks[i] = replace(b, body=rebuild(b.body, rest[1:]))
                return replace(ctx, blocks=tuple(blocks))
        raise PathNotFound(tuple(path), f"no subsystem {rest[0]!r}")

    return lib.with_model(replace(model, body=rebuild(model.body, tuple(path[1:]))))


def iter_contexts(ctx: Context, path: tuple[str, ...] = ()) -> Iterator[tuple[tuple[str, ...], Context]]:
    """Yield ``(path, context)`` for ``ctx`` and every nested subsystem body."""
    yield path, ctx
    for b in ctx.blocks:
        if isinstance(b, Subsystem):
            yield from iter_contexts(b.body, path + (b.name,))


def referenced_models(ctx: Context) -> list[str]:
    return [b.ref_model for _, c in iter_contexts(ctx) for b in c.blocks
            if isinstance(b, ModelReference)]
