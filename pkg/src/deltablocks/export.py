"""Graphviz ``digraph`` export with subsystems and references as nested clusters."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .model import Boundary, Context, Endpoint, Model, ModelLibrary, Subsystem, UnknownModel


@dataclass(frozen=True)
class DotDocument:
    text: str

    def __str__(self) -> str:
        return self.text


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


class _Emitter:
    def __init__(self, lib: ModelLibrary):
        self.lib = lib
        self.lines: list[str] = []
        self.nodes: set[str] = set()
        self.cluster_no = 0

    def node(self, nid: str, label: str, shape: str, pad: str, extra: str = "") -> None:
        self.nodes.add(nid)
        self.lines.append(f"{pad}{_q(nid)} [label={_q(label)}, shape={shape}{extra}];")

    def context(self, ctx: Context, prefix: str, depth: Optional[int], stack: tuple[str, ...], pad: str) -> None:
        for p in ctx.in_ports:
            self.node(f"{prefix}/{p}", p, "invhouse", pad)
        for p in ctx.out_ports:
            self.node(f"{prefix}/{p}", p, "house", pad)

        # ends of connections: a port node of an expanded child, else the child node itself
        expanded: set[str] = set()
        for b in ctx.blocks:
            bid = f"{prefix}/{b.name}"
            if isinstance(b, Subsystem):
                label, body, seen = b.name, b.body, stack
            else:
                label = f"{b.name} : {b.ref_model}"
                model = self.lib.get(b.ref_model)
                body = model.body if model is not None and b.ref_model not in stack else None
                seen = stack + (b.ref_model,)
            if body is not None and (depth is None or depth > 0):
                self.cluster_no += 1
                self.lines.append(f"{pad}subgraph cluster_{self.cluster_no} {{")
                self.lines.append(f"{pad}  label={_q(label)};")
                self.context(body, bid, None if depth is None else depth - 1, seen, pad + "  ")
                self.lines.append(f"{pad}}}")
                expanded.add(b.name)
            else:
                self.node(bid, label, "box", pad)

        def ref(e: Endpoint) -> tuple[str, str]:
            if isinstance(e, Boundary):
                return f"{prefix}/{e.port}", ""
            if e.block in expanded:
                return f"{prefix}/{e.block}/{e.port}", ""
            return f"{prefix}/{e.block}", e.port

        for c in ctx.connections:
            (src, sport), (dst, dport) = ref(c.source), ref(c.target)
            for nid in (src, dst):
                if nid not in self.nodes:
                    # unresolved end in an ill-formed model; keep the document self-contained
                    self.node(nid, nid.rsplit("/", 1)[-1], "point", pad, ", style=dashed")
            attrs = []
            if sport:
                attrs.append(f"taillabel={_q(sport)}")
            if dport:
                attrs.append(f"headlabel={_q(dport)}")
            suffix = f" [{', '.join(attrs)}]" if attrs else ""
            self.lines.append(f"{pad}{_q(src)} -> {_q(dst)}{suffix};")


def export_dot(model: Union[Model, str], lib: ModelLibrary, depth: Optional[int] = None) -> DotDocument:
    """Render ``model`` as a digraph.

    ``depth`` limits how many levels of subsystems and model references are
    expanded into clusters; None expands everything, stopping at reference cycles.
    """
    name = model if isinstance(model, str) else model.name
    m = lib.get(name)
    if m is None:
        raise UnknownModel(name)
    if depth is not None and depth < 0:
        raise ValueError("depth must be non-negative")
    em = _Emitter(lib)
    em.context(m.body, name, depth, (name,), "  ")
    lines = [f"digraph {_q(name)} {{", "  rankdir=LR;", *em.lines, "}"]
    return DotDocument("\n".join(lines) + "\n")
