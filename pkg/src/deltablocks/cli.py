"""Command-line front end: ``check``, ``order``, ``generate`` and ``generate-all``.

Exit status: 0 success, 1 semantic failure, 2 usage, syntax or I/O failure.
Human-readable messages go to stderr; artifacts go to files or stdout.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .delta import ModifyModel, ProductConfiguration, mentioned
from .dsl import ParseError, parse_deltas, parse_library, parse_products, render_library
from .engine import ApplicationError
from .export import export_dot
from .model import ModelLibrary, referenced_models
from .scheduler import DeltaLibrary, OrderFailure, UnknownDelta, compute_order, generate
from .wellformed import DiagCode, Diagnostic, Location, check_wellformed, sort_diagnostics

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class WorkspaceError(Exception):
    """Loading failed: unreadable file, syntax error, or duplicate declaration."""


@dataclass
class Workspace:
    models: ModelLibrary
    deltas: DeltaLibrary
    products: list[ProductConfiguration] = field(default_factory=list)

    def product(self, name: str) -> ProductConfiguration:
        for p in self.products:
            if p.name == name:
                return p
        raise WorkspaceError(f"unknown product {name!r}")


def _files(path: Optional[Path], suffix: str) -> list[Path]:
    if path is None:
        return []
    if path.is_dir():
        return sorted(path.glob(f"*{suffix}"))
    if path.is_file():
        return [path]
    raise WorkspaceError(f"{path}: no such file or directory")


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise WorkspaceError(f"{path}: {exc}") from None


def load_workspace(models: Optional[Path], deltas: Optional[Path], products: Optional[Path]) -> Workspace:
    lib_models = []
    origin: dict[str, Path] = {}
    for f in _files(models, ".dbm"):
        try:
            parsed = parse_library(_read(f))
        except ParseError as exc:
            raise WorkspaceError(f"{f}:{exc}") from None
        for m in parsed:
            if m.name in origin:
                raise WorkspaceError(f"{f}: model {m.name!r} already defined in {origin[m.name]}")
            origin[m.name] = f
            lib_models.append(m)

    delta_list = []
    dorigin: dict[str, Path] = {}
    for f in _files(deltas, ".dbd"):
        try:
            parsed_deltas = parse_deltas(_read(f))
        except ParseError as exc:
            raise WorkspaceError(f"{f}:{exc}") from None
        for d in parsed_deltas:
            if d.name in dorigin:
                raise WorkspaceError(f"{f}: delta {d.name!r} already defined in {dorigin[d.name]}")
            dorigin[d.name] = f
            delta_list.append(d)

    prods: list[ProductConfiguration] = []
    if products is not None:
        try:
            prods = parse_products(_read(products))
        except ParseError as exc:
            raise WorkspaceError(f"{products}:{exc}") from None
    return Workspace(ModelLibrary(tuple(lib_models)), DeltaLibrary(tuple(delta_list)), prods)


def workspace_diagnostics(ws: Workspace) -> list[Diagnostic]:
    """Core well-formedness plus cross-file reference checks."""
    out = list(check_wellformed(ws.models))
    for d in ws.deltas:
        for ref in sorted(mentioned(d.aoc)):
            if ref not in ws.deltas:
                out.append(Diagnostic(DiagCode.UnknownAocReference, Location(d.name, (), ref),
                                      f"constraint of delta {d.name!r} mentions unknown delta {ref!r}"))
        for mm in d.modifications:
            if isinstance(mm, ModifyModel) and mm.target_model not in ws.models:
                out.append(Diagnostic(DiagCode.UnknownModel, Location(d.name, (), mm.target_model),
                                      f"delta {d.name!r} modifies unknown model {mm.target_model!r}"))
    for p in ws.products:
        for name in sorted(p.deltas):
            if name not in ws.deltas:
                out.append(Diagnostic(DiagCode.UnknownDelta, Location(p.name, (), name),
                                      f"product {p.name!r} selects unknown delta {name!r}"))
    return sort_diagnostics(out)


def root_model(lib: ModelLibrary) -> Optional[str]:
    """First composite model no other model references; falls back to the first model."""
    used = {r for m in lib for r in referenced_models(m.body)}
    for m in lib:
        if m.name not in used and m.body.blocks:
            return m.name
    return lib.models[0].name if lib.models else None


# -- commands ---------------------------------------------------------------------

def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_check(ws: Workspace) -> int:
    diags = workspace_diagnostics(ws)
    for d in diags:
        _err(str(d))
    n_err = sum(d.is_error for d in diags)
    _err(f"{n_err} error(s), {len(diags) - n_err} warning(s)")
    return EXIT_FAIL if n_err else EXIT_OK


def cmd_order(ws: Workspace, product: str) -> int:
    config = ws.product(product)
    try:
        order = compute_order(config, ws.deltas)
    except UnknownDelta as exc:
        _err(f"error: {exc}")
        return EXIT_USAGE
    except OrderFailure as exc:
        _err(f"error: {exc}")
        return EXIT_FAIL
    for name in order:
        print(name)
    return EXIT_OK


@dataclass
class ProductOutcome:
    product: str
    n_deltas: int
    n_errors: int
    n_warnings: int
    status: int
    message: str = ""


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="\n")


def generate_product(ws: Workspace, config: ProductConfiguration, out_dir: Path,
                     strict: bool = False, dot: bool = False) -> ProductOutcome:
    name = config.name
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        try:
            result = generate(ws.models, ws.deltas, config)
        except (OrderFailure, ApplicationError) as exc:
            _write(out_dir / f"{name}.diag.txt", f"error {exc}\n")
            return ProductOutcome(name, len(config.deltas), 1, 0, EXIT_FAIL, str(exc))
        _write(out_dir / f"{name}.dbm", render_library(result.variant))
        _write(out_dir / f"{name}.order.txt", "".join(f"{d}\n" for d in result.applied_order))
        _write(out_dir / f"{name}.diag.txt", "".join(f"{d}\n" for d in result.diagnostics))
        if dot:
            root = root_model(result.variant)
            text = export_dot(root, result.variant).text if root else "digraph {\n}\n"
            _write(out_dir / f"{name}.dot", text)
    except OSError as exc:
        return ProductOutcome(name, len(config.deltas), 0, 0, EXIT_USAGE, str(exc))
    n_err, n_warn = len(result.errors), len(result.warnings)
    failed = n_err > 0 or (strict and n_warn > 0)
    msg = "; ".join(str(d) for d in result.diagnostics if d.is_error or strict)
    return ProductOutcome(name, len(config.deltas), n_err, n_warn, EXIT_FAIL if failed else EXIT_OK, msg)


def cmd_generate(ws: Workspace, product: str, out_dir: Path, strict: bool = False, dot: bool = False) -> int:
    outcome = generate_product(ws, ws.product(product), out_dir, strict, dot)
    if outcome.message:
        _err(f"{product}: {outcome.message}")
    return outcome.status


def cmd_generate_all(ws: Workspace, out_dir: Path, strict: bool = False, dot: bool = False,
                     jobs: Optional[int] = None) -> int:
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(generate_product, ws, p, out_dir / p.name, strict, dot) for p in ws.products]
        outcomes = sorted((f.result() for f in futures), key=lambda o: o.product)
    width = max([len("product")] + [len(o.product) for o in outcomes])
    print(f"{'product':<{width}}  deltas  errors  warnings  status")
    for o in outcomes:
        status = "ok" if o.status == EXIT_OK else "failed"
        print(f"{o.product:<{width}}  {o.n_deltas:>6}  {o.n_errors:>6}  {o.n_warnings:>8}  {status}")
        if o.message:
            _err(f"{o.product}: {o.message}")
    return max((o.status for o in outcomes), default=EXIT_OK)


# -- argument parsing ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    def workspace_flags(default):
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--models", type=Path, default=default, help="directory of .dbm files (or one file)")
        common.add_argument("--deltas", type=Path, default=default, help="directory of .dbd files (or one file)")
        common.add_argument("--products", type=Path, default=default, help="product configuration file (.dbp)")
        return common

    # flags may come before or after the subcommand; SUPPRESS keeps the
    # subcommand parser from clobbering values given before it
    top, common = workspace_flags(None), workspace_flags(argparse.SUPPRESS)

    gen = argparse.ArgumentParser(add_help=False)
    gen.add_argument("--out", type=Path, required=True, help="output directory")
    gen.add_argument("--strict", action="store_true", help="treat warnings as failures")
    gen.add_argument("--dot", action="store_true", help="also write a Graphviz rendering")

    parser = argparse.ArgumentParser(prog="deltablocks", parents=[top],
                                     description="Delta-oriented variant generation for block diagrams.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="check the core library and delta references")
    p = sub.add_parser("order", parents=[common], help="print the application order of a product")
    p.add_argument("product")
    p = sub.add_parser("generate", parents=[common, gen], help="generate one product variant")
    p.add_argument("product")
    p = sub.add_parser("generate-all", parents=[common, gen], help="generate every product")
    p.add_argument("--jobs", type=int, default=None, help="parallel workers")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        needs_products = args.command != "check"
        if needs_products and args.products is None:
            raise WorkspaceError("--products is required for this command")
        ws = load_workspace(args.models, args.deltas, args.products)
        if args.command == "check":
            return cmd_check(ws)
        if args.command == "order":
            return cmd_order(ws, args.product)
        if args.command == "generate":
            return cmd_generate(ws, args.product, args.out, args.strict, args.dot)
        return cmd_generate_all(ws, args.out, args.strict, args.dot, args.jobs)
    except WorkspaceError as exc:
        _err(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
