"""Application-order constraints, order search, and variant generation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import AbstractSet, Iterable, Iterator, Optional

from .delta import AocExpr, After, And, Delta, Not, Or, ProductConfiguration, TrueAoc
from .engine import apply_delta
from .model import ModelLibrary
from .wellformed import Diagnostic, check_wellformed


@dataclass(frozen=True)
class DeltaLibrary:
    deltas: tuple[Delta, ...] = ()

    def __post_init__(self) -> None:
        names = [d.name for d in self.deltas]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise ValueError(f"duplicate deltas: {sorted(dup)}")

    def __contains__(self, name: object) -> bool:
        return any(d.name == name for d in self.deltas)

    def __getitem__(self, name: str) -> Delta:
        for d in self.deltas:
            if d.name == name:
                return d
        raise KeyError(name)

    def __iter__(self) -> Iterator[Delta]:
        return iter(self.deltas)

    def __len__(self) -> int:
        return len(self.deltas)

    @property
    def names(self) -> list[str]:
        return [d.name for d in self.deltas]


# -- AOC evaluation -----------------------------------------------------------------

def evaluate_aoc(aoc: AocExpr, applied_before: AbstractSet[str], config: AbstractSet[str] = frozenset()) -> bool:
    """Evaluate ``aoc`` given the deltas already applied.

    ``after d`` holds iff ``d`` was applied before. Since only configured deltas
    are ever applied, ``after d`` for an unselected ``d`` is false and its
    negation is vacuously true. ``config`` is accepted for symmetry with callers
    and does not change the result.
    """
    if isinstance(aoc, TrueAoc):
        return True
    if isinstance(aoc, After):
        return aoc.delta in applied_before
    if isinstance(aoc, Not):
        return not evaluate_aoc(aoc.expr, applied_before, config)
    if isinstance(aoc, And):
        return evaluate_aoc(aoc.left, applied_before, config) and evaluate_aoc(aoc.right, applied_before, config)
    if isinstance(aoc, Or):
        return evaluate_aoc(aoc.left, applied_before, config) or evaluate_aoc(aoc.right, applied_before, config)
    raise TypeError(f"not an AOC expression: {aoc!r}")


def violated_atom(aoc: AocExpr, applied_before: AbstractSet[str]) -> Optional[str]:
    """Name the first atom responsible for ``aoc`` being false, e.g. ``"!after X"``.

    Returns None when ``aoc`` holds.
    """
    def culprit(e: AocExpr, want: bool) -> Optional[str]:
        if evaluate_aoc(e, applied_before) == want:
            return None
        if isinstance(e, After):
            return f"after {e.delta}" if want else f"!after {e.delta}"
        if isinstance(e, Not):
            return culprit(e.expr, not want)
        if isinstance(e, (And, Or)):
            # the failing side: for And-true / Or-false every child matters, take the first bad one
            for child in (e.left, e.right):
                c = culprit(child, want)
                if c is not None:
                    return c
        return "true" if want else "!true"

    return culprit(aoc, True)


# -- ordering -----------------------------------------------------------------------

class OrderFailure(Exception):
    pass


class UnknownDelta(OrderFailure):
    def __init__(self, name: str):
        super().__init__(f"unknown delta {name!r}")
        self.name = name


@dataclass(frozen=True)
class DeadEnd:
    prefix: tuple[str, ...]
    blocked: tuple[tuple[str, str], ...]   # (delta, violated atom)

    def __str__(self) -> str:
        head = " ".join(self.prefix) or "(start)"
        return f"after [{head}]: " + "; ".join(f"{d} needs {a}" for d, a in self.blocked)


class Unsatisfiable(OrderFailure):
    def __init__(self, product: str, witness: list[DeadEnd]):
        self.product = product
        self.witness = witness
        lines = [f"no valid application order for {product!r}"] + [f"  {w}" for w in witness]
        super().__init__("\n".join(lines))


def compute_order(config: ProductConfiguration, deltas: DeltaLibrary) -> list[str]:
    """Lexicographically smallest order satisfying every delta's AOC.

    Depth-first search extending the prefix with candidates in name order.
    Whether a delta may go next depends only on the *set* applied so far, so
    dead sets are memoized and the search is exponential in the number of
    deltas rather than factorial.
    """
    for name in sorted(config.deltas):
        if name not in deltas:
            raise UnknownDelta(name)
    names = sorted(config.deltas)
    aocs = {n: deltas[n].aoc for n in names}
    dead: dict[frozenset[str], DeadEnd] = {}

    def search(prefix: list[str], applied: frozenset[str]) -> Optional[list[str]]:
        if len(prefix) == len(names):
            return list(prefix)
        if applied in dead:
            return None
        blocked = []
        for n in names:
            if n in applied:
                continue
            if not evaluate_aoc(aocs[n], applied, config.deltas):
                blocked.append((n, violated_atom(aocs[n], applied)))
                continue
            prefix.append(n)
            found = search(prefix, applied | {n})
            prefix.pop()
            if found is not None:
                return found
        if len(blocked) == len(names) - len(applied):
            # nothing could be placed here: a genuine frontier
            dead[applied] = DeadEnd(tuple(prefix), tuple(blocked))
        else:
            dead[applied] = DeadEnd(tuple(prefix), ())
        return None

    order = search([], frozenset())
    if order is None:
        witness = [d for d in dead.values() if d.blocked]
        raise Unsatisfiable(config.name, witness)
    return order


def order_is_valid(order: Iterable[str], deltas: DeltaLibrary, config: AbstractSet[str]) -> bool:
    applied: set[str] = set()
    for n in order:
        if not evaluate_aoc(deltas[n].aoc, applied, config):
            return False
        applied.add(n)
    return True


# -- generation --------------------------------------------------------------------

@dataclass(frozen=True)
class GenerationResult:
    variant: ModelLibrary
    applied_order: tuple[str, ...]
    diagnostics: tuple[Diagnostic, ...] = field(default=())

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.is_error]

    @property
    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if not d.is_error]


def generate(core: ModelLibrary, deltas: DeltaLibrary, config: ProductConfiguration) -> GenerationResult:
    """Order the configured deltas, apply them to ``core``, and check the result.

    Raises :class:`OrderFailure` or :class:`~deltablocks.engine.ApplicationError`.
    """
    order = compute_order(config, deltas)
    lib = core
    for name in order:
        lib = apply_delta(lib, deltas[name])
    return GenerationResult(lib, tuple(order), tuple(check_wellformed(lib)))
