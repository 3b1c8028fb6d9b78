"""Brute-force references, written independently of the library code they check."""
import itertools


def oracle_holds(expr, applied):
    """Truth-table evaluation of a constraint given the set already applied."""
    kind = type(expr).__name__
    if kind == "TrueAoc":
        return True
    if kind == "After":
        return expr.delta in applied
    if kind == "Not":
        return not oracle_holds(expr.expr, applied)
    if kind == "And":
        return oracle_holds(expr.left, applied) and oracle_holds(expr.right, applied)
    return oracle_holds(expr.left, applied) or oracle_holds(expr.right, applied)


def valid_orders(aocs: dict):
    """Every permutation whose constraints hold at each position, in lexicographic order."""
    # permutations of a sorted sequence come out in lexicographic order
    for perm in itertools.permutations(sorted(aocs)):
        if all(oracle_holds(aocs[n], set(perm[:i])) for i, n in enumerate(perm)):
            yield list(perm)


def oracle_order(aocs: dict):
    """Lexicographically first valid permutation, or None."""
    return next(valid_orders(aocs), None)
