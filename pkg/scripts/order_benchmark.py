"""Time the order solver against brute-force permutation search on random constraint sets."""
import argparse
import itertools
import random
import time

from deltablocks.delta import After, And, Delta, ModifyModel, Not, Or, ProductConfiguration, TRUE
from deltablocks.scheduler import DeltaLibrary, Unsatisfiable, compute_order, evaluate_aoc


def random_aoc(rng, names, leaves=3):
    if leaves <= 1 or rng.random() < 0.3:
        return After(rng.choice(names))
    kind = rng.choice(["not", "and", "or"])
    if kind == "not":
        return Not(random_aoc(rng, names, leaves - 1))
    split = rng.randint(1, leaves - 1)
    node = And if kind == "and" else Or
    return node(random_aoc(rng, names, split), random_aoc(rng, names, leaves - split))


def brute_force(aocs):
    for perm in itertools.permutations(sorted(aocs)):
        if all(evaluate_aoc(aocs[n], set(perm[:i]), set(aocs)) for i, n in enumerate(perm)):
            return list(perm)
    return None


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--max-deltas", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    print(f"{'n':>2} {'solver_ms':>10} {'brute_ms':>10} {'unsat':>6} {'agree':>6}")
    for n in range(1, args.max_deltas + 1):
        names = [f"D{i}" for i in range(n)]
        solver_t = brute_t = 0.0
        unsat = agree = 0
        for _ in range(args.trials):
            aocs = {d: (TRUE if rng.random() < 0.4 else random_aoc(rng, names)) for d in names}
            lib = DeltaLibrary(tuple(Delta(d, (ModifyModel("M"),), a) for d, a in aocs.items()))
            t0 = time.perf_counter()
            try:
                got = compute_order(ProductConfiguration("P", frozenset(names)), lib)
            except Unsatisfiable:
                got = None
            t1 = time.perf_counter()
            expected = brute_force(aocs)
            t2 = time.perf_counter()
            solver_t += t1 - t0
            brute_t += t2 - t1
            unsat += expected is None
            agree += got == expected
        print(f"{n:>2} {1000 * solver_t / args.trials:>10.3f} {1000 * brute_t / args.trials:>10.3f} "
              f"{unsat:>6} {agree:>6}")


if __name__ == "__main__":
    main()
