"""Generate every braking-system product and print a structural summary per variant."""
import argparse
from pathlib import Path

from deltablocks.cli import load_workspace, main
from deltablocks.scheduler import generate

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures" / "braking"


def summarize(ws):
    print(f"{'product':<22} {'order':<48} {'in':>3} {'out':>3} {'conns':>5}  brakefunction")
    for config in sorted(ws.products, key=lambda p: p.name):
        result = generate(ws.models, ws.deltas, config)
        bs = result.variant["BrakingSystem"].body
        ref = bs.block("brakefunction").ref_model
        order = ",".join(result.applied_order) or "-"
        print(f"{config.name:<22} {order:<48} {len(bs.in_ports):>3} {len(bs.out_ports):>3} "
              f"{len(bs.connections):>5}  {ref}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, help="also write generate-all output here")
    args = ap.parse_args()
    ws = load_workspace(FIXTURES / "models", FIXTURES / "deltas", FIXTURES / "products.dbp")
    summarize(ws)
    if args.out:
        ws_args = ["--models", str(FIXTURES / "models"), "--deltas", str(FIXTURES / "deltas"),
                   "--products", str(FIXTURES / "products.dbp")]
        raise SystemExit(main(["generate-all", "--out", str(args.out), "--dot", *ws_args]))
