"""Print the computed example tables (c(-t), b(-d), Heegner polynomials) as JSON."""

import argparse
import json

from cmfactor.pipeline import Config, Context, check_b_table, check_f_table, check_heegner, scrub


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--prec", type=int, default=300)
    ap.add_argument("--no-cache", action="store_true")
    args = ap.parse_args()
    ctx = Context(Config(terms=args.prec, use_cache=not args.no_cache))
    f = check_f_table(ctx)
    b = check_b_table(ctx)
    h = check_heegner(ctx)
    out = {
        "c": f["computed"],
        "b": {d: str(v) for d, v in sorted(b["_pre"].b_table(b["scale"]).items())},
        "b_scale": b["scale"],
        "heegner": {d: row["poly"] for d, row in h["rows"].items()},
    }
    print(json.dumps(scrub(out), indent=1))


if __name__ == "__main__":
    main()
