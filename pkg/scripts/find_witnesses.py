"""Search relabelled 6-d nilpotent algebras for W3 / W2+ / W2- witnesses.

The standard straight structure (identity metric, Fock vacuum spinor) is held
fixed and the algebra basis is permuted; a hit needs the relevant derivatives
of rho0, rho1 to vanish and the surviving one to be a Ramond-Ramond field.
"""

import argparse
import sys

from ggtool import liegeom as lg
from ggtool.verify import NILPOTENT_6D, find_special_witnesses


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--limit", type=int, default=3, help="stop once every type has this many hits")
    p.add_argument("--check-catalog", action="store_true", help="only verify the catalog strings")
    args = p.parse_args(argv)
    bad = []
    for text in NILPOTENT_6D:
        M = lg.parse_model(text)
        if not (M.is_nilpotent() and M.is_unimodular()):
            bad.append(text)
    print(f"catalog: {len(NILPOTENT_6D)} algebras, {len(bad)} rejected {bad}")
    if args.check_catalog:
        return 0 if not bad else 1
    found = find_special_witnesses(NILPOTENT_6D, args.limit)
    for kind in ("W3", "W2+", "W2-"):
        hits = found.get(kind, [])
        print(f"{kind}: {len(hits)} hits")
        for text, perm, relabelled in hits[: args.limit]:
            print(f"  {text}  perm={perm}  ->  {relabelled}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
