"""Run the certificate searches across the whole fixture corpus and report.

Prints, for every fixture: element count, facet count, search nodes spent,
wall time and the recursive cd-index total.  A quick way to eyeball search
behaviour after changes.

Usage: python scripts/search_report.py [--budget N]
"""

from __future__ import annotations

import argparse
import time

from cdposet import zoo
from cdposet.flags import cd_index, semi_cd_index
from cdposet.ncpoly import format_polynomial
from cdposet.partition import (
    Budget,
    contributions_s,
    contributions_se,
    search_s_certificate,
    search_se_certificate,
)

S_FIXTURES = [
    ("sphere2cells", (0,)),
    ("sphere2cells", (4,)),
    ("sphere2cells", (8,)),
    ("polygon", (5,)),
    ("polygon", (12,)),
    ("simplex-boundary", (4,)),
    ("cube", (3,)),
    ("cross-polytope", (3,)),
    ("q-polytope", ()),
    ("connected-sum", (3,)),
]

SE_FIXTURES = [
    ("discrete-points", (7,)),
    ("torus-fig6", ()),
    ("torus-fig12", ()),
    ("product", (3, 3)),
    ("octahedron", ()),
    ("icosahedron", ()),
    ("torus-7vertex", ()),
]


def run(kind: str, family: str, params: tuple, limit: int) -> None:
    poset = zoo.gen(family, params)
    budget = Budget(limit)
    start = time.monotonic()
    if kind == "S":
        cert = search_s_certificate(poset, budget=budget)
        total = contributions_s(cert, check=False).total
        direct = cd_index(poset)
    else:
        cert = search_se_certificate(poset, budget=budget)
        total = contributions_se(cert, check=False).total
        direct = semi_cd_index(poset)
    elapsed = time.monotonic() - start
    assert cert is not None and total == direct
    label = family + (str(list(params)) if params else "")
    print(
        f"{kind:2s} {label:22s} {len(poset):4d} elems {len(poset.coatoms()):3d} facets"
        f" {budget.used:7d} nodes {elapsed * 1000:8.1f} ms  {format_polynomial(total)}"
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--budget", type=int, default=10**6)
    args = parser.parse_args()
    for family, params in S_FIXTURES:
        run("S", family, params, args.budget)
    for family, params in SE_FIXTURES:
        run("SE", family, params, args.budget)


if __name__ == "__main__":
    main()
