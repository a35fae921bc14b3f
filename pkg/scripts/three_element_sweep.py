"""Search every 3-element class in Z_k and compare with the coset rule.

A 3-element set carries an extreme measure exactly when it is a coset of a
3-element subgroup or lies inside a coset of a 4-element subgroup.
"""
import argparse
import time

from extremesets import ExtremeFound, enumerate_class_representatives, exact_extremality_check, make_group, run_search
from extremesets.groups import enumerate_subgroups, sub
from extremesets.structure import is_coset


def predicted_extreme(G, E) -> bool:
    if is_coset(G, E):
        return True
    for H in enumerate_subgroups(G, 4):
        members = set(H.elements)
        if all(sub(G, x, E[0]) in members for x in E):
            return True
    return False


def sweep(kmin: int, kmax: int, verbose: bool = False) -> list[tuple]:
    rows = []
    for k in range(kmin, kmax + 1):
        G = make_group([k])
        for c in enumerate_class_representatives(G, 3):
            E = list(c.representative)
            report = run_search(G, E)
            found = isinstance(report.verdict, ExtremeFound) and exact_extremality_check(report.verdict.measure).extreme
            row = (k, [e[0] for e in E], report.verdict.name, found, predicted_extreme(G, E))
            rows.append(row)
            if verbose:
                print(*row)
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmin", type=int, default=3)
    ap.add_argument("--kmax", type=int, default=16)
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args()
    t0 = time.perf_counter()
    rows = sweep(args.kmin, args.kmax, args.verbose)
    bad = [r for r in rows if r[3] != r[4]]
    for r in bad:
        print("MISMATCH", *r)
    extreme = sum(r[3] for r in rows)
    print(f"{len(rows)} classes, {extreme} extreme, {len(bad)} mismatches, {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
