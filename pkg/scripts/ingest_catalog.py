"""Rebuild src/extremesets/data/catalog.txt from catalog_source.txt."""
import argparse
from pathlib import Path

from extremesets.catalog import CATALOG_HEADER, ingest_source, serialize

DATA = Path(__file__).resolve().parents[1] / "src" / "extremesets" / "data"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--source", type=Path, default=DATA / "catalog_source.txt")
    ap.add_argument("--out", type=Path, default=DATA / "catalog.txt")
    args = ap.parse_args()
    entries, messages = ingest_source(args.source.read_text(encoding="utf-8"))
    for msg in messages:
        print(msg)
    args.out.write_text(serialize(entries, CATALOG_HEADER), encoding="utf-8")
    n = sum(len(e.measures) for e in entries)
    print(f"wrote {len(entries)} entries ({n} measures) to {args.out}")


if __name__ == "__main__":
    main()
