"""The shipped catalog of published extreme measures and its verification.

Each line of ``catalog.txt`` holds one measure::

    group=12 set=0,2,3,4,7 masses=0/1,3/4,5/8,0/1,1/8 src=prior-work

Masses are turns (fractions of a full rotation), one per set element in
the order written.  Optional fields: ``expect=fail`` for measures printed
with a known error, ``class=`` for the canonical representative when the
set is not its own, and ``note="..."``.  Lines sharing a group and set
form one entry; identical measures are collapsed with their sources merged.
"""
from __future__ import annotations

import re
import shlex
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .cyclotomic import ExactVerdict, exact_extremality_check
from .groups import Element, GroupSpec, format_elements, parse_elements, parse_group
from .measures import PhaseMeasure

KNOWN_FIELDS = ("group", "set", "masses", "src", "expect", "class", "note")


class CatalogError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class CatalogMeasure:
    turns: tuple[Fraction, ...]
    provenance: tuple[str, ...]
    expect_fail: bool = False
    note: str = ""


@dataclass
class CatalogEntry:
    group: GroupSpec
    set: tuple[Element, ...]
    measures: list[CatalogMeasure]
    class_rep: tuple[Element, ...] | None = None
    line: int | None = None

    @property
    def masses(self) -> tuple[Fraction, ...]:
        return self.measures[0].turns

    @property
    def provenance(self) -> tuple[str, ...]:
        out: list[str] = []
        for m in self.measures:
            out.extend(p for p in m.provenance if p not in out)
        return tuple(out)

    def measure(self, k: int = 0) -> PhaseMeasure:
        return PhaseMeasure.unimodular(self.group, self.set, self.measures[k].turns)

    @property
    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.group.orders, tuple(sorted(self.group.index(g) for g in self.set))


# -- TeX measures ----------------------------------------------------------------

_EXP = re.compile(r"e\^\{(-?\d*)\\pii(?:/(\d+))?\}")
_DELTA = re.compile(r"\\delta_?(?:\{([^{}]*)\}|(\d))")


def _coefficient(text: str, pos: int) -> tuple[Fraction, int]:
    """Signs, then an optional e^{k pi i/m} or i; returns (turn, new position)."""
    turn = Fraction(0)
    while pos < len(text) and text[pos] in "+-":
        if text[pos] == "-":
            turn += Fraction(1, 2)
        pos += 1
    m = _EXP.match(text, pos)
    if m:
        k = int(m.group(1)) if m.group(1) not in ("", "-") else (-1 if m.group(1) == "-" else 1)
        turn += Fraction(k, 2 * int(m.group(2) or 1))
        pos = m.end()
    elif text.startswith("i", pos):
        turn += Fraction(1, 4)
        pos += 1
    return turn % 1, pos


def _delta_point(G: GroupSpec, raw: str) -> Element:
    raw = raw.strip("()")
    return G.reduce([int(t) for t in raw.split(",")] if G.rank > 1 else [int(raw)])


def parse_tex_measure(G: GroupSpec, text: str) -> dict[Element, Fraction]:
    """Read a sum like ``\\delta_0 + e^{3\\pi i/4}\\delta_1 - i(\\delta_2+\\delta_5)``.

    Only unimodular masses are supported.  Returns point -> turn.
    """
    s = re.sub(r"\s+", "", text).replace("$", "").replace("\\\\", "").replace("&", "")
    s = s.replace("\\big(", "(").replace("\\big)", ")").rstrip(".")
    out: dict[Element, Fraction] = {}

    def put(point: Element, turn: Fraction) -> None:
        if point in out:
            raise ValueError(f"point {point} appears twice")
        out[point] = turn % 1

    pos = 0
    while pos < len(s):
        turn, pos = _coefficient(s, pos)
        if s.startswith("(", pos):
            close = _matching_paren(s, pos)
            inner = s[pos + 1 : close]
            for sub_turn, point in _terms(G, inner):
                put(point, turn + sub_turn)
            pos = close + 1
            continue
        m = _DELTA.match(s, pos)
        if not m:
            raise ValueError(f"cannot read measure near {s[pos:pos + 20]!r}")
        put(_delta_point(G, m.group(1) if m.group(1) is not None else m.group(2)), turn)
        pos = m.end()
    return out


def _matching_paren(s: str, start: int) -> int:
    depth = 0
    for k in range(start, len(s)):
        depth += {"(": 1, ")": -1}.get(s[k], 0)
        if depth == 0:
            return k
    raise ValueError("unbalanced parentheses")


def _terms(G: GroupSpec, s: str) -> list[tuple[Fraction, Element]]:
    # inner sums of deltas may still carry signs and i factors, but no tuples
    out = []
    pos = 0
    while pos < len(s):
        turn, pos = _coefficient(s, pos)
        m = _DELTA.match(s, pos)
        if not m:
            raise ValueError(f"cannot read measure near {s[pos:pos + 20]!r}")
        out.append((turn, _delta_point(G, m.group(1) if m.group(1) is not None else m.group(2))))
        pos = m.end()
    return out


# -- text format -----------------------------------------------------------------


def _parse_turns(text: str) -> tuple[Fraction, ...]:
    return tuple(Fraction(t) % 1 for t in text.split(",") if t.strip())


def _format_turn(t: Fraction) -> str:
    return f"{t.numerator}/{t.denominator}"


def parse_fields(line: str, lineno: int | None = None) -> dict[str, str]:
    try:
        tokens = shlex.split(line, comments=False)
    except ValueError as exc:
        raise CatalogError(str(exc), lineno) from exc
    fields: dict[str, str] = {}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if not sep:
            raise CatalogError(f"expected key=value, got {tok!r}", lineno)
        if key not in KNOWN_FIELDS:
            raise CatalogError(f"unknown field {key!r}", lineno)
        if key in fields:
            raise CatalogError(f"field {key!r} given twice", lineno)
        fields[key] = value
    return fields


def parse_line(line: str, lineno: int | None = None) -> CatalogEntry:
    fields = parse_fields(line, lineno)
    for key in ("group", "set", "masses", "src"):
        if key not in fields:
            raise CatalogError(f"missing field {key!r}", lineno)
    try:
        G = parse_group(fields["group"])
        points = tuple(parse_elements(G, fields["set"]))
        turns = _parse_turns(fields["masses"])
        rep = tuple(parse_elements(G, fields["class"])) if "class" in fields else None
    except (ValueError, ZeroDivisionError) as exc:
        raise CatalogError(str(exc), lineno) from exc
    if len(points) != len(turns):
        raise CatalogError(f"{len(points)} elements but {len(turns)} masses", lineno)
    if len(set(points)) != len(points):
        raise CatalogError("repeated set element", lineno)
    expect = fields.get("expect", "")
    if expect not in ("", "fail"):
        raise CatalogError(f"expect must be 'fail', got {expect!r}", lineno)
    measure = CatalogMeasure(
        turns, tuple(p for p in fields["src"].split(",") if p), expect == "fail", fields.get("note", "")
    )
    return _normalised_entry(CatalogEntry(G, points, [measure], rep, lineno))


def _normalised_entry(e: CatalogEntry) -> CatalogEntry:
    """Sort the set into enumeration order, carrying the masses along."""
    G = e.group
    order = sorted(range(len(e.set)), key=lambda k: G.index(e.set[k]))
    points = tuple(e.set[k] for k in order)
    measures = [
        CatalogMeasure(tuple(m.turns[k] for k in order), m.provenance, m.expect_fail, m.note) for m in e.measures
    ]
    return CatalogEntry(G, points, measures, e.class_rep, e.line)


def merge_entries(entries: Iterable[CatalogEntry]) -> list[CatalogEntry]:
    """Collapse entries on the same group and set; identical measures merge their sources."""
    merged: dict[tuple, CatalogEntry] = {}
    for e in entries:
        e = _normalised_entry(e)
        if e.key not in merged:
            merged[e.key] = CatalogEntry(e.group, e.set, [], e.class_rep, e.line)
        target = merged[e.key]
        target.class_rep = target.class_rep or e.class_rep
        for m in e.measures:
            for i, old in enumerate(target.measures):
                if (old.turns, old.expect_fail, old.note) == (m.turns, m.expect_fail, m.note):
                    src = old.provenance + tuple(p for p in m.provenance if p not in old.provenance)
                    target.measures[i] = CatalogMeasure(old.turns, src, old.expect_fail, old.note)
                    break
            else:
                target.measures.append(m)
    return list(merged.values())


def parse_catalog(text: str) -> list[CatalogEntry]:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        entries.append(parse_line(line, lineno))
    return merge_entries(entries)


def default_catalog_text() -> str:
    return resources.files("extremesets").joinpath("data/catalog.txt").read_text(encoding="utf-8")


def load_catalog(path: str | Path | None = None) -> list[CatalogEntry]:
    text = default_catalog_text() if path is None else Path(path).read_text(encoding="utf-8")
    return parse_catalog(text)


def sort_key(e: CatalogEntry) -> tuple:
    return (e.group.order, e.group.orders, len(e.set), e.key[1])


def format_measure_line(e: CatalogEntry, m: CatalogMeasure) -> str:
    parts = [
        f"group={e.group.literal()}",
        f"set={format_elements(e.set)}",
        f"masses={','.join(_format_turn(t) for t in m.turns)}",
        f"src={','.join(m.provenance)}",
    ]
    if m.expect_fail:
        parts.append("expect=fail")
    if e.class_rep is not None:
        parts.append(f"class={format_elements(e.class_rep)}")
    if m.note:
        parts.append(f"note={shlex.quote(m.note)}")
    return " ".join(parts)


def serialize(entries: Sequence[CatalogEntry], header: str = "") -> str:
    lines = [header.rstrip("\n")] if header else []
    for e in entries:
        lines.extend(format_measure_line(e, m) for m in e.measures)
    return "\n".join(lines) + "\n" if lines else ""


# -- verification ----------------------------------------------------------------


@dataclass
class MeasureCheck:
    index: int
    verdict: ExactVerdict
    expected_fail: bool
    provenance: tuple[str, ...]

    @property
    def unexpected(self) -> bool:
        return self.verdict.extreme == self.expected_fail


@dataclass
class EntryReport:
    entry: CatalogEntry
    checks: list[MeasureCheck]

    @property
    def status(self) -> str:
        ok = all(c.verdict.extreme for c in self.checks if not c.expected_fail)
        return "Verified" if ok and any(c.verdict.extreme for c in self.checks) else "FailedVerification"

    def to_record(self) -> dict:
        e = self.entry
        return {
            "group": e.group.literal(),
            "set": format_elements(e.set),
            "status": self.status,
            "measures": [
                {
                    "masses": ",".join(_format_turn(t) for t in e.measures[c.index].turns),
                    "src": ",".join(c.provenance),
                    "verdict": "Extreme" if c.verdict.extreme else "NotExtreme",
                    "expected_fail": c.expected_fail,
                    "witness": None if c.verdict.extreme else format_elements([c.verdict.witness]),
                    "residue": None if c.verdict.extreme else str(c.verdict.coefficient),
                }
                for c in self.checks
            ],
        }


def verify_entry(e: CatalogEntry) -> EntryReport:
    checks = []
    for k, m in enumerate(e.measures):
        verdict = exact_extremality_check(e.measure(k))
        checks.append(MeasureCheck(k, verdict, m.expect_fail, m.provenance))
    return EntryReport(e, checks)


@dataclass
class CatalogSummary:
    entries: int = 0
    measures: int = 0
    verified: int = 0
    expected_failures: list[EntryReport] = field(default_factory=list)
    unexpected: list[EntryReport] = field(default_factory=list)
    reports: list[EntryReport] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.unexpected

    def to_record(self) -> dict:
        return {
            "entries": self.entries,
            "measures": self.measures,
            "verified": self.verified,
            "expected_failures": len(self.expected_failures),
            "unexpected": [r.to_record() for r in self.unexpected],
        }


def verify_all(catalog: Sequence[CatalogEntry], workers: int = 1) -> CatalogSummary:
    """Exact check of every measure.  ``verified`` counts measures, not entries."""
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(verify_entry, catalog))
    else:
        reports = [verify_entry(e) for e in catalog]
    summary = CatalogSummary(entries=len(catalog), reports=reports)
    for r in reports:
        summary.measures += len(r.checks)
        summary.verified += sum(c.verdict.extreme for c in r.checks)
        if any(c.unexpected for c in r.checks):
            summary.unexpected.append(r)
        elif any(c.expected_fail for c in r.checks):
            summary.expected_failures.append(r)
    return summary


def filter_provenance(catalog: Sequence[CatalogEntry], label: str) -> list[CatalogEntry]:
    """Entries restricted to the measures carrying ``label``."""
    out = []
    for e in catalog:
        ms = [m for m in e.measures if label in m.provenance]
        if ms:
            out.append(CatalogEntry(e.group, e.set, ms, e.class_rep, e.line))
    return out


# -- ingestion ---------------------------------------------------------------------

CATALOG_HEADER = """\
# Extreme measures on finite abelian groups.  Generated by
# scripts/ingest_catalog.py from catalog_source.txt; do not edit by hand.
# Masses are turns: p/q stands for exp(2 pi i p/q)."""


def ingest_source(text: str) -> tuple[list[CatalogEntry], list[str]]:
    """Convert TeX-transcribed measures into catalog entries.

    A printed set that differs from the support of its measure is kept in a
    note, and measures that fail the exact check are marked ``expect=fail``
    rather than corrected.  Returns the entries and a list of messages.
    """
    from .equivalence import canonical_form

    entries, messages = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, tex = line.partition("::")
        if not sep:
            raise CatalogError("missing '::' before the measure", lineno)
        fields = parse_fields(head, lineno)
        if "group" not in fields or "src" not in fields:
            raise CatalogError("need group= and src=", lineno)
        G = parse_group(fields["group"])
        try:
            masses = parse_tex_measure(G, tex)
        except ValueError as exc:
            raise CatalogError(str(exc), lineno) from exc
        support = tuple(sorted(masses, key=G.index))
        notes = [fields["note"]] if "note" in fields else []
        if "set" in fields:
            printed = sorted({G.reduce(g) for g in parse_elements(G, fields["set"])}, key=G.index)
            if tuple(printed) != support:
                notes.append(f"printed set {format_elements(printed)} differs from the support")
                messages.append(f"line {lineno}: printed set differs from the support {format_elements(support)}")
        expect = fields.get("expect") == "fail"
        measure = CatalogMeasure(tuple(masses[p] for p in support), (fields["src"],), expect, "")
        entry = CatalogEntry(G, support, [measure], None, lineno)
        verdict = exact_extremality_check(entry.measure())
        if not verdict.extreme:
            notes.append(f"not extreme: coefficient at {format_elements([verdict.witness])} is nonzero")
            messages.append(f"line {lineno}: {verdict.describe()}")
            expect = True
        rep = canonical_form(G, support).representative
        entry.measures = [CatalogMeasure(measure.turns, measure.provenance, expect, "; ".join(notes))]
        entry.class_rep = rep if tuple(rep) != support else None
        entries.append(entry)
    merged = merge_entries(entries)
    merged.sort(key=sort_key)
    return merged, messages
