"""Diagram data model and the ``.btt`` text codec.

A diagram is a signed Gauss code: a set of crossings ``id -> sign`` together
with one passage sequence per component, each passage naming a crossing and
whether the component goes over or under it.  Bottom tangles have open
sequences (component i runs between its two boundary points); links have
cyclic ones.  Everything downstream consumes only this combinatorial data.

File format (UTF-8, line oriented, ``#`` starts a comment)::

    btt 1
    kind tangle          # or: kind link
    n 2
    crossings 1:+ 2:-
    comp 1: O1 U2
    comp 2: U1 O2

Empty passage lists may be omitted; ``serialize`` omits them, which makes the
crossing-free one-component tangle a four-line file.

Sign convention: ``+1`` is the right-handed crossing, i.e. the under-strand
runs right to left when sighted along the over-strand's orientation.  The
convention is pinned by the positive Hopf link having linking number +1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple


class CodecError(ValueError):
    """Base class for codec failures."""


class ParseError(CodecError):
    """Raised on malformed ``.btt`` input; carries line and column."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, col {column}: {message}")
        self.line = line
        self.column = column


class DiagramError(CodecError):
    """Raised when an operation is applied to an unsuitable diagram."""


class DiagramKind(str, Enum):
    TANGLE = "tangle"
    LINK = "link"


class Role(str, Enum):
    OVER = "O"
    UNDER = "U"


class Passage(NamedTuple):
    crossing: int
    role: Role


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


class Issue(NamedTuple):
    severity: Severity
    message: str
    location: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple[Issue, ...]

    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity is Severity.ERROR]


@dataclass(frozen=True)
class Diagram:
    """Immutable signed Gauss code of a tangle or link.

    ``crossings`` is kept sorted by id so that structurally equal diagrams
    compare (and hash) equal.  Component indices are 1-based throughout the
    public API.
    """

    kind: DiagramKind
    n: int
    crossings: tuple[tuple[int, int], ...]
    passages: tuple[tuple[Passage, ...], ...]

    def __init__(
        self,
        kind: DiagramKind,
        n: int,
        crossings: Iterable[tuple[int, int]],
        passages: Iterable[Iterable[Passage]],
    ):
        object.__setattr__(self, "kind", DiagramKind(kind))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(
            self, "crossings", tuple(sorted((int(c), int(s)) for c, s in crossings))
        )
        object.__setattr__(
            self,
            "passages",
            tuple(tuple(Passage(int(c), Role(r)) for c, r in comp) for comp in passages),
        )

    @cached_property
    def sign_by_id(self) -> Mapping[int, int]:
        return {c: s for c, s in self.crossings}

    def sign(self, crossing_id: int) -> int:
        return self.sign_by_id[crossing_id]

    def component(self, i: int) -> tuple[Passage, ...]:
        """Passage list of component ``i`` (1-based)."""
        if not 1 <= i <= self.n:
            raise DiagramError(f"component index {i} out of range 1..{self.n}")
        return self.passages[i - 1]

    @cached_property
    def component_of(self) -> Mapping[tuple[int, Role], int]:
        """Maps (crossing id, role) to the component carrying that passage."""
        out: dict[tuple[int, Role], int] = {}
        for ci, comp in enumerate(self.passages, start=1):
            for p in comp:
                out[(p.crossing, p.role)] = ci
        return out


# ---------------------------------------------------------------------------
# validation


def validate(d: Diagram) -> ValidationReport:
    """Check the Gauss-code invariants; never raises, never mutates."""
    issues: list[Issue] = []

    if d.n < 1:
        issues.append(Issue(Severity.ERROR, f"component count {d.n} must be positive", "header"))
    if len(d.passages) != d.n:
        issues.append(
            Issue(
                Severity.ERROR,
                f"{len(d.passages)} passage lists for n={d.n} components",
                "header",
            )
        )

    declared: dict[int, int] = {}
    for cid, sign in d.crossings:
        if cid in declared:
            issues.append(Issue(Severity.ERROR, f"crossing {cid} declared twice", "crossings"))
        if sign not in (1, -1):
            issues.append(
                Issue(Severity.ERROR, f"crossing {cid} has sign {sign}, expected +1 or -1", "crossings")
            )
        declared[cid] = sign

    seen: dict[int, list[tuple[int, Role]]] = {}
    for ci, comp in enumerate(d.passages, start=1):
        for p in comp:
            if p.crossing not in declared:
                issues.append(
                    Issue(
                        Severity.ERROR,
                        f"crossing {p.crossing} used but not declared",
                        f"comp {ci}",
                    )
                )
            seen.setdefault(p.crossing, []).append((ci, p.role))

    for cid, uses in sorted(seen.items()):
        roles = sorted(r.value for _, r in uses)
        if len(uses) != 2 or roles != ["O", "U"]:
            where = ", ".join(f"comp {ci}:{r.value}" for ci, r in uses)
            issues.append(
                Issue(
                    Severity.ERROR,
                    f"crossing {cid} must occur exactly once over and once under, got [{where}]",
                    f"crossing {cid}",
                )
            )
    for cid in sorted(set(declared) - set(seen)):
        issues.append(Issue(Severity.WARNING, f"crossing {cid} declared but unused", "crossings"))

    ok = not any(i.severity is Severity.ERROR for i in issues)
    return ValidationReport(ok=ok, issues=tuple(issues))


def _require_valid(d: Diagram) -> None:
    report = validate(d)
    if not report.ok:
        first = report.errors()[0]
        raise DiagramError(f"invalid diagram ({first.location}): {first.message}")


# ---------------------------------------------------------------------------
# parsing


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            yield lineno, line


def parse(text: str) -> Diagram:
    """Parse ``.btt`` text into a Diagram.

    Raises ParseError on syntax problems, duplicate crossing declarations,
    unknown crossing ids, or violated pairing invariants.
    """
    header, crossings, comps, _ = _parse_common(text, ("tangle", "link"), "n")
    kind = DiagramKind(header)
    n = comps["count"]
    passages = [comps["lists"].get(i, []) for i in range(1, n + 1)]
    d = Diagram(kind, n, crossings, passages)
    report = validate(d)
    if not report.ok:
        first = report.errors()[0]
        raise ParseError(f"{first.message} ({first.location})", comps["last_line"])
    return d


def _parse_common(text: str, kinds: tuple[str, ...], count_key: str):
    """Shared parser for diagram and template files.

    Returns (kind string, crossing list, component info dict, count label).
    """
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty file", 1)
    pos = 0

    def expect(prefix: str) -> tuple[int, str]:
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(f"unexpected end of file, expected '{prefix}'", lines[-1][0] + 1)
        lineno, line = lines[pos]
        pos += 1
        return lineno, line

    lineno, line = expect("btt")
    if line.split() != ["btt", "1"]:
        raise ParseError("expected header 'btt 1'", lineno)

    lineno, line = expect("kind")
    parts = line.split()
    if len(parts) != 2 or parts[0] != "kind" or parts[1] not in kinds:
        raise ParseError(f"expected 'kind <{ '|'.join(kinds) }>'", lineno)
    kind = parts[1]

    lineno, line = expect(count_key)
    parts = line.split()
    if len(parts) != 2 or parts[0] != count_key or not parts[1].lstrip("-").isdigit():
        raise ParseError(f"expected '{count_key} <integer>'", lineno)
    count = int(parts[1])
    if count < 1:
        raise ParseError(f"{count_key} must be positive, got {count}", lineno)

    lineno, line = expect("crossings")
    parts = line.split()
    if parts[0] != "crossings":
        raise ParseError("expected 'crossings ...'", lineno)
    crossings: list[tuple[int, int]] = []
    declared: set[int] = set()
    col = len("crossings") + 1
    for tok in parts[1:]:
        col = line.index(tok, col - 1) + 1
        if ":" not in tok:
            raise ParseError(f"bad crossing token '{tok}', expected '<id>:<+|->'", lineno, col)
        ident, _, sgn = tok.partition(":")
        if not ident.isdigit() or int(ident) < 1 or sgn not in ("+", "-"):
            raise ParseError(f"bad crossing token '{tok}', expected '<id>:<+|->'", lineno, col)
        cid = int(ident)
        if cid in declared:
            raise ParseError(f"crossing {cid} declared twice", lineno, col)
        declared.add(cid)
        crossings.append((cid, 1 if sgn == "+" else -1))

    lists: dict[int, list[Passage]] = {}
    last_line = lineno
    while pos < len(lines):
        lineno, line = expect("comp")
        last_line = lineno
        parts = line.split()
        if parts[0] != "comp" or len(parts) < 2 or not parts[1].rstrip(":").isdigit():
            raise ParseError("expected 'comp <i>: <tok> ...'", lineno)
        head = parts[1]
        if head.endswith(":"):
            idx_s, toks = head[:-1], parts[2:]
        elif len(parts) >= 3 and parts[2] == ":":
            idx_s, toks = parts[1], parts[3:]
        else:
            raise ParseError("missing ':' after component index", lineno)
        idx = int(idx_s)
        if not 1 <= idx <= count:
            raise ParseError(f"component index {idx} out of range 1..{count}", lineno)
        if idx in lists:
            raise ParseError(f"component {idx} given twice", lineno)
        plist: list[Passage] = []
        col = 1
        for tok in toks:
            col = line.index(tok, col - 1) + 1
            if len(tok) < 2 or tok[0] not in ("O", "U") or not tok[1:].isdigit():
                raise ParseError(f"bad passage token '{tok}', expected 'O<id>' or 'U<id>'", lineno, col)
            cid = int(tok[1:])
            if cid not in declared:
                raise ParseError(f"unknown crossing id {cid} in passage", lineno, col)
            plist.append(Passage(cid, Role(tok[0])))
        lists[idx] = plist

    return kind, crossings, {"count": count, "lists": lists, "last_line": last_line}, count_key


# ---------------------------------------------------------------------------
# serialization


def serialize(d: Diagram) -> str:
    """Canonical ``.btt`` text: components in index order, ids as written.

    ``parse(serialize(d)) == d`` for every valid diagram; invalid diagrams
    are rejected.
    """
    _require_valid(d)
    lines = [
        "btt 1",
        f"kind {d.kind.value}",
        f"n {d.n}",
        _crossings_line(d.crossings),
    ]
    for i, comp in enumerate(d.passages, start=1):
        if comp:
            lines.append(f"comp {i}: " + " ".join(f"{p.role.value}{p.crossing}" for p in comp))
    return "\n".join(lines) + "\n"


def _crossings_line(crossings: tuple[tuple[int, int], ...]) -> str:
    if not crossings:
        return "crossings"
    return "crossings " + " ".join(f"{c}:{'+' if s > 0 else '-'}" for c, s in crossings)


# ---------------------------------------------------------------------------
# elementary numerical readings of the code


def self_writhe(d: Diagram, i: int) -> int:
    """Sum of signs of crossings both of whose passages lie on component i."""
    _require_valid(d)
    comp = d.component(i)
    counts: dict[int, int] = {}
    for p in comp:
        counts[p.crossing] = counts.get(p.crossing, 0) + 1
    return sum(d.sign(c) for c, k in counts.items() if k == 2)


def linking_number(d: Diagram, i: int, j: int) -> int:
    """Linking number of components i and j.

    For a bottom tangle this is the sum of signs of crossings where i passes
    over j; for a link it is half the signed count of all crossings between
    the two components (an odd sum signals a broken code).
    """
    _require_valid(d)
    if i == j:
        raise DiagramError("linking number needs two distinct components")
    ci, cj = d.component(i), d.component(j)
    ids_i = {p.crossing: p.role for p in ci}
    ids_j = {p.crossing: p.role for p in cj}
    shared = set(ids_i) & set(ids_j)
    if d.kind is DiagramKind.TANGLE:
        return sum(d.sign(c) for c in shared if ids_i[c] is Role.OVER)
    total = sum(d.sign(c) for c in shared)
    if total % 2 != 0:
        raise DiagramError(
            f"inter-component crossing signs between {i} and {j} sum to odd value {total}"
        )
    return total // 2
