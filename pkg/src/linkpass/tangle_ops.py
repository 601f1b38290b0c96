"""Operations on diagrams: closures, component surgery, stacking.

All functions are pure and return new Diagram values.  Crossing ids
introduced by splicing are allocated above the largest id already present,
so results are deterministic and serialize reproducibly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .codec import (
    Diagram,
    DiagramError,
    DiagramKind,
    Passage,
    Role,
    _require_valid,
    parse as _parse_diagram,
    _parse_common,
    _crossings_line,
)


@dataclass(frozen=True)
class StrandTemplate:
    """A stackable string link on 2n strands.

    Strand 2i-1 is traversed upward and strand 2i downward, matching how a
    bottom tangle's component i enters and leaves a stacking slot.  Passage
    lists are stored in traversal order, so stacking is plain concatenation.
    """

    strands: tuple[tuple[Passage, ...], ...]
    crossings: tuple[tuple[int, int], ...]

    def __init__(self, strands, crossings):
        object.__setattr__(
            self,
            "strands",
            tuple(tuple(Passage(int(c), Role(r)) for c, r in s) for s in strands),
        )
        object.__setattr__(
            self, "crossings", tuple(sorted((int(c), int(s)) for c, s in crossings))
        )
        if len(self.strands) % 2 != 0:
            raise DiagramError("template strand count must be even")

    @property
    def pair_count(self) -> int:
        return len(self.strands) // 2

    def as_diagram(self) -> Diagram:
        """View the template as a 2n-component tangle, e.g. for validation."""
        return Diagram(DiagramKind.TANGLE, len(self.strands), self.crossings, self.strands)


def validate_template(t: StrandTemplate):
    from .codec import validate

    return validate(t.as_diagram())


# ---------------------------------------------------------------------------
# closures


def close(d: Diagram) -> Diagram:
    """Closure of a bottom tangle: the same code read cyclically.

    The closing arcs are nested and crossing-free, so no crossings are added.
    """
    if d.kind is not DiagramKind.TANGLE:
        raise DiagramError("close expects a bottom tangle")
    _require_valid(d)
    return Diagram(DiagramKind.LINK, d.n, d.crossings, d.passages)


def delete_components(d: Diagram, keep: Iterable[int]) -> tuple[Diagram, dict[int, int]]:
    """Keep only the named components, dropping every crossing they touch
    on a removed component.  Returns the new diagram and the old-to-new
    component index map (kept components stay in increasing order).
    """
    _require_valid(d)
    keep_set = set(keep)
    if not keep_set:
        raise DiagramError("keep set must be nonempty")
    for i in keep_set:
        if not 1 <= i <= d.n:
            raise DiagramError(f"component index {i} out of range 1..{d.n}")

    removed = [i for i in range(1, d.n + 1) if i not in keep_set]
    dead: set[int] = set()
    for i in removed:
        for p in d.component(i):
            dead.add(p.crossing)

    index_map = {old: new for new, old in enumerate(sorted(keep_set), start=1)}
    passages = [
        [p for p in d.component(old) if p.crossing not in dead] for old in sorted(keep_set)
    ]
    crossings = [(c, s) for c, s in d.crossings if c not in dead]
    return Diagram(d.kind, len(keep_set), crossings, passages), index_map


def component_knot(d: Diagram, i: int) -> Diagram:
    """The knot obtained by discarding all components but i and closing."""
    if d.kind is not DiagramKind.TANGLE:
        raise DiagramError("component_knot expects a bottom tangle")
    sub, _ = delete_components(d, {i})
    return close(sub)


def plat_closure(d: Diagram, i: int, j: int) -> Diagram:
    """Join components i and j (i < j) of a bottom tangle into one knot.

    All other components are deleted first, then the passage list of i is
    followed by the passage list of j, read forward, and closed.  In the
    bottom-tangle picture the two joining arcs (end of i to start of j,
    end of j back to start of i) are nested below the diagram and
    crossing-free, and the knot is oriented by component i.
    """
    if d.kind is not DiagramKind.TANGLE:
        raise DiagramError("plat_closure expects a bottom tangle")
    if not i < j:
        raise DiagramError(f"plat closure needs i < j, got i={i}, j={j}")
    sub, _ = delete_components(d, {i, j})
    merged = tuple(sub.passages[0]) + tuple(sub.passages[1])
    return close(Diagram(DiagramKind.TANGLE, 1, sub.crossings, [merged]))


# ---------------------------------------------------------------------------
# splicing


def _fresh_ids(base: Diagram | StrandTemplate, incoming: Sequence[tuple[int, int]]):
    start = max((c for c, _ in base.crossings), default=0)
    return {c: start + k for k, (c, _) in enumerate(sorted(incoming), start=1)}


def connected_sum_insert(d: Diagram, i: int, k: Diagram) -> Diagram:
    """Connected-sum a knot into component i of ``d``.

    The knot's cyclic passage sequence is cut open at its stored start and
    spliced into the initial arc of component i, with fresh crossing ids.
    """
    _require_valid(d)
    _require_valid(k)
    if k.kind is not DiagramKind.LINK or k.n != 1:
        raise DiagramError("connected_sum_insert needs a one-component link (a knot)")
    d.component(i)
    rename = _fresh_ids(d, k.crossings)
    spliced = [Passage(rename[p.crossing], p.role) for p in k.passages[0]]
    passages = [
        tuple(spliced) + tuple(comp) if ci == i else comp
        for ci, comp in enumerate(d.passages, start=1)
    ]
    crossings = list(d.crossings) + [(rename[c], s) for c, s in k.crossings]
    return Diagram(d.kind, d.n, crossings, passages)


def stack(d: Diagram, t: StrandTemplate) -> Diagram:
    """Stack a bottom tangle over a 2n-strand template.

    Component i of the result runs up strand 2i-1 of the template, through
    component i of ``d``, and down strand 2i of the template.
    """
    if d.kind is not DiagramKind.TANGLE:
        raise DiagramError("stack expects a bottom tangle")
    _require_valid(d)
    if t.pair_count != d.n:
        raise DiagramError(
            f"template has {len(t.strands)} strands, need {2 * d.n} for n={d.n}"
        )
    rename = _fresh_ids(d, t.crossings)
    passages = []
    for i in range(1, d.n + 1):
        up = [Passage(rename[p.crossing], p.role) for p in t.strands[2 * i - 2]]
        down = [Passage(rename[p.crossing], p.role) for p in t.strands[2 * i - 1]]
        passages.append(tuple(up) + tuple(d.passages[i - 1]) + tuple(down))
    crossings = list(d.crossings) + [(rename[c], s) for c, s in t.crossings]
    return Diagram(DiagramKind.TANGLE, d.n, crossings, passages)


def compose_templates(t1: StrandTemplate, t2: StrandTemplate) -> StrandTemplate:
    """Template composition such that stack(stack(d, t1), t2) equals
    stack(d, compose_templates(t1, t2)) up to crossing renaming."""
    if len(t1.strands) != len(t2.strands):
        raise DiagramError("templates must have the same strand count")
    rename = _fresh_ids(t1, t2.crossings)
    strands = []
    for s in range(len(t1.strands)):
        renamed = tuple(Passage(rename[p.crossing], p.role) for p in t2.strands[s])
        if s % 2 == 0:
            strands.append(renamed + t1.strands[s])
        else:
            strands.append(t1.strands[s] + renamed)
    crossings = list(t1.crossings) + [(rename[c], s) for c, s in t2.crossings]
    return StrandTemplate(strands, crossings)


def mirror(d: Diagram) -> Diagram:
    """Mirror image: every crossing changes sign and over/under swap."""
    _require_valid(d)
    crossings = [(c, -s) for c, s in d.crossings]
    flip = {Role.OVER: Role.UNDER, Role.UNDER: Role.OVER}
    passages = [[Passage(p.crossing, flip[p.role]) for p in comp] for comp in d.passages]
    return Diagram(d.kind, d.n, crossings, passages)


# ---------------------------------------------------------------------------
# template files


def parse_template(text: str) -> StrandTemplate:
    """Parse a ``kind template`` file (``strands 2n`` header, comp lines)."""
    kind, crossings, comps, _ = _parse_common(text, ("template",), "strands")
    count = comps["count"]
    if count % 2 != 0:
        from .codec import ParseError

        raise ParseError(f"strand count must be even, got {count}", comps["last_line"])
    strands = [comps["lists"].get(i, []) for i in range(1, count + 1)]
    t = StrandTemplate(strands, crossings)
    report = validate_template(t)
    if not report.ok:
        from .codec import ParseError

        first = report.errors()[0]
        raise ParseError(f"{first.message} ({first.location})", comps["last_line"])
    return t


def serialize_template(t: StrandTemplate) -> str:
    report = validate_template(t)
    if not report.ok:
        first = report.errors()[0]
        raise DiagramError(f"invalid template ({first.location}): {first.message}")
    lines = [
        "btt 1",
        "kind template",
        f"strands {len(t.strands)}",
        _crossings_line(t.crossings),
    ]
    for i, strand in enumerate(t.strands, start=1):
        if strand:
            lines.append(f"comp {i}: " + " ".join(f"{p.role.value}{p.crossing}" for p in strand))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# internal diagram reduction
#
# Crossing-count control for the exact engines.  Only two obviously safe
# local moves are applied: removing an isolated kink (both passages of one
# crossing adjacent on a component) and cancelling an adjacent pair of
# crossings where one strand runs over the other twice with opposite signs.
# Both correspond to planar Reidemeister I/II retractions, so every invariant
# computed downstream is unchanged.  This is a private performance device,
# not a general simplifier.


def _reduce_diagram(d: Diagram) -> Diagram:
    cyclic = d.kind is DiagramKind.LINK
    comps = [list(c) for c in d.passages]
    signs = dict(d.crossings)

    def neighbours(comp: list[Passage], pos: int):
        nxt = pos + 1
        if nxt < len(comp):
            return nxt
        return 0 if cyclic and len(comp) > 1 else None

    changed = True
    while changed:
        changed = False
        # kinks: same crossing at adjacent positions of one component
        for comp in comps:
            for pos in range(len(comp)):
                nxt = neighbours(comp, pos)
                if nxt is None:
                    continue
                a, b = comp[pos], comp[nxt]
                if a.crossing == b.crossing:
                    for idx in sorted((pos, nxt), reverse=True):
                        del comp[idx]
                    del signs[a.crossing]
                    changed = True
                    break
            if changed:
                break
        if changed:
            continue

        # adjacent over-over / under-under pair with opposite signs
        occurrences: dict[tuple[int, Role], tuple[int, int]] = {}
        for ci, comp in enumerate(comps):
            for pos, p in enumerate(comp):
                occurrences[(p.crossing, p.role)] = (ci, pos)
        for ci, comp in enumerate(comps):
            for pos in range(len(comp)):
                nxt = neighbours(comp, pos)
                if nxt is None:
                    continue
                a, b = comp[pos], comp[nxt]
                if (
                    a.crossing == b.crossing
                    or a.role is not Role.OVER
                    or b.role is not Role.OVER
                    or signs[a.crossing] != -signs[b.crossing]
                ):
                    continue
                ua = occurrences[(a.crossing, Role.UNDER)]
                ub = occurrences[(b.crossing, Role.UNDER)]
                if ua[0] != ub[0]:
                    continue
                uc = comps[ua[0]]
                if ua[1] == neighbours(uc, ub[1]) or ub[1] == neighbours(uc, ua[1]):
                    kill = {a.crossing, b.crossing}
                    for comp2 in comps:
                        comp2[:] = [p for p in comp2 if p.crossing not in kill]
                    for c in kill:
                        del signs[c]
                    changed = True
                    break
            if changed:
                break

    return Diagram(d.kind, d.n, sorted(signs.items()), comps)
