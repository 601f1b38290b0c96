"""Exact polynomial engines: Alexander/Conway invariants of knot codes.

Two independent routes to the degree-2 Conway coefficient a2 are kept
deliberately separate:

* ``alexander_a2`` runs Fox calculus on the Wirtinger presentation and
  normalizes the resulting Alexander polynomial (polynomial time; the
  production route);
* ``conway_skein`` resolves crossings by the skein relation
  nabla(+) - nabla(-) = z * nabla(0) down to descending diagrams
  (exponential; retained purely as a cross-checking oracle).

They share no code beyond the diagram model.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple

from .codec import Diagram, DiagramError, DiagramKind, Role
from . import tangle_ops


class LaurentPolynomial:
    """Integer Laurent polynomial in one variable; zero coefficients are
    never stored and equality is coefficient-wise."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[int, int] | None = None):
        self._coeffs = {int(e): int(c) for e, c in (coeffs or {}).items() if c != 0}

    @classmethod
    def zero(cls) -> "LaurentPolynomial":
        return cls()

    @classmethod
    def one(cls) -> "LaurentPolynomial":
        return cls({0: 1})

    @classmethod
    def monomial(cls, exponent: int, coefficient: int = 1) -> "LaurentPolynomial":
        return cls({exponent: coefficient})

    @property
    def coefficients(self) -> dict[int, int]:
        return dict(self._coeffs)

    def coefficient(self, exponent: int) -> int:
        return self._coeffs.get(exponent, 0)

    def is_zero(self) -> bool:
        return not self._coeffs

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        out = dict(self._coeffs)
        for e, c in other._coeffs.items():
            out[e] = out.get(e, 0) + c
        return LaurentPolynomial(out)

    def __sub__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return self + (-other)

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial({e: -c for e, c in self._coeffs.items()})

    def __mul__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        out: dict[int, int] = {}
        for e1, c1 in self._coeffs.items():
            for e2, c2 in other._coeffs.items():
                e = e1 + e2
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPolynomial(out)

    def shifted(self, k: int) -> "LaurentPolynomial":
        return LaurentPolynomial({e + k: c for e, c in self._coeffs.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self):
        return hash(frozenset(self._coeffs.items()))

    def __repr__(self) -> str:
        return f"LaurentPolynomial({self._coeffs!r})"

    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for e in sorted(self._coeffs):
            c = self._coeffs[e]
            if e == 0:
                term = str(c)
            else:
                mag = "" if abs(c) == 1 else str(abs(c))
                sign = "-" if c < 0 else ""
                power = "z" if e == 1 else f"z^{e}"
                term = f"{sign}{mag}{power}"
            parts.append(term)
        text = " + ".join(parts).replace("+ -", "- ")
        return text


class Arc(NamedTuple):
    index: int
    component: int
    meridian: bool


class Relation(NamedTuple):
    """Conjugation relation at one crossing: out = over^sign . in . over^-sign."""

    crossing: int
    sign: int
    over: int
    under_in: int
    under_out: int


@dataclass(frozen=True, eq=False)
class WirtingerPresentation:
    """Arc generators and crossing relations read off a diagram.

    ``arc_at[(component, position)]`` gives the arc carrying the passage at
    that position, which is what longitude walks and Fox rows consume.
    Relations are listed in traversal order (components by index, under
    passages along each), the order in which fixed-point sweeps converge.
    """

    arcs: tuple[Arc, ...]
    relations: tuple[Relation, ...]
    arc_at: Mapping[tuple[int, int], int]

    def meridian_of(self, component: int) -> int:
        for arc in self.arcs:
            if arc.component == component and arc.meridian:
                return arc.index
        raise DiagramError(f"no meridian arc for component {component}")


def wirtinger(d: Diagram) -> WirtingerPresentation:
    """Build the Wirtinger presentation of a diagram.

    Open components contribute one more arc than they have under passages
    (the first arc is the meridian); cyclic components contribute one arc
    per under passage, or a single closed arc if they have none.
    """
    from .codec import validate

    report = validate(d)
    if not report.ok:
        first = report.errors()[0]
        raise DiagramError(f"invalid diagram ({first.location}): {first.message}")

    cyclic = d.kind is DiagramKind.LINK
    arcs: list[Arc] = []
    arc_at: dict[tuple[int, int], int] = {}
    base: dict[int, int] = {}
    meridian: dict[int, int] = {}
    under_positions: dict[int, list[int]] = {}

    for ci in range(1, d.n + 1):
        comp = d.component(ci)
        unders = [pos for pos, p in enumerate(comp) if p.role is Role.UNDER]
        under_positions[ci] = unders
        k = len(unders)
        base[ci] = len(arcs)
        if not cyclic:
            count = k + 1
            meridian[ci] = base[ci]
        else:
            count = max(k, 1)
            meridian[ci] = base[ci] + (count - 1 if k else 0)
        for a in range(count):
            arcs.append(Arc(len(arcs), ci, False))
        arcs[meridian[ci]] = arcs[meridian[ci]]._replace(meridian=True)

        for pos in range(len(comp)):
            before = sum(1 for u in unders if u < pos)
            if not cyclic:
                arc_at[(ci, pos)] = base[ci] + before
            elif k == 0:
                arc_at[(ci, pos)] = base[ci]
            else:
                # cyclic: arc r starts right after the r-th under passage
                arc_at[(ci, pos)] = base[ci] + (before - 1) % k
        # the under passage itself is labelled with its outgoing arc;
        # fix it up so arc_at reports the strand present at that position
        for r, u in enumerate(under_positions[ci]):
            if not cyclic:
                arc_at[(ci, u)] = base[ci] + r + 1
            else:
                arc_at[(ci, u)] = base[ci] + r

    over_at: dict[int, tuple[int, int]] = {}
    for ci in range(1, d.n + 1):
        for pos, p in enumerate(d.component(ci)):
            if p.role is Role.OVER:
                over_at[p.crossing] = (ci, pos)

    relations: list[Relation] = []
    for ci in range(1, d.n + 1):
        unders = under_positions[ci]
        k = len(unders)
        for r, u in enumerate(unders):
            cid = d.component(ci)[u].crossing
            if not cyclic:
                a_in = base[ci] + r
                a_out = base[ci] + r + 1
            else:
                a_in = base[ci] + (r - 1) % k
                a_out = base[ci] + r
            oc, opos = over_at[cid]
            relations.append(Relation(cid, d.sign(cid), arc_at[(oc, opos)], a_in, a_out))

    return WirtingerPresentation(tuple(arcs), tuple(relations), arc_at)


# ---------------------------------------------------------------------------
# Alexander polynomial by Fox calculus


def _bareiss_det(m: list[list[int]]) -> int:
    """Fraction-free determinant of an integer matrix."""
    n = len(m)
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _interpolate_integer_poly(points: list[int], values: list[int]) -> list[int]:
    """Coefficients (ascending) of the unique degree < len(points) integer
    polynomial through the given points; exact via rationals."""
    n = len(points)
    coeffs = [Fraction(v) for v in values]
    # Newton divided differences
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            coeffs[i] = (coeffs[i] - coeffs[i - 1]) / (points[i] - points[i - level])
    # expand Newton form
    poly = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # poly = poly * (x - points[i]) + coeffs[i]
        shifted = [Fraction(0)] + poly[:-1]
        poly = [s - poly[k] * points[i] for k, s in enumerate(shifted)]
        poly[0] += coeffs[i]
    out = []
    for c in poly:
        if c.denominator != 1:
            raise DiagramError("Alexander determinant interpolation is not integral")
        out.append(int(c))
    return out


def alexander_polynomial(k: Diagram) -> LaurentPolynomial:
    """Symmetric normalized Alexander polynomial of a knot diagram:
    Delta(t) = Delta(1/t) and Delta(1) = 1."""
    if k.kind is not DiagramKind.LINK or k.n != 1:
        raise DiagramError("alexander_polynomial expects a one-component link")
    k = tangle_ops._reduce_diagram(k)
    w = wirtinger(k)
    m = len(w.relations)
    if m == 0:
        return LaurentPolynomial.one()
    if len(w.arcs) != m:
        raise DiagramError("knot code arc/relation count mismatch")

    meridian = w.meridian_of(1)
    columns = [a.index for a in w.arcs if a.index != meridian]
    col_pos = {arc: idx for idx, arc in enumerate(columns)}
    rows = w.relations[:-1]
    size = len(columns)

    def matrix_at(t: int) -> list[list[int]]:
        mat = [[0] * size for _ in range(size)]
        for r, rel in enumerate(rows):
            if rel.sign > 0:
                triples = ((rel.over, 1 - t), (rel.under_in, t), (rel.under_out, -1))
            else:
                # row scaled by t to clear inverse powers; a unit, fixed later
                triples = ((rel.over, t - 1), (rel.under_in, 1), (rel.under_out, -t))
            for arc, val in triples:
                if arc in col_pos:
                    mat[r][col_pos[arc]] += val
        return mat

    ts: list[int] = [0]
    v = 1
    while len(ts) < size + 1:
        ts.extend([v, -v])
        v += 1
    ts = ts[: size + 1]
    values = [_bareiss_det(matrix_at(t)) for t in ts]
    poly = _interpolate_integer_poly(ts, values)

    support = [e for e, c in enumerate(poly) if c != 0]
    if not support:
        raise DiagramError("Alexander determinant vanished; not a knot code")
    at_one = sum(poly[e] for e in support)
    if at_one not in (1, -1):
        raise DiagramError(f"Delta(1) = {at_one}, expected +-1; not a knot code")
    lo, hi = support[0], support[-1]
    if (lo + hi) % 2 != 0:
        raise DiagramError("Alexander polynomial support cannot be centred")
    shift = (lo + hi) // 2
    delta = LaurentPolynomial({e - shift: at_one * c for e, c in enumerate(poly) if c != 0})
    mirror = LaurentPolynomial({-e: c for e, c in delta.coefficients.items()})
    if delta != mirror:
        raise DiagramError("normalized Alexander polynomial is not symmetric")
    return delta


def alexander_a2(k: Diagram) -> int:
    """Casson knot invariant: half the second derivative at 1 of the
    symmetric normalized Alexander polynomial."""
    delta = alexander_polynomial(k)
    second = sum(c * e * (e - 1) for e, c in delta.coefficients.items())
    if second % 2 != 0:
        raise DiagramError("Delta''(1) must be even")
    return second // 2


# ---------------------------------------------------------------------------
# Conway polynomial by skein recursion (oracle)


def conway_skein(d: Diagram) -> LaurentPolynomial:
    """Conway polynomial via the skein relation.

    Base points sit at each component's first stored passage and components
    are processed by index.  The first crossing reached on its under passage
    before being seen from above is switched and smoothed; descending
    diagrams evaluate to 1 (knot) or 0 (several components).  Each recursion
    strictly reduces (crossing count, first-bad-position from the end), so
    the recursion terminates.  The memo table is local to the call.
    """
    if d.kind is not DiagramKind.LINK:
        raise DiagramError("conway_skein expects a link")
    from .codec import validate

    report = validate(d)
    if not report.ok:
        first = report.errors()[0]
        raise DiagramError(f"invalid diagram ({first.location}): {first.message}")

    comps0 = tuple(tuple((p.crossing, p.role.value) for p in comp) for comp in d.passages)
    signs0 = dict(d.crossings)
    memo: dict = {}

    def canonical(comps, signs):
        rename: dict[int, int] = {}
        out = []
        for comp in comps:
            row = []
            for cid, role in comp:
                if cid not in rename:
                    rename[cid] = len(rename) + 1
                row.append((rename[cid], role))
            out.append(tuple(row))
        sig = tuple(signs[c] for c in sorted(rename, key=rename.get))
        return tuple(out), sig

    def first_bad(comps):
        seen: set[int] = set()
        for ci, comp in enumerate(comps):
            for pos, (cid, role) in enumerate(comp):
                if cid in seen:
                    continue
                seen.add(cid)
                if role == "U":
                    return ci, pos, cid
        return None

    def locate(comps, cid):
        hits = []
        for ci, comp in enumerate(comps):
            for pos, (c, _) in enumerate(comp):
                if c == cid:
                    hits.append((ci, pos))
        return hits

    def switched(comps, signs, cid):
        new_comps = []
        for comp in comps:
            new_comps.append(
                tuple((c, ("U" if r == "O" else "O") if c == cid else r) for c, r in comp)
            )
        new_signs = dict(signs)
        new_signs[cid] = -new_signs[cid]
        return tuple(new_comps), new_signs

    def smoothed(comps, signs, cid):
        (a, p), (b, q) = locate(comps, cid)
        comps = list(comps)
        if a == b:
            comp = comps[a]
            outer = comp[:p] + comp[q + 1 :]
            inner = comp[p + 1 : q]
            comps[a] = outer
            comps.insert(a + 1, inner)
        else:
            ca, cb = comps[a], comps[b]
            comps[a] = ca[:p] + cb[q + 1 :] + cb[:q] + ca[p + 1 :]
            del comps[b]
        new_signs = dict(signs)
        del new_signs[cid]
        return tuple(comps), new_signs

    def value(comps, signs) -> LaurentPolynomial:
        key = canonical(comps, signs)
        hit = memo.get(key)
        if hit is not None:
            return hit
        bad = first_bad(comps)
        if bad is None:
            result = LaurentPolynomial.one() if len(comps) == 1 else LaurentPolynomial.zero()
        else:
            _, _, cid = bad
            eps = signs[cid]
            v_switch = value(*switched(comps, signs, cid))
            v_smooth = value(*smoothed(comps, signs, cid))
            if eps > 0:
                result = v_switch + v_smooth.shifted(1)
            else:
                result = v_switch - v_smooth.shifted(1)
        memo[key] = result
        return result

    return value(comps0, signs0)


# ---------------------------------------------------------------------------
# bottom-tangle a2 invariants


def a2_i(d: Diagram, i: int) -> int:
    """a2 of the closure of component i alone."""
    return alexander_a2(tangle_ops.component_knot(d, i))


def a2_ij(d: Diagram, i: int, j: int) -> int:
    """a2 of the plat closure of components i < j."""
    return alexander_a2(tangle_ops.plat_closure(d, i, j))
