"""Truncated noncommutative series and Milnor invariants of bottom tangles.

Arc generators of the Wirtinger presentation are rewritten in the meridians
by sweeping the conjugation relations to a fixed point in series arithmetic;
the coefficient of X_{i1}...X_{ik-1} in the expansion of the preferred k-th
longitude is the Milnor number mu(i1 ... ik-1 ik).
"""

from __future__ import annotations

from functools import lru_cache
from typing import Mapping, Sequence

from .codec import Diagram, DiagramError, DiagramKind, Role, self_writhe
from .polyengine import WirtingerPresentation, wirtinger
from . import tangle_ops

Monomial = tuple[int, ...]


class TruncatedSeries:
    """Integer power series in noncommuting generators X_1, X_2, ...,
    truncated above a fixed total degree.  Monomials are tuples of
    generator indices; the empty tuple is the constant term."""

    __slots__ = ("degree", "_terms")

    def __init__(self, degree: int, terms: Mapping[Monomial, int] | None = None):
        if degree < 1:
            raise ValueError("degree bound must be positive")
        self.degree = degree
        self._terms = {
            tuple(m): int(c)
            for m, c in (terms or {}).items()
            if c != 0 and len(m) <= degree
        }

    @property
    def terms(self) -> dict[Monomial, int]:
        return dict(self._terms)

    @property
    def constant(self) -> int:
        return self._terms.get((), 0)

    def coefficient(self, monomial: Sequence[int]) -> int:
        return self._terms.get(tuple(monomial), 0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.degree == other.degree and self._terms == other._terms

    def __hash__(self):
        return hash((self.degree, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        return f"TruncatedSeries(degree={self.degree}, terms={self._terms!r})"


def one_series(degree: int) -> TruncatedSeries:
    return TruncatedSeries(degree, {(): 1})


def meridian_series(i: int, degree: int) -> TruncatedSeries:
    """Expansion of the i-th meridian generator: 1 + X_i."""
    if i < 1:
        raise ValueError("generator index must be positive")
    return TruncatedSeries(degree, {(): 1, (i,): 1})


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    if a.degree != b.degree:
        raise ValueError(f"degree bounds differ: {a.degree} vs {b.degree}")
    bound = a.degree
    out: dict[Monomial, int] = {}
    b_by_len: dict[int, list[tuple[Monomial, int]]] = {}
    for m, c in b._terms.items():
        b_by_len.setdefault(len(m), []).append((m, c))
    for m1, c1 in a._terms.items():
        room = bound - len(m1)
        for length, entries in b_by_len.items():
            if length > room:
                continue
            for m2, c2 in entries:
                m = m1 + m2
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                elif m in out:
                    del out[m]
    return TruncatedSeries(bound, out)


def series_inv(a: TruncatedSeries) -> TruncatedSeries:
    """Truncated geometric-series inverse; the constant term must be 1."""
    if a.constant != 1:
        raise ValueError(f"can only invert series with constant term 1, got {a.constant}")
    bound = a.degree
    p = TruncatedSeries(bound, {m: -c for m, c in a._terms.items() if m != ()})
    inv = one_series(bound)
    for _ in range(bound):
        inv = series_mul(p, inv)
        inv = TruncatedSeries(bound, {**inv._terms, (): inv.constant + 1})
    return inv


def series_pow(a: TruncatedSeries, exponent: int) -> TruncatedSeries:
    if exponent < 0:
        return series_pow(series_inv(a), -exponent)
    out = one_series(a.degree)
    for _ in range(exponent):
        out = series_mul(out, a)
    return out


# ---------------------------------------------------------------------------
# fixed-point rewriting of arcs in the meridians


def arc_series(w: WirtingerPresentation, degree: int) -> dict[int, TruncatedSeries]:
    """Express every arc generator in the meridians, truncated at ``degree``.

    Arcs start at their component's meridian series and the conjugation
    relations are swept Gauss-Seidel style in traversal order.  Each sweep
    extends the degree up to which all arcs are exact, so the iteration is
    stable after at most degree+1 sweeps; instability past that signals a
    malformed code (open components are required: the first arc of each
    component is a genuine meridian and is never rewritten).
    """
    series: dict[int, TruncatedSeries] = {}
    for arc in w.arcs:
        series[arc.index] = meridian_series(arc.component, degree)

    inv_cache: dict[int, tuple[TruncatedSeries, TruncatedSeries]] = {}

    def inverse_of(arc_idx: int) -> TruncatedSeries:
        cur = series[arc_idx]
        hit = inv_cache.get(arc_idx)
        if hit is not None and hit[0] is cur:
            return hit[1]
        inv = series_inv(cur)
        inv_cache[arc_idx] = (cur, inv)
        return inv

    stable = False
    for _ in range(degree + 1):
        changed = False
        for rel in w.relations:
            over = series[rel.over]
            if rel.sign > 0:
                new = series_mul(series_mul(over, series[rel.under_in]), inverse_of(rel.over))
            else:
                new = series_mul(series_mul(inverse_of(rel.over), series[rel.under_in]), over)
            if new != series[rel.under_out]:
                series[rel.under_out] = new
                changed = True
        if not changed:
            stable = True
            break
    if not stable:
        raise DiagramError(f"arc rewriting did not stabilize within {degree + 1} sweeps")
    return series


@lru_cache(maxsize=128)
def _longitude_data(d: Diagram, degree: int):
    w = wirtinger(d)
    series = arc_series(w, degree)
    by_crossing = {rel.crossing: rel for rel in w.relations}
    return w, series, by_crossing


def longitude_series(d: Diagram, i: int, degree: int) -> TruncatedSeries:
    """Magnus expansion of the preferred longitude of component i.

    Walking component i, each under passage at a crossing of sign eps below
    over-arc a contributes a factor (series of a)**eps; a final factor
    m_i**(-self_writhe) kills the framing so the result is group-like with
    no pure X_i linear term.
    """
    if d.kind is not DiagramKind.TANGLE:
        raise DiagramError("longitudes are computed for bottom tangles")
    _, series, by_crossing = _longitude_data(d, degree)
    out = one_series(degree)
    for p in d.component(i):
        if p.role is Role.UNDER:
            rel = by_crossing[p.crossing]
            factor = series[rel.over] if rel.sign > 0 else series_inv(series[rel.over])
            out = series_mul(out, factor)
    out = series_mul(out, series_pow(meridian_series(i, degree), -self_writhe(d, i)))
    return out


def milnor(d: Diagram, index: Sequence[int], degree: int = 4) -> int:
    """Milnor invariant mu(I) of a bottom tangle, 2 <= len(I) <= degree.

    The last entry of I names the longitude component; the result is the
    integer coefficient of X_{I[0]}...X_{I[-2]} in its expansion.
    """
    idx = tuple(int(v) for v in index)
    if len(idx) < 2:
        raise ValueError("Milnor index sequences have length at least 2")
    if len(idx) > degree:
        raise ValueError(f"index length {len(idx)} exceeds degree bound {degree}")
    for v in idx:
        if not 1 <= v <= d.n:
            raise DiagramError(f"component index {v} out of range 1..{d.n}")
    reduced = tangle_ops._reduce_diagram(d)
    longitude = longitude_series(reduced, idx[-1], degree)
    return longitude.coefficient(idx[:-1])
