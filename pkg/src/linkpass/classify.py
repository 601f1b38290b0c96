"""Invariant profiles and equivalence deciders.

A bottom tangle's profile collects a2(i), a2(ij), mu(ij), mu(ijk),
mu(jiij) and phi(ij) = 4 mu(jiij) + mu(ij) mod 8.  Tangle equivalence under
the four relations is a pure tuple comparison; link equivalence (about the
closures of the inputs) additionally asks whether an integer congruence
system in unknowns x_{ab} (a != b) is solvable.  The solver runs Smith
reduction with modular rows absorbed into slack variables, and re-verifies
every witness before reporting it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Mapping, NamedTuple, Optional

from .codec import Diagram, DiagramError, DiagramKind
from . import magnus, polyengine, tangle_ops


class EquivalenceRelation(str, Enum):
    CLASP_PASS = "clasp-pass"
    BAND_PASS = "band-pass"
    BAND_SHARP = "band-sharp"
    BAND_PSHARP = "band-psharp"


@dataclass(frozen=True)
class InvariantProfile:
    """The full invariant tuple of an n-component bottom tangle.

    Dict keys are 1-based component indices: ``a2_i[i]``, ``a2_ij[(i, j)]``
    and friends with i < j (< k).  ``phi_ij`` is stored as a residue in
    0..7 and always equals ``(4 * mu_jiij + mu_ij) % 8``.
    """

    n: int
    a2_i: Mapping[int, int]
    a2_ij: Mapping[tuple[int, int], int]
    mu_ij: Mapping[tuple[int, int], int]
    mu_ijk: Mapping[tuple[int, int, int], int]
    mu_jiij: Mapping[tuple[int, int], int]
    phi_ij: Mapping[tuple[int, int], int]

    def lk(self, a: int, b: int) -> int:
        """Symmetric linking-number lookup."""
        return self.mu_ij[(a, b) if a < b else (b, a)]


class Precondition(NamedTuple):
    description: str
    holds: bool


class CongruenceRow(NamedTuple):
    coeffs: tuple[int, ...]
    rhs: int
    modulus: int  # 0 means an exact equation over the integers


@dataclass(frozen=True)
class CongruenceSystem:
    variables: tuple[str, ...]
    rows: tuple[CongruenceRow, ...]

    def __post_init__(self):
        for row in self.rows:
            if len(row.coeffs) != len(self.variables):
                raise ValueError("row length does not match variable count")

    def satisfied_by(self, assignment: Mapping[str, int]) -> bool:
        for row in self.rows:
            total = sum(c * assignment.get(v, 0) for c, v in zip(row.coeffs, self.variables))
            residue = total - row.rhs
            if row.modulus:
                if residue % row.modulus != 0:
                    return False
            elif residue != 0:
                return False
        return True


@dataclass(frozen=True)
class Verdict:
    equivalent: bool
    relation: EquivalenceRelation
    failed_precondition: Optional[str] = None
    witness: Optional[dict[str, int]] = None
    preconditions: tuple[Precondition, ...] = ()
    system: Optional[CongruenceSystem] = None


# ---------------------------------------------------------------------------
# profiles


@lru_cache(maxsize=None)
def profile(d: Diagram, degree: int = 4) -> InvariantProfile:
    """Compute the full invariant profile of a bottom tangle.

    Results are cached: diagrams are immutable values, so recomputation for
    the same code is pure waste.  ``degree`` is the series truncation used
    for the Milnor numbers and must be at least 4 for mu(jiij).
    """
    if d.kind is not DiagramKind.TANGLE:
        raise DiagramError("profiles are computed for bottom tangles")
    if degree < 4:
        raise ValueError("degree must be at least 4 to reach mu(jiij)")
    n = d.n
    reduced = tangle_ops._reduce_diagram(d)

    a2_i = {i: polyengine.a2_i(reduced, i) for i in range(1, n + 1)}
    a2_ij = {
        (i, j): polyengine.a2_ij(reduced, i, j)
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
    }
    mu_ij = {}
    mu_jiij = {}
    phi_ij = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            mu_ij[(i, j)] = magnus.milnor(reduced, (i, j), degree)
            mu_jiij[(i, j)] = magnus.milnor(reduced, (j, i, i, j), degree)
            phi_ij[(i, j)] = (4 * mu_jiij[(i, j)] + mu_ij[(i, j)]) % 8
    mu_ijk = {
        (i, j, k): magnus.milnor(reduced, (i, j, k), degree)
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
        for k in range(j + 1, n + 1)
    }
    return InvariantProfile(n, a2_i, a2_ij, mu_ij, mu_ijk, mu_jiij, phi_ij)


# ---------------------------------------------------------------------------
# bottom-tangle deciders: plain invariant comparison


def _pairs(n: int):
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def _triples(n: int):
    return [
        (i, j, k)
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
        for k in range(j + 1, n + 1)
    ]


def decide_tangle(p: InvariantProfile, q: InvariantProfile, relation: EquivalenceRelation) -> Verdict:
    """Decide equivalence of two bottom tangles by comparing their
    classifying invariant tuples for the requested relation."""
    if p.n != q.n:
        raise DiagramError(f"component counts differ: {p.n} vs {q.n}")
    relation = EquivalenceRelation(relation)
    n = p.n

    checks: list[tuple[str, bool]] = []
    if relation is EquivalenceRelation.CLASP_PASS:
        checks = [
            ("a2(i)", all(p.a2_i[i] == q.a2_i[i] for i in range(1, n + 1))),
            ("mu(ij)", all(p.mu_ij[ij] == q.mu_ij[ij] for ij in _pairs(n))),
            ("a2(ij)", all(p.a2_ij[ij] == q.a2_ij[ij] for ij in _pairs(n))),
            ("mu(ijk)", all(p.mu_ijk[t] == q.mu_ijk[t] for t in _triples(n))),
        ]
    elif relation is EquivalenceRelation.BAND_PASS:
        checks = [
            ("a2(i) mod 2", all(p.a2_i[i] % 2 == q.a2_i[i] % 2 for i in range(1, n + 1))),
            ("mu(ij)", all(p.mu_ij[ij] == q.mu_ij[ij] for ij in _pairs(n))),
            ("mu(jiij) mod 2", all(p.mu_jiij[ij] % 2 == q.mu_jiij[ij] % 2 for ij in _pairs(n))),
            ("mu(ijk)", all(p.mu_ijk[t] == q.mu_ijk[t] for t in _triples(n))),
        ]
    elif relation is EquivalenceRelation.BAND_SHARP:
        checks = [
            ("mu(ij) mod 4", all(p.mu_ij[ij] % 4 == q.mu_ij[ij] % 4 for ij in _pairs(n))),
            ("phi(ij) mod 8", all(p.phi_ij[ij] == q.phi_ij[ij] for ij in _pairs(n))),
            ("mu(ijk) mod 2", all(p.mu_ijk[t] % 2 == q.mu_ijk[t] % 2 for t in _triples(n))),
        ]
    elif relation is EquivalenceRelation.BAND_PSHARP:
        checks = [
            ("a2(i) mod 2", all(p.a2_i[i] % 2 == q.a2_i[i] % 2 for i in range(1, n + 1))),
            ("mu(ij)", all(p.mu_ij[ij] == q.mu_ij[ij] for ij in _pairs(n))),
            ("mu(jiij) mod 2", all(p.mu_jiij[ij] % 2 == q.mu_jiij[ij] % 2 for ij in _pairs(n))),
            ("mu(ijk) mod 2", all(p.mu_ijk[t] % 2 == q.mu_ijk[t] % 2 for t in _triples(n))),
        ]

    failed = next((name for name, ok in checks if not ok), None)
    return Verdict(
        equivalent=failed is None,
        relation=relation,
        failed_precondition=failed,
        preconditions=tuple(Precondition(name, ok) for name, ok in checks),
    )


# ---------------------------------------------------------------------------
# link deciders: preconditions plus a congruence system


def variable_order(n: int) -> tuple[str, ...]:
    return tuple(f"x{a}_{b}" for a in range(1, n + 1) for b in range(1, n + 1) if a != b)


def build_link_system(
    p: InvariantProfile, q: InvariantProfile, relation: EquivalenceRelation
) -> tuple[list[Precondition], CongruenceSystem]:
    """Preconditions and congruence rows deciding whether the closures of
    two bottom tangles are equivalent under the requested relation.

    The unknown x_{ab} measures how often the band of component a is pulled
    through component b when re-presenting the same link; pair rows tie
    those counts to the changes in a2(ij) or mu(jiij), triple rows to the
    changes in mu(ijk).
    """
    if p.n != q.n:
        raise DiagramError(f"component counts differ: {p.n} vs {q.n}")
    relation = EquivalenceRelation(relation)
    n = p.n
    variables = variable_order(n)
    index = {}
    pos = 0
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if a != b:
                index[(a, b)] = pos
                pos += 1

    pre: list[Precondition] = []
    if relation is EquivalenceRelation.CLASP_PASS:
        pre.append(
            Precondition("a2(i) equal", all(p.a2_i[i] == q.a2_i[i] for i in range(1, n + 1)))
        )
        pre.append(Precondition("mu(ij) equal", all(p.mu_ij[ij] == q.mu_ij[ij] for ij in _pairs(n))))
    elif relation in (EquivalenceRelation.BAND_PASS, EquivalenceRelation.BAND_PSHARP):
        pre.append(
            Precondition(
                "a2(i) equal mod 2",
                all(p.a2_i[i] % 2 == q.a2_i[i] % 2 for i in range(1, n + 1)),
            )
        )
        pre.append(Precondition("mu(ij) equal", all(p.mu_ij[ij] == q.mu_ij[ij] for ij in _pairs(n))))
    else:
        pre.append(
            Precondition(
                "mu(ij) equal mod 4",
                all(p.mu_ij[ij] % 4 == q.mu_ij[ij] % 4 for ij in _pairs(n)),
            )
        )

    rows: list[CongruenceRow] = []

    def pair_row(i, j, coeff_scale, rhs, modulus):
        coeffs = [0] * len(variables)
        coeffs[index[(i, j)]] += coeff_scale * p.lk(i, j)
        coeffs[index[(j, i)]] += coeff_scale * p.lk(i, j)
        rows.append(CongruenceRow(tuple(coeffs), rhs, modulus))

    def triple_row(i, j, k, modulus):
        coeffs = [0] * len(variables)
        coeffs[index[(k, j)]] += p.lk(i, j)
        coeffs[index[(k, i)]] -= p.lk(i, j)
        coeffs[index[(i, k)]] += p.lk(j, k)
        coeffs[index[(i, j)]] -= p.lk(j, k)
        coeffs[index[(j, i)]] += p.lk(k, i)
        coeffs[index[(j, k)]] -= p.lk(k, i)
        rows.append(CongruenceRow(tuple(coeffs), q.mu_ijk[(i, j, k)] - p.mu_ijk[(i, j, k)], modulus))

    for i, j in _pairs(n):
        if relation is EquivalenceRelation.CLASP_PASS:
            pair_row(i, j, 1, q.a2_ij[(i, j)] - p.a2_ij[(i, j)], 2)
        elif relation is EquivalenceRelation.BAND_PASS:
            pair_row(i, j, 1, q.mu_jiij[(i, j)] - p.mu_jiij[(i, j)], 2)
        elif relation is EquivalenceRelation.BAND_SHARP:
            rhs = 4 * (q.mu_jiij[(i, j)] - p.mu_jiij[(i, j)]) + q.mu_ij[(i, j)] - p.mu_ij[(i, j)]
            pair_row(i, j, 4, rhs, 8)
        else:
            pair_row(i, j, 1, q.mu_jiij[(i, j)] - p.mu_jiij[(i, j)], 2)

    for i, j, k in _triples(n):
        if relation in (EquivalenceRelation.CLASP_PASS, EquivalenceRelation.BAND_PASS):
            triple_row(i, j, k, 0)
        else:
            triple_row(i, j, k, 2)

    return pre, CongruenceSystem(variables, tuple(rows))


# ---------------------------------------------------------------------------
# integer congruence solver


def _smith_solve(matrix: list[list[int]], rhs: list[int]) -> Optional[list[int]]:
    """Solve A x = b over the integers, or return None.

    Diagonalizes A by unimodular row/column operations (row ops mirrored on
    b, column ops accumulated into the back-substitution matrix) and checks
    divisibility of the transformed right-hand side.
    """
    m = len(matrix)
    ncols = len(matrix[0]) if m else 0
    a = [row[:] for row in matrix]
    b = rhs[:]
    # v accumulates column operations: x = v @ z
    v = [[1 if r == c else 0 for c in range(ncols)] for r in range(ncols)]

    def swap_rows(r1, r2):
        a[r1], a[r2] = a[r2], a[r1]
        b[r1], b[r2] = b[r2], b[r1]

    def add_row(dst, src, factor):
        a[dst] = [x + factor * y for x, y in zip(a[dst], a[src])]
        b[dst] += factor * b[src]

    def swap_cols(c1, c2):
        for row in a:
            row[c1], row[c2] = row[c2], row[c1]
        for row in v:
            row[c1], row[c2] = row[c2], row[c1]

    def add_col(dst, src, factor):
        for row in a:
            row[dst] += factor * row[src]
        for row in v:
            row[dst] += factor * row[src]

    t = 0
    size = min(m, ncols)
    while t < size:
        # find the smallest nonzero entry in the remaining block
        best = None
        for r in range(t, m):
            for c in range(t, ncols):
                if a[r][c] != 0 and (best is None or abs(a[r][c]) < abs(a[best[0]][best[1]])):
                    best = (r, c)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            for r in range(t + 1, m):
                if a[r][t] != 0:
                    add_row(r, t, -(a[r][t] // a[t][t]))
                    if a[r][t] != 0:
                        swap_rows(t, r)
                        done = False
            for c in range(t + 1, ncols):
                if a[t][c] != 0:
                    add_col(c, t, -(a[t][c] // a[t][t]))
                    if a[t][c] != 0:
                        swap_cols(t, c)
                        done = False
            if done:
                break
        t += 1

    rank = t
    for r in range(rank, m):
        if b[r] != 0:
            return None
    z = [0] * ncols
    for r in range(rank):
        if b[r] % a[r][r] != 0:
            return None
        z[r] = b[r] // a[r][r]
    return [sum(v[r][c] * z[c] for c in range(ncols)) for r in range(ncols)]


def solve_congruence(system: CongruenceSystem) -> tuple[bool, Optional[dict[str, int]]]:
    """Decide solvability of a mixed exact/modular integer system.

    Each modular row gains a slack variable carrying its modulus, the
    resulting exact system goes through Smith reduction, and any witness is
    re-verified row by row before being returned.
    """
    nvars = len(system.variables)
    slack_count = sum(1 for row in system.rows if row.modulus)
    matrix: list[list[int]] = []
    rhs: list[int] = []
    slack_seen = 0
    for row in system.rows:
        line = list(row.coeffs) + [0] * slack_count
        if row.modulus:
            line[nvars + slack_seen] = row.modulus
            slack_seen += 1
        matrix.append(line)
        rhs.append(row.rhs)

    if not matrix:
        return True, {name: 0 for name in system.variables}
    solution = _smith_solve(matrix, rhs)
    if solution is None:
        return False, None
    witness = {name: solution[k] for k, name in enumerate(system.variables)}
    if not system.satisfied_by(witness):
        raise AssertionError("solver returned a witness that fails verification")
    return True, witness


# ---------------------------------------------------------------------------
# link deciders


def decide_link(
    sigma: Diagram, sigma2: Diagram, relation: EquivalenceRelation, degree: int = 4
) -> Verdict:
    """Decide whether the closures of two bottom tangles are equivalent
    under the requested relation."""
    relation = EquivalenceRelation(relation)
    if sigma.n != sigma2.n:
        raise DiagramError(f"component counts differ: {sigma.n} vs {sigma2.n}")
    p = profile(sigma, degree)
    q = profile(sigma2, degree)
    pre, system = build_link_system(p, q, relation)
    failed = next((c.description for c in pre if not c.holds), None)
    if failed is not None:
        return Verdict(False, relation, failed, None, tuple(pre), system)
    solvable, witness = solve_congruence(system)
    return Verdict(solvable, relation, None, witness, tuple(pre), system)


def decide_link_z2split(sigma: Diagram, sigma2: Diagram, degree: int = 4) -> Verdict:
    """Band-# decision for Z2-algebraically split inputs (all linking
    numbers even): a direct profile comparison mod (4, 8, 2), no solver."""
    p = profile(sigma, degree)
    q = profile(sigma2, degree)
    if p.n != q.n:
        raise DiagramError(f"component counts differ: {p.n} vs {q.n}")
    for prof, name in ((p, "first"), (q, "second")):
        for ij, value in prof.mu_ij.items():
            if value % 2 != 0:
                raise DiagramError(
                    f"{name} input has odd linking number mu{ij} = {value};"
                    " the fast path needs Z2-algebraically split links"
                )
    checks = [
        Precondition("mu(ij) mod 4", all(p.mu_ij[ij] % 4 == q.mu_ij[ij] % 4 for ij in _pairs(p.n))),
        Precondition("phi(ij) mod 8", all(p.phi_ij[ij] == q.phi_ij[ij] for ij in _pairs(p.n))),
        Precondition(
            "mu(ijk) mod 2", all(p.mu_ijk[t] % 2 == q.mu_ijk[t] % 2 for t in _triples(p.n))
        ),
    ]
    failed = next((c.description for c in checks if not c.holds), None)
    return Verdict(
        equivalent=failed is None,
        relation=EquivalenceRelation.BAND_SHARP,
        failed_precondition=failed,
        preconditions=tuple(checks),
    )
