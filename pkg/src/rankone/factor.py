"""Factor witnesses, odometer factors and topological quotients."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DomainError, InvariantViolation, PreconditionError
from .groups import IntegerLine
from .iso import _check_eps, default_eps
from .maps import ClauseReport, Composite, PointMap, Quotient, quotient_check, telescope
from .params import CFSequence, FiniteSubset, mass_profile, product_block, product_collision, set_product
from .space import Point, at_level


class MassAssumptionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class FactorWitness:
    """Indices 0 = k_0 < k_1 < ... < k_K and sets J_0 = {1_G}, J_1, ..., J_K with J_n inside F_{k_n}.

    ``eps[n]`` is indexed from 0; the fill condition at n uses eps[n] and the
    block condition at n uses eps[n-1].
    """

    k: tuple
    J: tuple
    eps: tuple

    def __init__(self, k, J, eps=None):
        k = tuple(k)
        if len(k) < 2 or k[0] != 0 or any(b <= a for a, b in zip(k, k[1:])):
            raise PreconditionError(f"factor indices must increase strictly from 0: {k}")
        if len(J) != len(k):
            raise PreconditionError("need one J set per index, starting with J_0")
        eps = default_eps(len(k)) if eps is None else _check_eps(eps)
        if len(eps) < len(k):
            raise PreconditionError(f"need {len(k)} eps entries, got {len(eps)}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "J", tuple(J))
        object.__setattr__(self, "eps", tuple(eps[: len(k)]))

    @property
    def steps(self) -> int:
        return len(self.k) - 1

    def bind(self, seqT: CFSequence, seqT2: CFSequence) -> "FactorWitness":
        g = seqT.group
        if seqT2.group != g:
            raise DomainError("both sequences must live in the same group")
        if self.k[-1] > seqT.depth or self.steps > seqT2.depth:
            raise PreconditionError("witness indices exceed the stored prefixes")
        J = [FiniteSubset(g, s) for s in self.J]
        if J[0] != FiniteSubset(g, [g.identity()]):
            raise PreconditionError("J_0 must be {1_G}")
        for n, s in enumerate(J):
            if not s.issubset(seqT.f(self.k[n])):
                raise PreconditionError(f"J_{n} is not inside F_{self.k[n]}")
        return FactorWitness(self.k, J, self.eps)


@dataclass
class FactorRow:
    n: int
    inclusion: bool
    injective: bool
    fill: Fraction
    fill_bound: Fraction
    block: Fraction
    block_bound: Fraction
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.inclusion and self.injective and self.fill < self.fill_bound and self.block < self.block_bound


@dataclass
class FactorReport:
    rows: list
    warnings: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.rows)

    def failures(self) -> list:
        out = []
        for r in self.rows:
            if not r.inclusion:
                out.append((r.n, "inclusion"))
            if not r.injective:
                out.append((r.n, "injective"))
            if not r.fill < r.fill_bound:
                out.append((r.n, "fill"))
            if not r.block < r.block_bound:
                out.append((r.n, "block"))
        return out


def check_factor_witness(seqT: CFSequence, seqT2: CFSequence, w: FactorWitness) -> FactorReport:
    """Evaluate inclusion, injectivity, fill ratio and block defect for n = 1..K."""
    w = w.bind(seqT, seqT2)
    g = seqT.group
    mul = g.mul
    rows = []
    for n in range(1, w.steps + 1):
        Ft, Jn, Fk = seqT2.f(n), w.J[n], seqT.f(w.k[n])
        notes = []
        outside = next(((a, b) for a in Ft for b in Jn if mul(a, b) not in Fk), None)
        if outside:
            notes.append(f"{outside[0]!r}*{outside[1]!r} leaves F_{w.k[n]}")
        hit = product_collision(g, Ft, Jn)
        if hit:
            notes.append(f"collision {hit[0]!r} and {hit[1]!r} both give {hit[2]!r}")
        fill = Fraction(len(Fk) - len(Ft) * len(Jn), len(Fk))
        left = set_product(g, w.J[n - 1], product_block(seqT, w.k[n - 1], w.k[n]))
        right = set_product(g, seqT2.c(n), Jn)
        block = Fraction(len(left.frozen ^ right.frozen), len(seqT2.c(n)) * len(Jn))
        rows.append(FactorRow(n, outside is None, hit is None, fill, w.eps[n], block, 2 * w.eps[n - 1], notes))
    report = FactorReport(rows)
    mass = mass_profile(seqT2)
    for n in range(1, w.steps + 1):
        share = mass[n] / mass[-1]
        if not share > 1 - w.eps[n] / 2:
            report.warnings.append(f"level {n} of the factor carries only {share} of the stored mass")
    return report


class FactorMap(PointMap):
    """Decompose the top complete block f c = ft ct j' and emit the factor point [ft ct] at level n+1."""

    kind = "FactorMap"

    def __init__(self, seqT, seqT2, w: FactorWitness):
        super().__init__(seqT, seqT2)
        self.w = w
        g = seqT.group
        self._base = []
        self._step = []
        for n in range(w.steps + 1):
            self._base.append(_unique_split(g, seqT2.f(n), w.J[n]))
            if n < w.steps:
                self._step.append(_unique_split(g, seqT2.c(n + 1), w.J[n + 1]))

    def level_for(self, p: Point) -> Optional[int]:
        k = self.w.k
        best = None
        for n in range(len(k) - 1):
            if p.level <= k[n] and k[n + 1] <= p.depth:
                best = n
        return best

    def decompose(self, n: int, f, c):
        """(ft, ct, j') with f = ft j and j c = ct j', or None outside Y_n."""
        hit = self._base[n].get(f)
        if hit is None:
            return None
        ft, j = hit
        nxt = self._step[n].get(self.source.group.mul(j, c))
        if nxt is None:
            return None
        return ft, nxt[0], nxt[1]

    def apply(self, p):
        n = self.level_for(p)
        if n is None:
            return None
        k = self.w.k
        q = at_level(self.source, p, k[n])
        if q is None:
            return None
        mul = self.source.group.mul
        c = self.source.group.identity()
        for x in q.coords[: k[n + 1] - k[n]]:
            c = mul(c, x)
        got = self.decompose(n, q.base, c)
        if got is None:
            return None
        return Point(n + 1, mul(got[0], got[1]))

    def domain_fraction(self, n: int) -> Fraction:
        """#Y_n / (#F_{k_n} #C_{k_n+1,k_{n+1}})."""
        k = self.w.k
        block = product_block(self.source, k[n], k[n + 1])
        F = self.source.f(k[n])
        hits = sum(1 for f in F for c in block if self.decompose(n, f, c) is not None)
        return Fraction(hits, len(F) * len(block))

    def pushforward(self, n: int) -> dict:
        """Number of pairs (f, c) in Y_n sent to each element of the factor level n+1."""
        k = self.w.k
        block = product_block(self.source, k[n], k[n + 1])
        counts = {x: 0 for x in self.target.f(n + 1)}
        mul = self.source.group.mul
        for f in self.source.f(k[n]):
            for c in block:
                got = self.decompose(n, f, c)
                if got is not None:
                    img = mul(got[0], got[1])
                    if img not in counts:
                        raise InvariantViolation(f"image {img!r} is outside the factor level {n + 1}")
                    counts[img] += 1
        return counts


def _unique_split(group, X, Y) -> dict:
    table = {}
    mul = group.mul
    for x in X:
        for y in Y:
            p = mul(x, y)
            if p in table:
                raise InvariantViolation(f"{p!r} decomposes as {table[p]!r} and {(x, y)!r}")
            table[p] = (x, y)
    return table


def build_factor_map(seqT: CFSequence, seqT2: CFSequence, w: FactorWitness) -> FactorMap:
    report = check_factor_witness(seqT, seqT2, w)
    if not report.passed:
        raise PreconditionError(f"factor witness fails: {report.failures()[:3]}")
    for msg in report.warnings:
        warnings.warn(msg, MassAssumptionWarning, stacklevel=2)
    w = w.bind(seqT, seqT2)
    return FactorMap(seqT, seqT2.truncate(w.steps), w)


# the approximate-equality calculus ---------------------------------------------

def approx_eq(A, B, eps) -> bool:
    """#(A delta B) < eps #B."""
    A, B = _frozen(A), _frozen(B)
    return len(A ^ B) < Fraction(eps) * len(B)


def _frozen(s) -> frozenset:
    return s.frozen if isinstance(s, FiniteSubset) else frozenset(s)


def inverse_bound_holds(A, B, eps) -> bool:
    """A ~eps B forces B ~eps/(1-eps) A (for eps < 1)."""
    eps = Fraction(eps)
    if not approx_eq(A, B, eps) or eps >= 1:
        return True
    return approx_eq(B, A, eps / (1 - eps))


def transitivity_holds(A, B, D, eps, delta) -> bool:
    eps, delta = Fraction(eps), Fraction(delta)
    if not (approx_eq(A, B, eps) and approx_eq(B, D, delta)):
        return True
    return approx_eq(A, D, eps + delta + eps * delta)


def _disjoint_translates(S, C) -> bool:
    seen = set()
    for c in C:
        moved = {s + c for s in S}
        if moved & seen:
            return False
        seen |= moved
    return True


def translation_holds(A, B, C, eps) -> bool:
    """With disjoint translates A+c and B+c, A ~eps B forces A+C ~eps B+C."""
    A, B, C = _frozen(A), _frozen(B), _frozen(C)
    if not (approx_eq(A, B, eps) and _disjoint_translates(A, C) and _disjoint_translates(B, C)):
        return True
    return approx_eq({a + c for a in A for c in C}, {b + c for b in B for c in C}, eps)


def non_overlap(A, B) -> bool:
    """max A < min B or max B < min A."""
    A, B = _frozen(A), _frozen(B)
    if not A or not B:
        raise PreconditionError("non-overlap needs nonempty sets")
    return max(A) < min(B) or max(B) < min(A)


# odometer factors ----------------------------------------------------------------

@dataclass(frozen=True)
class OdometerSpec:
    d: tuple

    def __init__(self, d):
        d = tuple(d)
        if not d or d[0] != 1 or any(x < 2 for x in d[1:]):
            raise PreconditionError("need d_0 = 1 and d_n >= 2")
        object.__setattr__(self, "d", d)

    def modulus(self, n: int) -> int:
        """D_n = d_1 ... d_n, with D_0 = 1."""
        if n >= len(self.d):
            raise PreconditionError(f"modulus D_{n} needs d_{n}")
        out = 1
        for x in self.d[1 : n + 1]:
            out *= x
        return out

    def sequence(self) -> CFSequence:
        from .params import odometer

        return odometer(self.d)


@dataclass(frozen=True)
class BlockDefect:
    n: int
    modulus: int
    raw: Fraction
    best: Fraction
    residue: int


def block_defect(block: FiniteSubset, modulus: int, n: int = 0) -> BlockDefect:
    counts = {}
    for c in block:
        counts[c % modulus] = counts.get(c % modulus, 0) + 1
    total = len(block)
    raw = Fraction(total - counts.get(0, 0), total)
    residue = min(counts, key=lambda r: (-counts[r], r))
    return BlockDefect(n, modulus, raw, Fraction(total - counts[residue], total), residue)


def odometer_defects(seqT: CFSequence, odo: OdometerSpec, k: Sequence[int]) -> list:
    """Defects of the blocks C_{k_n+1,k_{n+1}} modulo D_n for n = 1..len(k)-2."""
    if not isinstance(seqT.group, IntegerLine):
        raise DomainError("odometer defects are defined over the integers")
    k = tuple(k)
    if k[0] != 0 or any(b <= a for a, b in zip(k, k[1:])) or k[-1] > seqT.depth:
        raise PreconditionError(f"bad index list {k}")
    return [block_defect(product_block(seqT, k[n], k[n + 1]), odo.modulus(n), n) for n in range(1, len(k) - 1)]


@dataclass
class TelescopingSearch:
    found: bool
    k: tuple
    defects: list
    failed_at: Optional[int] = None

    @property
    def partial_sum(self) -> Fraction:
        return sum((d.best for d in self.defects), Fraction(0))


def search_odometer_telescoping(seqT: CFSequence, odo: OdometerSpec, thresholds=None, steps: Optional[int] = None) -> TelescopingSearch:
    """Greedy: k_1 = 1, then each k_{n+1} is the smallest index whose block has best-residue defect <= thresholds[n].

    Found means the indices reached the end of the stored prefix (or ``steps``
    blocks were placed); otherwise the step that could not be completed is
    reported in ``failed_at``.
    """
    if not isinstance(seqT.group, IntegerLine):
        raise DomainError("odometer defects are defined over the integers")
    N = seqT.depth
    want = N - 1 if steps is None else steps
    if thresholds is None:
        thresholds = [Fraction(1, 2 ** n) for n in range(want + 1)]
    thresholds = [Fraction(t) for t in thresholds]
    k, defects = [0, 1], []
    for n in range(1, want + 1):
        if n >= len(odo.d):
            return TelescopingSearch(False, tuple(k), defects, failed_at=n)
        chosen = None
        for nxt in range(k[-1] + 1, N + 1):
            d = block_defect(product_block(seqT, k[-1], nxt), odo.modulus(n), n)
            if d.best <= thresholds[n]:
                chosen = (nxt, d)
                break
        if chosen is None:
            return TelescopingSearch(False, tuple(k), defects, failed_at=n)
        k.append(chosen[0])
        defects.append(chosen[1])
        if chosen[0] == N:
            break
    return TelescopingSearch(True, tuple(k), defects)


# topological quotients -------------------------------------------------------------

@dataclass
class QuotientResult:
    report: ClauseReport
    telescoped: CFSequence
    map: Optional[PointMap]

    @property
    def passed(self) -> bool:
        return self.report.ok


def check_topological_quotient(seqT: CFSequence, seqT2: CFSequence, k: Sequence[int], A: Sequence) -> QuotientResult:
    """Telescope seqT along k, check the quotient clauses against seqT2 and build q_A after the telescoping."""
    tele, iota = telescope(seqT, k)
    report = quotient_check(tele, seqT2, A)
    qmap = None
    if report.ok:
        q = Quotient(tele, seqT2.truncate(tele.depth), A)
        qmap = Composite([iota, q])
    return QuotientResult(report, tele, qmap)


def preimage_law(seqT: CFSequence, seqT2: CFSequence, A: Sequence, q: PointMap) -> list:
    """For n = 1..N-1 and every ft in Ft_n: the level-0 points sent into [ft]_n are exactly those in [ft A_n]_n.

    Returns the list of (n, ft) where the two sets differ.
    """
    from .space import enumerate_points

    g = seqT.group
    N = seqT.depth
    A = [None] + [a if isinstance(a, FiniteSubset) else FiniteSubset(g, a) for a in A]
    points = list(enumerate_points(seqT, 0, N))
    images = [q(p) for p in points]
    bad = []
    for n in range(1, N):
        for ft in seqT2.f(n):
            target = set_product(g, [ft], A[n])
            for p, img in zip(points, images):
                src = at_level(seqT, p, n)
                in_source = src is not None and src.base in target
                dst = None if img is None else at_level(seqT2, img, n)
                in_image = dst is not None and dst.base == ft
                if in_source != in_image:
                    bad.append((n, ft))
                    break
    return bad

