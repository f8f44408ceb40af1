"""Elementary isomorphisms of parameter sequences and the partial point maps they induce.

Every transformation returns the new sequence together with a :class:`PointMap`.
Point maps are partial: ``None`` means the image is not determined by the
finite data carried by the point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import InvariantViolation, PreconditionError
from .params import (
    CFSequence,
    Clause,
    FiniteSubset,
    block_factorizations,
    product_block,
    product_collision,
    require_structural,
    set_product,
    validate,
)
from .space import Point, enumerate_points, same_cylinder


class PointMap:
    kind = "PointMap"

    def __init__(self, source: CFSequence, target: CFSequence):
        self.source = source
        self.target = target

    def __call__(self, p: Optional[Point]) -> Optional[Point]:
        if p is None:
            return None
        return self.apply(p)

    def apply(self, p: Point) -> Optional[Point]:
        raise NotImplementedError

    def inverse(self) -> "PointMap":
        raise NotImplementedError(f"{self.kind} has no stored inverse")

    def __repr__(self):
        return f"{self.kind}(N={self.source.depth}->{self.target.depth})"


class IdentityMap(PointMap):
    kind = "Identity"

    def __init__(self, seq: CFSequence):
        super().__init__(seq, seq)

    def apply(self, p):
        return p

    def inverse(self):
        return self


def _as_subset(group, s) -> FiniteSubset:
    return s if isinstance(s, FiniteSubset) else FiniteSubset(group, s)


def _check_new_violations(before: CFSequence, after: CFSequence, what: str) -> None:
    old = {(c.name, c.level) for c in validate(before).violations}
    for c in validate(after).violations:
        if (c.name, c.level) not in old:
            raise InvariantViolation(f"{what} output fails {c.name} at level {c.level}: {c.detail}")


# calibration ---------------------------------------------------------------

class Calibration(PointMap):
    kind = "Calibration"

    def __init__(self, source, target, z):
        super().__init__(source, target)
        self.z = tuple(z)

    def apply(self, p):
        if p.depth > self.source.depth:
            return None
        g = self.source.group
        mul, inv = g.mul, g.inv
        z = self.z
        base = mul(p.base, z[p.level])
        coords = tuple(mul(mul(inv(z[k - 1]), c), z[k]) for k, c in enumerate(p.coords, start=p.level + 1))
        return Point(p.level, base, coords)

    def inverse(self):
        inv = self.source.group.inv
        return Calibration(self.target, self.source, [inv(x) for x in self.z])


def calibrate(seq: CFSequence, z: Sequence) -> tuple:
    """Conjugate the parameters: C'_n = z_n^-1 C_n z_{n+1}, F'_n = F_n z_{n+1}.

    ``z`` lists z_1, ..., z_{N+1}; when only N entries are given the last one
    is the identity.
    """
    g = seq.group
    z = list(z)
    if len(z) == seq.depth:
        z.append(g.identity())
    if len(z) != seq.depth + 1:
        raise PreconditionError(f"need {seq.depth + 1} calibration elements, got {len(z)}")
    for x in z:
        g.check(x)
    F = [seq.f(n).translate_right(z[n]) for n in range(seq.depth + 1)]
    C = [seq.c(n).translate_left(g.inv(z[n - 1])).translate_right(z[n]) for n in range(1, seq.depth + 1)]
    out = CFSequence(g, F, C)
    _check_new_violations(seq, out, "calibration")
    return out, Calibration(seq, out, z)


def normalizing_calibration(seq: CFSequence) -> list:
    """Calibration elements after which 1_G lies in every F_n and every C_n."""
    require_structural(seq)
    g = seq.group
    running = seq.f(0).elements[0]
    z = [g.inv(running)]
    for n in range(1, seq.depth + 1):
        running = g.mul(running, seq.c(n).elements[0])
        z.append(g.inv(running))
    return z


def normalize(seq: CFSequence) -> tuple:
    return calibrate(seq, normalizing_calibration(seq))


# telescoping ---------------------------------------------------------------

def _check_indices(l: Sequence[int], depth: int, allow_repeats: bool) -> tuple:
    l = tuple(l)
    if not l or l[0] != 0:
        raise PreconditionError("telescoping indices must start at 0")
    for a, b in zip(l, l[1:]):
        if b < a or (b == a and not allow_repeats):
            raise PreconditionError(f"telescoping indices must be strictly increasing: {l}")
    if l[-1] > depth:
        raise PreconditionError(f"index {l[-1]} beyond stored prefix {depth}")
    return l


class Telescoping(PointMap):
    kind = "Telescoping"

    def __init__(self, source, target, l, allow_repeats=False):
        super().__init__(source, target)
        self.l = tuple(l)
        self.allow_repeats = allow_repeats

    def apply(self, p):
        l, m = self.l, p.depth
        j = next((i for i, x in enumerate(l) if p.level <= x <= m), None)
        if j is None:
            return None
        mul = self.source.group.mul
        e = self.source.group.identity()
        cs = p.coords
        pos = l[j] - p.level
        base = p.base
        for c in cs[:pos]:
            base = mul(base, c)
        blocks = []
        i = j + 1
        while i < len(l) and l[i] <= m:
            block = e
            for c in cs[l[i - 1] - p.level : l[i] - p.level]:
                block = mul(block, c)
            blocks.append(block)
            pos = l[i] - p.level
            i += 1
        rest = cs[pos:]
        residual = None
        if rest:
            residual = e
            for c in rest:
                residual = mul(residual, c)
        if p.residual is not None:
            residual = p.residual if residual is None else mul(residual, p.residual)
        return Point(j, base, tuple(blocks), residual)

    def inverse(self):
        return TelescopingInverse(self.target, self.source, self.l)


class TelescopingInverse(PointMap):
    kind = "TelescopingInverse"

    def __init__(self, source, target, l):
        super().__init__(source, target)
        self.l = tuple(l)
        self._tables = [block_factorizations(target, a, b) for a, b in zip(self.l, self.l[1:])]

    def apply(self, p):
        if p.depth >= len(self.l):
            return None
        coords = []
        for i, block in enumerate(p.coords, start=p.level + 1):
            parts = self._tables[i - 1].get(block)
            if parts is None:
                return None
            coords.extend(parts)
        return Point(self.l[p.level], p.base, tuple(coords), p.residual)

    def inverse(self):
        return Telescoping(self.target, self.source, self.l, allow_repeats=True)


def telescope(seq: CFSequence, l: Sequence[int], allow_repeats: bool = False) -> tuple:
    """Group levels along l: new F_n = F_{l_n}, new C_{n+1} = C_{l_n+1} ... C_{l_{n+1}}."""
    require_structural(seq)
    l = _check_indices(l, seq.depth, allow_repeats)
    F = [seq.f(x) for x in l]
    C = [product_block(seq, a, b) for a, b in zip(l, l[1:])]
    out = CFSequence(seq.group, F, C)
    if not allow_repeats:
        _check_new_violations(seq, out, "telescoping")
    return out, Telescoping(seq, out, l, allow_repeats)


# reduction -----------------------------------------------------------------

class Reduction(PointMap):
    kind = "Reduction"

    def __init__(self, source, target, A):
        super().__init__(source, target)
        self.A = tuple(A)

    def apply(self, p):
        for k, c in enumerate(p.coords, start=p.level + 1):
            if k > len(self.A) or c not in self.A[k - 1]:
                return None
        return p

    def inverse(self):
        return ReductionInverse(self.target, self.source, self.A)


class ReductionInverse(PointMap):
    kind = "ReductionInverse"

    def __init__(self, source, target, A):
        super().__init__(source, target)
        self.A = tuple(A)

    def apply(self, p):
        return p

    def inverse(self):
        return Reduction(self.target, self.source, self.A)


def reduce(seq: CFSequence, A: Sequence, strict: bool = True) -> tuple:
    """Replace each C_n by a nonempty subset A_n; returns (sequence, map, density scale).

    With ``strict`` the output must not create new failing clauses (in
    particular no new singleton levels).
    """
    g = seq.group
    A = [_as_subset(g, a) for a in A]
    if len(A) != seq.depth:
        raise PreconditionError(f"need {seq.depth} reduction sets, got {len(A)}")
    scale = Fraction(1)
    for n, a in enumerate(A, start=1):
        if not len(a):
            raise PreconditionError(f"reduction set A_{n} is empty")
        if not a.issubset(seq.c(n)):
            raise PreconditionError(f"reduction set A_{n} is not inside C_{n}")
        scale *= Fraction(len(a), len(seq.c(n)))
    out = CFSequence(g, seq.F, A)
    if strict:
        _check_new_violations(seq, out, "reduction")
    return out, Reduction(seq, out, A), scale


# chain equivalence ---------------------------------------------------------

@dataclass
class ClauseReport:
    clauses: list

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.clauses)

    @property
    def violations(self) -> list:
        return [c for c in self.clauses if not c.ok]

    def failed(self, name: str) -> list:
        return [c.level for c in self.violations if c.name == name]


def _identity_only(group, X, Y) -> bool:
    """X^-1 X  intersected with  Y Y^-1  is {1_G}."""
    mul, inv = group.mul, group.inv
    left = {mul(inv(a), b) for a in X for b in X}
    right = {mul(a, inv(b)) for a in Y for b in Y}
    return left & right == {group.identity()}


def _product_clause(group, name, n, X, Y, expected) -> Clause:
    hit = product_collision(group, X, Y)
    if hit:
        return Clause(name, n, False, f"non-injective: {hit[0]!r} and {hit[1]!r} give {hit[2]!r}")
    prod = set_product(group, X, Y)
    if prod != expected:
        extra = sorted(prod.frozen - expected.frozen)[:3]
        missing = sorted(expected.frozen - prod.frozen)[:3]
        return Clause(name, n, False, f"extra {extra!r}, missing {missing!r}")
    return Clause(name, n, True)


def _inclusion_clause(group, name, n, X, Y, target) -> Clause:
    mul = group.mul
    for x in X:
        for y in Y:
            if mul(x, y) not in target:
                return Clause(name, n, False, f"{x!r}*{y!r} outside")
    return Clause(name, n, True)


def chain_check(seqT: CFSequence, seqT2: CFSequence, A: Sequence, B: Sequence) -> ClauseReport:
    """Check the chain-equivalence clauses level by level.

    ``A`` lists A_0..A_N and ``B`` lists B_1..B_N.
    """
    g = seqT.group
    N = seqT.depth
    if seqT2.depth != N or len(A) != N + 1 or len(B) != N:
        raise PreconditionError("chain data must align with both prefixes")
    A = [_as_subset(g, a) for a in A]
    B = [None] + [_as_subset(g, b) for b in B]
    clauses = []
    for n in range(1, N + 1):
        clauses.append(_product_clause(g, "AB=C", n, A[n - 1], B[n], seqT.c(n)))
        clauses.append(_product_clause(g, "BA=C'", n, B[n], A[n], seqT2.c(n)))
        clauses.append(_inclusion_clause(g, "F'B<=F", n, seqT2.f(n - 1), B[n], seqT.f(n)))
        clauses.append(_inclusion_clause(g, "FA<=F'", n, seqT.f(n - 1), A[n - 1], seqT2.f(n - 1)))
        ok = _identity_only(g, A[n - 1], B[n]) and _identity_only(g, B[n], A[n])
        clauses.append(Clause("trivial-intersection", n, ok))
    return ClauseReport(clauses)


def _split_tables(group, X, Y):
    table = {}
    mul = group.mul
    for x in X:
        for y in Y:
            p = mul(x, y)
            if p in table:
                raise InvariantViolation(f"{p!r} splits as {table[p]!r} and {(x, y)!r}")
            table[p] = (x, y)
    return table


class ChainEquivalence(PointMap):
    """Split c_j = a_{j-1} b_j and regroup as (f a_n, b_{n+1} a_{n+1}, ...).

    At the end of the stored coordinates the unpaired b_m is kept as the
    residual of the image.
    """

    kind = "ChainEquivalence"

    def __init__(self, source, target, A, B):
        super().__init__(source, target)
        g = source.group
        self.A = tuple(_as_subset(g, a) for a in A)
        self.B = tuple(_as_subset(g, b) for b in B)
        self._split = [None] + [_split_tables(g, self.A[j - 1], self.B[j - 1]) for j in range(1, len(self.B) + 1)]

    def apply(self, p):
        if not p.coords or p.depth >= len(self._split):
            return None
        mul = self.source.group.mul
        pairs = []
        for j, c in enumerate(p.coords, start=p.level + 1):
            ab = self._split[j].get(c)
            if ab is None:
                return None
            pairs.append(ab)
        base = mul(p.base, pairs[0][0])
        coords = tuple(mul(pairs[i][1], pairs[i + 1][0]) for i in range(len(pairs) - 1))
        return Point(p.level, base, coords, pairs[-1][1])


def chain_map(seqT: CFSequence, seqT2: CFSequence, A: Sequence, B: Sequence, check: bool = True) -> ChainEquivalence:
    if check:
        report = chain_check(seqT, seqT2, A, B)
        if not report.ok:
            bad = report.violations[0]
            raise PreconditionError(f"chain data fails {bad.name} at level {bad.level}")
    return ChainEquivalence(seqT, seqT2, A, B)


def chain_normalize(seqT: CFSequence, seqT2: CFSequence, A: Sequence, B: Sequence) -> tuple:
    """Calibrate seqT so the chain data contains the identity at every level.

    For each n the unique pair b_n a_n = 1_G is found; B_n is replaced by
    B_n b_n^-1, A_n by b_n A_n and seqT is calibrated by (1, b_1^-1, b_2^-1, ...).
    """
    g = seqT.group
    mul, inv, e = g.mul, g.inv, g.identity()
    A = [_as_subset(g, a) for a in A]
    B = [_as_subset(g, b) for b in B]
    bs = [e]
    for n in range(1, len(B) + 1):
        hits = [b for b in B[n - 1] for a in A[n] if mul(b, a) == e]
        if len(hits) != 1:
            raise PreconditionError(f"level {n}: expected one pair with b a = 1_G, found {len(hits)}")
        bs.append(hits[0])
    newA = [A[0]] + [A[n].translate_left(bs[n]) for n in range(1, len(A))]
    newB = [B[n - 1].translate_right(inv(bs[n])) for n in range(1, len(B) + 1)]
    z = [inv(b) for b in bs]
    calibrated, phi = calibrate(seqT, z)
    return calibrated, phi, newA, newB


# quotient ------------------------------------------------------------------

def quotient_check(seqT: CFSequence, seqT2: CFSequence, A: Sequence) -> ClauseReport:
    """Check sandwich, separation and intertwining clauses; ``A`` lists A_1..A_N."""
    g = seqT.group
    mul, inv = g.mul, g.inv
    N = seqT.depth
    if seqT2.depth < N or len(A) != N:
        raise PreconditionError("quotient data must align with the prefixes")
    A = [None] + [_as_subset(g, a) for a in A]
    clauses = []
    for n in range(1, N + 1):
        Ft = seqT2.f(n)
        middle = set_product(g, Ft, A[n])
        lower = set_product(g, seqT.f(n - 1), seqT.c(n))
        missing = sorted(lower.frozen - middle.frozen)[:3]
        outside = sorted(middle.frozen - seqT.f(n).frozen)[:3]
        detail = ""
        if missing:
            detail += f"F_{n - 1}C_{n} not covered at {missing!r} "
        if outside:
            detail += f"F~_{n}A_{n} leaves F_{n} at {outside!r}"
        clauses.append(Clause("sandwich", n, not missing and not outside, detail.strip()))
        diffs = {mul(inv(a), b) for a in Ft for b in Ft} & {mul(a, inv(b)) for a in A[n] for b in A[n]}
        clauses.append(Clause("separation", n, diffs == {g.identity()}, "" if diffs == {g.identity()} else f"shared {sorted(diffs)[:3]!r}"))
        if n < N:
            left = set_product(g, A[n], seqT.c(n + 1))
            right = set_product(g, seqT2.c(n + 1), A[n + 1])
            ok = left == right
            detail = ""
            if not ok:
                detail = f"A C only {sorted(left.frozen - right.frozen)[:3]!r}, C~ A only {sorted(right.frozen - left.frozen)[:3]!r}"
            clauses.append(Clause("intertwining", n, ok, detail))
    return ClauseReport(clauses)


class Quotient(PointMap):
    """Rewrite f c_{n+1} = f~ a_{n+1}, then a_k c_{k+1} = c~_{k+1} a_{k+1} along the coordinates."""

    kind = "Quotient"

    def __init__(self, source, target, A):
        super().__init__(source, target)
        g = source.group
        self.A = tuple(_as_subset(g, a) for a in A)
        N = len(self.A)
        self._base = [None] + [_split_tables(g, target.f(n), self.A[n - 1]) for n in range(1, N + 1)]
        self._step = [None] + [_split_tables(g, target.c(n), self.A[n - 1]) for n in range(1, N + 1)]

    def apply(self, p):
        N = len(self.A)
        mul = self.source.group.mul
        if not p.coords:
            if p.level < 1 or p.level > N:
                return None
            hit = self._base[p.level].get(p.base)
            if hit is None:
                return None
            return Point(p.level, hit[0], (), hit[1])
        if p.depth > N:
            return None
        n = p.level
        hit = self._base[n + 1].get(mul(p.base, p.coords[0]))
        if hit is None:
            return None
        ft, a = hit
        coords = []
        for k, c in enumerate(p.coords[1:], start=n + 2):
            step = self._step[k].get(mul(a, c))
            if step is None:
                return None
            coords.append(step[0])
            a = step[1]
        return Point(n + 1, ft, tuple(coords), a)


def quotient_map(seqT: CFSequence, seqT2: CFSequence, A: Sequence, check: bool = True) -> Quotient:
    if check:
        report = quotient_check(seqT, seqT2, A)
        if not report.ok:
            bad = report.violations[0]
            raise PreconditionError(f"quotient data fails {bad.name} at level {bad.level}")
    return Quotient(seqT, seqT2.truncate(seqT.depth), A)


# composition and comparison ------------------------------------------------

class Composite(PointMap):
    kind = "Composite"

    def __init__(self, stages):
        stages = list(stages)
        if not stages:
            raise PreconditionError("cannot compose an empty list of maps")
        super().__init__(stages[0].source, stages[-1].target)
        self.stages = stages

    def apply(self, p):
        for s in self.stages:
            p = s(p)
            if p is None:
                return None
        return p

    def trace(self, p):
        out = [p]
        for s in self.stages:
            p = s(p)
            out.append(p)
        return out

    def inverse(self):
        return Composite([s.inverse() for s in reversed(self.stages)])


def compose(maps: Sequence[PointMap]) -> Composite:
    """Apply ``maps`` left to right."""
    for a, b in zip(maps, maps[1:]):
        if a.target != b.source:
            raise PreconditionError(f"{a!r} does not feed {b!r}")
    return Composite(maps)


def map_divergence(mapA: PointMap, mapB: PointMap, levels: Optional[Sequence[int]] = None) -> list:
    """For each level n: share of depth-N sub-points of [1_G]_n on which the maps disagree.

    Disagreement means one image is undefined while the other is not, or the
    two images lie in different cylinders at their common depth.
    """
    src = mapA.source
    if mapB.source != src:
        raise PreconditionError("maps must share their source sequence")
    e = src.group.identity()
    N = src.depth
    levels = range(N + 1) if levels is None else levels
    out = []
    for n in levels:
        if e not in src.f(n):
            out.append(None)
            continue
        total = bad = 0
        for p in enumerate_points(src, n, N, bases=[e]):
            total += 1
            if not same_cylinder(mapA.target, mapA(p), mapB(p)):
                bad += 1
        out.append(Fraction(bad, total))
    return out


# standardization -----------------------------------------------------------

@dataclass
class StandardForm:
    l: tuple
    A: list
    seq: CFSequence
    evaluations: int


def standardize(seq: CFSequence, window: Sequence, budget: int = 10_000) -> Optional[StandardForm]:
    """Greedy telescoping plus reduction on which every g in ``window`` acts level by level.

    For each next level the smallest index is taken whose maximal admissible
    reduction set {c : g F c inside F_next for all g} has at least two
    elements. Returns None when not even the first level can be formed or the
    budget of candidate evaluations runs out first.
    """
    require_structural(seq)
    g = seq.group
    mul = g.mul
    window = [g.check(x) for x in window]
    l, A, cur, used = [0], [], 0, 0
    while cur < seq.depth:
        chosen = None
        for nxt in range(cur + 1, seq.depth + 1):
            used += 1
            if used > budget:
                return None
            block = product_block(seq, cur, nxt)
            Fc, Fn = seq.f(cur), seq.f(nxt).frozen
            good = [c for c in block if all(mul(mul(x, f), c) in Fn for x in window for f in Fc)]
            if len(good) >= 2:
                chosen = (nxt, FiniteSubset(g, good))
                break
        if chosen is None:
            break
        l.append(chosen[0])
        A.append(chosen[1])
        cur = chosen[0]
    if len(l) == 1:
        return None
    tele, _ = telescope(seq, l)
    reduced, _, _ = reduce(tele, A)
    return StandardForm(tuple(l), A, reduced, used)


def telescope_indices_compose(l: Sequence[int], l2: Sequence[int]) -> tuple:
    """Indices of telescoping by l and then by l2."""
    return tuple(l[i] for i in l2)
