"""Isomorphism witnesses: verification, assembly of the seven-stage map, bounded search."""
from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .errors import DomainError, InvariantViolation, PreconditionError
from .groups import IntegerLine
from .maps import (
    ChainEquivalence,
    PointMap,
    chain_check,
    compose,
    reduce,
    telescope,
)
from .params import (
    CFSequence,
    FiniteSubset,
    level_weight,
    product_block,
    product_collision,
    set_product,
    validate,
)
from .space import Point, at_level, cylinder, cylinder_measure, enumerate_points, value

EXHAUSTIVE_THRESHOLD = 20


def default_eps(count: int) -> tuple:
    """(2, 1/8, 1/16, 1/32, ...) with ``count`` entries."""
    return tuple([Fraction(2)] + [Fraction(1, 2 ** (n + 2)) for n in range(1, count)])[:count]


def _check_eps(eps) -> tuple:
    eps = tuple(Fraction(e) for e in eps)
    if any(e <= 0 for e in eps):
        raise PreconditionError("eps entries must be positive")
    if any(b > a for a, b in zip(eps, eps[1:])):
        raise PreconditionError("eps must be non-increasing")
    return eps


@dataclass(frozen=True)
class IsoWitness:
    """Indices k_0..k_K, l_0..l_K and sets Jt_0..Jt_K (in the second space), J_1..J_K (in the first).

    ``eps[n]`` bounds the two defect ratios at step n.
    """

    k: tuple
    l: tuple
    Jt: tuple
    J: tuple
    eps: tuple

    def __init__(self, k, l, Jt, J, eps=None):
        k, l = tuple(k), tuple(l)
        K = len(k) - 1
        if K < 1 or len(l) != K + 1 or len(Jt) != K + 1 or len(J) != K:
            raise PreconditionError("witness needs k, l, Jt of length K+1 and J of length K")
        if k[0] != 0 or k[1] != 0 or l[0] != 0:
            raise PreconditionError("witness indices must start 0 = k_0 = l_0 = k_1")
        chain = [k[1]]
        for n in range(1, K + 1):
            chain.append(l[n])
            if n < K:
                chain.append(k[n + 1])
        if any(b <= a for a, b in zip(chain, chain[1:])):
            raise PreconditionError(f"indices do not interleave: k={k}, l={l}")
        eps = default_eps(K) if eps is None else _check_eps(eps)
        if len(eps) < K:
            raise PreconditionError(f"need {K} eps entries, got {len(eps)}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "Jt", tuple(Jt))
        object.__setattr__(self, "J", tuple(J))
        object.__setattr__(self, "eps", tuple(eps[:K]))

    @property
    def steps(self) -> int:
        return len(self.k) - 1

    def jt(self, n: int):
        return self.Jt[n]

    def j(self, n: int):
        """J_n for 1 <= n <= K."""
        if not 1 <= n <= self.steps:
            raise IndexError(f"J_{n} outside 1..{self.steps}")
        return self.J[n - 1]

    def bind(self, seqT: CFSequence, seqT2: CFSequence) -> "IsoWitness":
        """Convert member sets to FiniteSubset of the right group and check membership."""
        g = seqT.group
        if seqT2.group != g:
            raise DomainError("both sequences must live in the same group")
        if self.k[-1] > seqT.depth or self.l[-1] > seqT2.depth:
            raise PreconditionError("witness indices exceed the stored prefixes")
        Jt = [FiniteSubset(g, s) for s in self.Jt]
        J = [FiniteSubset(g, s) for s in self.J]
        for n, s in enumerate(Jt):
            if not s.issubset(seqT2.f(self.l[n])):
                raise PreconditionError(f"Jt_{n} is not inside the second F_{self.l[n]}")
        for n, s in enumerate(J, start=1):
            if not s.issubset(seqT.f(self.k[n])):
                raise PreconditionError(f"J_{n} is not inside F_{self.k[n]}")
        return IsoWitness(self.k, self.l, Jt, J, self.eps)


@dataclass
class DefectRow:
    n: int
    inclusion: bool
    injective: bool
    ratio: Optional[Fraction] = None
    inclusion_mirror: Optional[bool] = None
    injective_mirror: Optional[bool] = None
    ratio_mirror: Optional[Fraction] = None
    bound: Optional[Fraction] = None
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        flags = [self.inclusion, self.injective, self.inclusion_mirror, self.injective_mirror]
        if any(f is False for f in flags):
            return False
        for r in (self.ratio, self.ratio_mirror):
            if r is not None and not r < self.bound:
                return False
        return True


@dataclass
class DefectReport:
    rows: list
    warnings: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.rows)

    def failures(self) -> list:
        out = []
        for r in self.rows:
            for name, flag in (("inclusion", r.inclusion), ("injective", r.injective),
                               ("inclusion-mirror", r.inclusion_mirror), ("injective-mirror", r.injective_mirror)):
                if flag is False:
                    out.append((r.n, name))
            if r.ratio is not None and not r.ratio < r.bound:
                out.append((r.n, "ratio"))
            if r.ratio_mirror is not None and not r.ratio_mirror < r.bound:
                out.append((r.n, "ratio-mirror"))
        return out


def _inclusion(group, left, right, target) -> Optional[tuple]:
    mul = group.mul
    for a in left:
        for b in right:
            if mul(a, b) not in target:
                return a, b
    return None


def defect_ratio(group, left, right, block) -> Fraction:
    """#((left right) symmetric-difference block) / #block."""
    prod = set_product(group, left, right)
    return Fraction(len(prod.frozen ^ block.frozen), len(block))


def _pair_row(group, n, shape, chosen, target, note_prefix):
    notes = []
    bad = _inclusion(group, shape, chosen, target)
    if bad:
        notes.append(f"{note_prefix} {bad[0]!r}*{bad[1]!r} leaves the target")
    hit = product_collision(group, shape, chosen)
    if hit:
        notes.append(f"{note_prefix} collision {hit[0]!r} and {hit[1]!r} both give {hit[2]!r}")
    return bad is None, hit is None, notes


def check_witness(seqT: CFSequence, seqT2: CFSequence, w: IsoWitness) -> DefectReport:
    w = w.bind(seqT, seqT2)
    g = seqT.group
    K = w.steps
    rows = []
    for n in range(K + 1):
        Fk = seqT.f(w.k[n])
        inc, inj, notes = _pair_row(g, n, Fk, w.jt(n), seqT2.f(w.l[n]), "(F Jt)")
        row = DefectRow(n, inc, inj, notes=notes)
        if n < K:
            block = product_block(seqT, w.k[n], w.k[n + 1])
            row.ratio = defect_ratio(g, w.jt(n), w.j(n + 1), block)
            inc2, inj2, notes2 = _pair_row(g, n, seqT2.f(w.l[n]), w.j(n + 1), seqT.f(w.k[n + 1]), "(Ft J)")
            row.inclusion_mirror, row.injective_mirror = inc2, inj2
            row.notes.extend(notes2)
            block2 = product_block(seqT2, w.l[n], w.l[n + 1])
            row.ratio_mirror = defect_ratio(g, w.j(n + 1), w.jt(n + 1), block2)
            row.bound = 2 * w.eps[n]
        rows.append(row)
    return DefectReport(rows)


# auxiliary sequences ---------------------------------------------------------

@dataclass
class Auxiliary:
    V: CFSequence
    W: CFSequence
    chain_A: list
    chain_B: list
    A: list
    B: list
    sums: dict
    bounds: dict


def build_auxiliary(seqT: CFSequence, seqT2: CFSequence, w: IsoWitness) -> Auxiliary:
    """Interpolating sequences V = (F_{k_n}, Jt_n J_{n+1}), W = (Ft_{l_n}, J_{n+1} Jt_{n+1}) and reduction data."""
    report = check_witness(seqT, seqT2, w)
    if not report.passed:
        raise PreconditionError(f"witness fails: {report.failures()[:3]}")
    w = w.bind(seqT, seqT2)
    g = seqT.group
    K = w.steps
    if set_product(g, w.jt(0), w.j(1)) != FiniteSubset(g, [g.identity()]):
        raise PreconditionError("need Jt_0 J_1 = {1_G}")
    V = CFSequence(g, [seqT.f(x) for x in w.k], [set_product(g, w.jt(n), w.j(n + 1)) for n in range(K)])
    W = CFSequence(g, [seqT2.f(x) for x in w.l], [set_product(g, w.j(n + 1), w.jt(n + 1)) for n in range(K)])
    for name, s in (("V", V), ("W", W)):
        rep = validate(s)
        if not rep.structural_ok:
            bad = [c for c in rep.violations if c.name != "C-size"][0]
            raise InvariantViolation(f"{name} fails {bad.name} at level {bad.level}")
    A, B = [], []
    sums = {"A/block": Fraction(0), "B/block": Fraction(0), "A/product": Fraction(0), "B/product": Fraction(0)}
    for n in range(K):
        blockT = product_block(seqT, w.k[n], w.k[n + 1])
        blockT2 = product_block(seqT2, w.l[n], w.l[n + 1])
        a = V.c(n + 1).intersection(blockT)
        b = W.c(n + 1).intersection(blockT2)
        if not len(a) or not len(b):
            raise InvariantViolation(f"empty reduction set at step {n}")
        A.append(a)
        B.append(b)
        sums["A/block"] += 1 - Fraction(len(a), len(blockT))
        sums["B/block"] += 1 - Fraction(len(b), len(blockT2))
        sums["A/product"] += 1 - Fraction(len(a), len(V.c(n + 1)))
        sums["B/product"] += 1 - Fraction(len(b), len(W.c(n + 1)))
    total = sum(w.eps, Fraction(0))
    bounds = {"A/block": 2 * total, "B/block": 2 * total, "A/product": 4 * total, "B/product": 4 * total}
    return Auxiliary(V, W, list(w.Jt), list(w.J), A, B, sums, bounds)


def build_isomorphism(seqT: CFSequence, seqT2: CFSequence, w: IsoWitness):
    """The seven-stage composite: telescope, reduce, un-reduce into V, chain map, reduce W, un-reduce, un-telescope."""
    aux = build_auxiliary(seqT, seqT2, w)
    Tk, iota_k = telescope(seqT, w.k, allow_repeats=True)
    TAk, rho_A, _ = reduce(Tk, aux.A, strict=False)
    VA, rho_hat_A, _ = reduce(aux.V, aux.A, strict=False)
    Tl, iota_l = telescope(seqT2, w.l)
    TBl, rho_B, _ = reduce(Tl, aux.B, strict=False)
    WB, rho_hat_B, _ = reduce(aux.W, aux.B, strict=False)
    report = chain_check(aux.V, aux.W, aux.chain_A, aux.chain_B)
    if not report.ok:
        bad = report.violations[0]
        raise InvariantViolation(f"auxiliary sequences are not chain equivalent: {bad.name} at level {bad.level}")
    psi = ChainEquivalence(aux.V, aux.W, aux.chain_A, aux.chain_B)
    stages = [iota_k, rho_A, rho_hat_A.inverse(), psi, rho_hat_B, rho_B.inverse(), iota_l.inverse()]
    try:
        return compose(stages)
    except PreconditionError as exc:
        raise InvariantViolation(str(exc)) from exc


@dataclass
class CylinderLaw:
    n: int
    image_bases_ok: bool
    source_measure: Fraction
    image_measure: Fraction
    target_measure: Fraction

    @property
    def ok(self) -> bool:
        return self.image_bases_ok and self.image_measure == self.target_measure


def cylinder_law(seqT: CFSequence, seqT2: CFSequence, w: IsoWitness, phi: PointMap) -> list:
    """For n < K: every image of a point of [1_G]_{k_n} lies in [Jt_n]_{l_n}, and the images fill it.

    Source points are enumerated to depth k_K; the map needs at least one
    coordinate, so n = K is not covered.
    """
    w = w.bind(seqT, seqT2)
    e = seqT.group.identity()
    depth = w.k[-1]
    out = []
    for n in range(w.steps):
        if e not in seqT.f(w.k[n]):
            raise PreconditionError(f"1_G is not in F_{w.k[n]}")
        images, bases_ok = set(), True
        for p in enumerate_points(seqT, w.k[n], depth, bases=[e]):
            q = phi(p)
            if q is None:
                continue
            q_n = at_level(seqT2, q, w.l[n])
            if q_n is None or q_n.base not in w.jt(n):
                bases_ok = False
            images.add(q)
        src = level_weight(seqT, w.k[n])
        image_measure = Fraction(0)
        for cyl_depth, _ in {(q.depth, value(seqT2, q)) for q in images}:
            image_measure += level_weight(seqT2, cyl_depth)
        target = cylinder_measure(seqT2, cylinder(seqT2, w.l[n], w.jt(n)))
        out.append(CylinderLaw(n, bases_ok, src, image_measure, target))
    return out


# Example-2.3-type shift witnesses -------------------------------------------

class ShiftMap(PointMap):
    """Shift base by alpha_n and each coordinate c_j by beta_j; undefined whenever a shift leaves its set."""

    kind = "Shift"

    def __init__(self, seq: CFSequence, beta: Sequence[int]):
        if not isinstance(seq.group, IntegerLine):
            raise DomainError("shift maps are defined over the integers")
        super().__init__(seq, seq)
        self.beta = tuple(beta)
        self.alpha = (0,)
        for b in self.beta:
            self.alpha += (self.alpha[-1] + b,)

    def apply(self, p):
        if p.depth > len(self.beta):
            return None
        f = p.base + self.alpha[p.level]
        if f not in self.source.f(p.level):
            return None
        coords = []
        for j, c in enumerate(p.coords, start=p.level + 1):
            c2 = c + self.beta[j - 1]
            if c2 not in self.source.c(j):
                return None
            coords.append(c2)
        return Point(p.level, f, tuple(coords))


def shift_witness(seq: CFSequence, beta: Sequence[int], steps: int, eps=None) -> IsoWitness:
    """Self-witness over the integers matching the coordinate shift by beta.

    Uses k = (0, 0, 2, 4, ...), l = (0, 1, 3, 5, ...), Jt_n the shifted C_{2n-1}
    restricted to admissible translates and J_{n+1} the back-shifted C_{2n}.
    """
    if not isinstance(seq.group, IntegerLine):
        raise DomainError("shift witnesses are defined over the integers")
    alpha = [0]
    for b in beta:
        alpha.append(alpha[-1] + b)
    k = [0, 0] + [2 * n - 2 for n in range(2, steps + 1)]
    l = [0] + [2 * n - 1 for n in range(1, steps + 1)]
    if l[-1] > seq.depth or l[-1] > len(beta):
        raise PreconditionError(f"need depth and shifts up to {l[-1]}")

    def fits(F_small, F_big):
        lo, hi = min(F_small), max(F_small)
        return lambda j: lo + j in F_big and hi + j in F_big

    Jt = [[0]]
    J = [[0]]
    for n in range(1, steps + 1):
        ok = fits(seq.f(2 * n - 2), seq.f(2 * n - 1))
        Jt.append([c + alpha[2 * n - 1] for c in seq.c(2 * n - 1) if ok(c + alpha[2 * n - 1])])
        if n < steps:
            ok = fits(seq.f(2 * n - 1), seq.f(2 * n))
            J.append([c - alpha[2 * n - 1] for c in seq.c(2 * n) if ok(c - alpha[2 * n - 1])])
    if eps is None:
        eps = [Fraction(2)] + [Fraction(1, 3)] * (steps - 1)
    return IsoWitness(k, l, Jt, J, eps)


# bounded search ----------------------------------------------------------------

def _subsets(group, cands, shape, partner, block, bound, max_size, exhaustive_threshold, budget) -> Iterator[tuple]:
    """Nonempty subsets S of ``cands`` in lexicographic order with disjoint translates shape*s and
    #((partner S) delta block) < bound * #block.
    """
    mul = group.mul
    shape_sets = [frozenset(mul(f, c) for f in shape) for c in cands]
    prods = [frozenset(mul(p, c) for p in partner) for c in cands]
    blk = block.frozen
    limit = bound * len(block)
    per = len(partner)

    if len(cands) > exhaustive_threshold:
        chosen, covered, prod = [], set(), set()
        for i, c in enumerate(cands):
            if shape_sets[i] & covered:
                continue
            new = prods[i] - prod
            if len(new & blk) > len(new - blk):
                chosen.append(c)
                covered |= shape_sets[i]
                prod |= new
                if max_size and len(chosen) >= max_size:
                    break
        if chosen and len(prod ^ blk) < limit:
            budget[0] -= 1
            yield tuple(chosen)
        return

    n = len(cands)

    def walk(start, chosen, covered, prod, outside):
        for i in range(start, n):
            if budget[0] <= 0:
                return
            if shape_sets[i] & covered:
                continue
            new = prods[i] - prod
            out2 = outside + len(new - blk)
            if out2 >= limit:
                continue
            prod2 = prod | new
            budget[0] -= 1
            chosen.append(cands[i])
            inside = len(prod2) - out2
            if out2 + len(blk) - inside < limit:
                yield tuple(chosen)
            if not max_size or len(chosen) < max_size:
                best_inside = inside + per * (n - i - 1)
                if out2 + max(0, len(blk) - best_inside) < limit:
                    yield from walk(i + 1, chosen, covered | shape_sets[i], prod2, out2)
            chosen.pop()

    yield from walk(0, [], frozenset(), frozenset(), 0)


def _admissible(group, shape, ground, target) -> list:
    mul = group.mul
    tgt = target.frozen
    return [j for j in ground if all(mul(f, j) in tgt for f in shape)]


@dataclass(frozen=True)
class SearchBounds:
    max_level: Optional[int] = None
    max_subset: Optional[int] = None
    exhaustive_threshold: int = EXHAUSTIVE_THRESHOLD
    budget: int = 200_000


class _Search:
    def __init__(self, seqT, seqT2, steps, eps, bounds: SearchBounds):
        self.T, self.T2 = seqT, seqT2
        self.g = seqT.group
        self.K = steps
        self.eps = eps
        self.bounds = bounds
        cap = bounds.max_level
        self.N1 = seqT.depth if cap is None else min(cap, seqT.depth)
        self.N2 = seqT2.depth if cap is None else min(cap, seqT2.depth)
        g = self.g
        x, y = seqT2.f(0).elements[0], seqT.f(0).elements[0]
        self.Jt0 = FiniteSubset(g, [g.mul(g.inv(y), x)])
        self.J1 = FiniteSubset(g, [g.mul(g.inv(x), y)])

    def jt_subsets(self, n, k_n, l_n, l_prev, J_n, budget, first=None):
        T, T2, g = self.T, self.T2, self.g
        shape = T.f(k_n)
        cands = _admissible(g, shape, T2.f(l_n).elements, T2.f(l_n))
        if first is not None:
            cands = [c for c in cands if c >= first]
        block = product_block(T2, l_prev, l_n)
        gen = _subsets(g, cands, shape, J_n, block, 2 * self.eps[n - 1], self.bounds.max_subset,
                       self.bounds.exhaustive_threshold, budget)
        for s in gen:
            if first is not None and s[0] != first:
                return
            yield FiniteSubset._trusted(g, s)

    def j_subsets(self, n, k_n, l_n, k_next, Jt_n, budget):
        T, T2, g = self.T, self.T2, self.g
        shape = T2.f(l_n)
        cands = _admissible(g, shape, T.f(k_next).elements, T.f(k_next))
        block = product_block(T, k_n, k_next)
        for s in _subsets(g, cands, shape, Jt_n, block, 2 * self.eps[n], self.bounds.max_subset,
                          self.bounds.exhaustive_threshold, budget):
            yield FiniteSubset._trusted(g, s)

    def after_jt(self, k, l, Jt, J, budget):
        n = len(l) - 1
        if n == self.K:
            return IsoWitness(k, l, Jt, J, self.eps)
        for k_next in range(l[n] + 1, self.N1 + 1):
            for Jn in self.j_subsets(n, k[n], l[n], k_next, Jt[n], budget):
                got = self.after_j(k + [k_next], l, Jt, J + [Jn], budget)
                if got is not None:
                    return got
                if budget[0] <= 0:
                    return None
        return None

    def after_j(self, k, l, Jt, J, budget):
        n = len(k) - 1
        for l_n in range(k[n] + 1, self.N2 + 1):
            for Jtn in self.jt_subsets(n, k[n], l_n, l[n - 1], J[n - 1], budget):
                got = self.after_jt(k, l + [l_n], Jt + [Jtn], J, budget)
                if got is not None:
                    return got
                if budget[0] <= 0:
                    return None
        return None

    def frontier(self) -> list:
        out = []
        T, T2, g = self.T, self.T2, self.g
        for l1 in range(1, self.N2 + 1):
            cands = _admissible(g, T.f(0), T2.f(l1).elements, T2.f(l1))
            if len(cands) > self.bounds.exhaustive_threshold:
                out.append((l1, None))
            else:
                out.extend((l1, c) for c in cands)
        return out

    def run_item(self, item):
        l1, first = item
        budget = [self.bounds.budget]
        k, l = [0, 0], [0]
        for Jt1 in self.jt_subsets(1, 0, l1, 0, self.J1, budget, first=first):
            got = self.after_jt(k, l + [l1], [self.Jt0, Jt1], [self.J1], budget)
            if got is not None:
                return got
            if budget[0] <= 0:
                break
        return None


def _run_frontier_item(args):
    search, item = args
    return search.run_item(item)


def search_witness(seqT: CFSequence, seqT2: CFSequence, steps: int, eps=None,
                   bounds: SearchBounds = SearchBounds(), workers: int = 1) -> Optional[IsoWitness]:
    """Lexicographically least witness with ``steps`` steps found within the bounds, or None.

    Candidates are ordered by (l_1, Jt_1, k_2, J_2, l_2, Jt_2, ...); subsets are
    compared as sorted tuples. The search budget applies to each top-level
    branch separately, so the answer does not depend on ``workers``.
    """
    from .params import require_structural

    require_structural(seqT)
    require_structural(seqT2)
    if seqT.group != seqT2.group:
        raise DomainError("both sequences must live in the same group")
    eps = default_eps(steps) if eps is None else _check_eps(eps)
    if len(eps) < steps:
        raise PreconditionError(f"need {steps} eps entries")
    search = _Search(seqT, seqT2, steps, tuple(eps[:steps]), bounds)
    items = search.frontier()
    if workers <= 1:
        for item in items:
            got = search.run_item(item)
            if got is not None:
                return got
        return None
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        for got in pool.map(_run_frontier_item, [(search, item) for item in items]):
            if got is not None:
                return got
    return None


# the good-sequence predicate -------------------------------------------------

@dataclass(frozen=True)
class BlockData:
    """One block quadruple: (D, E, Dt, Et) = (C-block, F, second C-block, second F)."""

    D: FiniteSubset
    E: FiniteSubset
    Dt: FiniteSubset
    Et: FiniteSubset


def blocks_from_indices(seqT: CFSequence, seqT2: CFSequence, k: Sequence[int], l: Sequence[int]) -> list:
    """Blocks (C_{k_m+1,k_{m+1}}, F_{k_m}, Ct_{l_m+1,l_{m+1}}, Ft_{l_m}) for m = 1..n, with k_{n+1}, l_{n+1} given."""
    if len(k) != len(l) or len(k) < 2:
        raise PreconditionError("need aligned index lists k_1..k_{n+1}, l_1..l_{n+1}")
    return [
        BlockData(product_block(seqT, k[m], k[m + 1]), seqT.f(k[m]), product_block(seqT2, l[m], l[m + 1]), seqT2.f(l[m]))
        for m in range(len(k) - 1)
    ]


def good_sequence(blocks: Sequence[BlockData], eps=None, bounds: SearchBounds = SearchBounds()) -> bool:
    """Whether sets Jt_1..Jt_n and J_2..J_n exist satisfying the six block clauses for m = 1..n-1.

    ``eps[m-1]`` is the bound used at block m.
    """
    n = len(blocks)
    if n <= 1:
        return True
    group = blocks[0].E.group
    eps = default_eps(n) if eps is None else _check_eps(eps)
    budget = [bounds.budget]
    ident = FiniteSubset(group, [group.identity()])

    def pick_jt(m, J_m):
        b = blocks[m - 1]
        if m < n:
            cands = _admissible(group, b.E, b.Et.elements, b.Et)
            shape = b.E
        else:
            cands, shape = list(b.Et.elements), ident
        if m == 1:
            block, partner, bound = b.Et, ident, Fraction(10 ** 9)
            yield from (FiniteSubset._trusted(group, s) for s in
                        _subsets(group, cands, shape, partner, FiniteSubset(group, cands), bound, bounds.max_subset,
                                 bounds.exhaustive_threshold, budget))
            return
        prev = blocks[m - 2]
        for s in _subsets(group, cands, shape, J_m, prev.Dt, 2 * eps[m - 2], bounds.max_subset,
                          bounds.exhaustive_threshold, budget):
            yield FiniteSubset._trusted(group, s)

    def pick_j(m, Jt_m):
        b, nxt = blocks[m - 1], blocks[m]
        cands = _admissible(group, b.Et, nxt.E.elements, nxt.E)
        for s in _subsets(group, cands, b.Et, Jt_m, b.D, 2 * eps[m - 1], bounds.max_subset,
                          bounds.exhaustive_threshold, budget):
            yield FiniteSubset._trusted(group, s)

    def from_jt(m, Jt_m):
        if m == n:
            return True
        for Jn in pick_j(m, Jt_m):
            for Jt_next in pick_jt(m + 1, Jn):
                if from_jt(m + 1, Jt_next):
                    return True
                if budget[0] <= 0:
                    return False
        return False

    for Jt1 in pick_jt(1, None):
        if from_jt(1, Jt1):
            return True
        if budget[0] <= 0:
            break
    return False
