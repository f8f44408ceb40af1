"""Finite-depth points of the inductive-limit space and the partial action on them.

A :class:`Point` at level n is a base element f in F_n followed by the
coordinates c_{n+1}, ..., c_m; its depth is m and it stands for the depth-m
cylinder of its value f c_{n+1} ... c_m. Maps that consume part of the next
coordinate record that part in ``residual`` so full words stay exact.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .errors import InvariantViolation, PreconditionError
from .params import CFSequence, FiniteSubset, level_weight, mass_profile, require_structural


@dataclass(frozen=True)
class Point:
    level: int
    base: object
    coords: tuple = ()
    residual: object = None

    @property
    def depth(self) -> int:
        return self.level + len(self.coords)


def depth_point(m: int, f) -> Point:
    return Point(m, f, ())


def value(seq: CFSequence, p: Point):
    """The element base * c_{n+1} * ... * c_m of F_depth."""
    mul = seq.group.mul
    v = p.base
    for c in p.coords:
        v = mul(v, c)
    return v


def full_word(seq: CFSequence, p: Point):
    v = value(seq, p)
    return v if p.residual is None else seq.group.mul(v, p.residual)


def in_space(seq: CFSequence, p: Point) -> bool:
    if p.depth > seq.depth or p.base not in seq.f(p.level):
        return False
    return all(c in seq.c(p.level + i + 1) for i, c in enumerate(p.coords))


def factorize(seq: CFSequence, v, m: int, n: int):
    """Split v in F_m as f_n c_{n+1} ... c_m, or return None when v is not in F_n C_{n+1} ... C_m."""
    if not 0 <= n <= m <= seq.depth:
        raise PreconditionError(f"cannot factor from depth {m} to level {n}")
    group = seq.group
    mul, inv = group.mul, group.inv
    if v not in seq.f(m):
        return None
    coords = []
    for k in range(m, n, -1):
        below = seq.f(k - 1)
        hits = [c for c in seq.c(k) if mul(v, inv(c)) in below]
        if len(hits) > 1:
            raise InvariantViolation(f"{v!r} factors through C_{k} in {len(hits)} ways")
        if not hits:
            return None
        c = hits[0]
        coords.append(c)
        v = mul(v, inv(c))
    coords.reverse()
    return v, tuple(coords)


def factorize_point(seq: CFSequence, p: Point, n: int):
    if n >= p.level:
        cut = n - p.level
        return value(seq, Point(p.level, p.base, p.coords[:cut])), tuple(p.coords[cut:])
    return factorize(seq, value(seq, p), p.depth, n)


def at_level(seq: CFSequence, p: Point, n: int) -> Optional[Point]:
    """The same point re-expressed with base level n, if it is already in X_n."""
    got = factorize_point(seq, p, n)
    if got is None:
        return None
    return Point(n, got[0], got[1], p.residual)


def enumerate_points(seq: CFSequence, level: int, depth: int, bases=None) -> Iterator[Point]:
    require_structural(seq)
    bases = seq.f(level) if bases is None else bases
    blocks = [seq.c(k).elements for k in range(level + 1, depth + 1)]
    for f in bases:
        for cs in itertools.product(*blocks):
            yield Point(level, f, cs)


@dataclass(frozen=True)
class Cylinder:
    level: int
    A: FiniteSubset


def cylinder(seq: CFSequence, level: int, elements) -> Cylinder:
    A = elements if isinstance(elements, FiniteSubset) else FiniteSubset(seq.group, elements)
    if not A.issubset(seq.f(level)):
        raise PreconditionError(f"cylinder set is not inside F_{level}")
    return Cylinder(level, A)


class MassStillGrowing(UserWarning):
    pass


def cylinder_measure(seq: CFSequence, cyl: Cylinder, normalized: bool = False) -> Fraction:
    """#A / (#C_1 ... #C_n), optionally divided by the final prefix mass."""
    if not cyl.A.issubset(seq.f(cyl.level)):
        raise PreconditionError(f"cylinder set is not inside F_{cyl.level}")
    value_ = len(cyl.A) * level_weight(seq, cyl.level)
    if normalized:
        mass = mass_profile(seq)
        if len(mass) > 1 and mass[-1] > mass[-2]:
            warnings.warn("mass profile still increasing at the last stored level", MassStillGrowing, stacklevel=2)
        value_ /= mass[-1]
    return value_


def deepen(seq: CFSequence, p: Point, m: int) -> Point:
    """Extend p to depth m along the identity tail."""
    e = seq.group.identity()
    coords = list(p.coords)
    for k in range(p.depth + 1, m + 1):
        if e not in seq.c(k):
            raise PreconditionError(f"identity tail unavailable: 1_G not in C_{k}")
        coords.append(e)
    return Point(p.level, p.base, tuple(coords), p.residual)


def act(seq: CFSequence, g, p: Point, max_depth: Optional[int] = None) -> Optional[Point]:
    """Apply the partial action of g; None when undefined within ``max_depth``."""
    seq.group.check(g)
    mul = seq.group.mul
    max_depth = seq.depth if max_depth is None else max_depth
    if max_depth > seq.depth:
        raise PreconditionError(f"max_depth {max_depth} exceeds stored prefix {seq.depth}")
    f = p.base
    for i in range(len(p.coords) + 1):
        n = p.level + i
        if i:
            f = mul(f, p.coords[i - 1])
        if mul(g, f) in seq.f(n):
            return Point(n, mul(g, f), p.coords[i:], p.residual)
    if p.depth >= max_depth:
        return None
    e = seq.group.identity()
    v = f
    for k in range(p.depth + 1, max_depth + 1):
        if e not in seq.c(k):
            raise PreconditionError(f"identity tail unavailable: 1_G not in C_{k}")
        if mul(g, v) in seq.f(k):
            return Point(k, mul(g, v), (), p.residual)
    return None


@dataclass(frozen=True)
class CocycleValue:
    g: object
    stabilized_at: int
    stabilized: bool


def cocycle(seq: CFSequence, p: Point, q: Point) -> Optional[CocycleValue]:
    """full(p) * full(q)^-1 evaluated at a common depth."""
    if p.depth != q.depth:
        m = max(p.depth, q.depth)
        try:
            p, q = deepen(seq, p, m), deepen(seq, q, m)
        except PreconditionError:
            return None
    group = seq.group
    g = group.mul(full_word(seq, p), group.inv(full_word(seq, q)))
    if p == q:
        same_tail = True
    elif p.coords and q.coords:
        same_tail = p.coords[-1] == q.coords[-1] and p.residual == q.residual
    else:
        same_tail = False
    return CocycleValue(g, p.depth, same_tail)


@dataclass(frozen=True)
class ActionLevel:
    m: int
    holds: bool
    ratio: Fraction


def action_definedness_diagnostic(seq: CFSequence, g, n: int) -> list:
    """For m in (n, N]: does g F_n C_{n+1}...C_m sit inside F_m, and what fraction does."""
    require_structural(seq)
    if not 0 <= n < seq.depth:
        raise PreconditionError(f"level {n} must be below the prefix depth {seq.depth}")
    group = seq.group
    mul = group.mul
    current = {mul(g, f) for f in seq.f(n)}
    base_weight = len(seq.f(n)) * level_weight(seq, n)
    rows = []
    for m in range(n + 1, seq.depth + 1):
        current = {mul(x, c) for x in current for c in seq.c(m)}
        inside = len(current & seq.f(m).frozen)
        rows.append(ActionLevel(m, inside == len(current), inside * level_weight(seq, m) / base_weight))
    return rows


def folner_defect(seq: CFSequence, g) -> list:
    """#(g F_n  symmetric-difference  F_n) / #F_n for each stored level."""
    mul = seq.group.mul
    out = []
    for F in seq.F:
        moved = {mul(g, f) for f in F}
        out.append(Fraction(len(moved ^ F.frozen), len(F)))
    return out


def near_tiling(seq: CFSequence, n: int, m: int):
    """Greedy disjoint right translates F_n d packed into F_m, scanned in canonical order."""
    if not 0 <= n < m <= seq.depth:
        raise PreconditionError("need n < m within the prefix")
    group = seq.group
    mul, inv = group.mul, group.inv
    Fn, Fm = seq.f(n), seq.f(m).frozen
    candidates = sorted({mul(inv(f), x) for f in Fn for x in Fm})
    covered, D = set(), []
    for d in candidates:
        shifted = {mul(f, d) for f in Fn}
        if shifted <= Fm and not (shifted & covered):
            D.append(d)
            covered |= shifted
    return FiniteSubset(group, D), Fraction(len(covered), len(Fm))


def same_cylinder(seq: CFSequence, p: Optional[Point], q: Optional[Point]) -> bool:
    """Both undefined, or both in one cylinder at their common coarser depth."""
    if p is None or q is None:
        return p is None and q is None
    d = min(p.depth, q.depth)
    a = factorize(seq, value(seq, p), p.depth, d)
    b = factorize(seq, value(seq, q), q.depth, d)
    if a is None or b is None:
        return False
    return a[0] == b[0]
