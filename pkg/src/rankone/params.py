"""Parameter sequences: finite subsets, validation, mass profiles, constructors."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError, InvariantViolation, PreconditionError, ValidationError
from .groups import Group, IntegerLine


class FiniteSubset:
    """A canonically sorted, duplicate-free finite set of group elements."""

    __slots__ = ("group", "elements", "_set")

    def __init__(self, group: Group, elements: Iterable = ()):
        items = set()
        for x in elements:
            if not group.is_element(x):
                raise DomainError(f"{x!r} is not an element of {group}")
            items.add(x)
        self.group = group
        self.elements = tuple(sorted(items))
        self._set = frozenset(items)

    @classmethod
    def _trusted(cls, group: Group, items) -> "FiniteSubset":
        obj = cls.__new__(cls)
        obj.group = group
        obj._set = frozenset(items)
        obj.elements = tuple(sorted(obj._set))
        return obj

    def __contains__(self, x) -> bool:
        return x in self._set

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteSubset) and self._set == other._set and self.group == other.group

    def __hash__(self):
        return hash(self._set)

    def __repr__(self):
        return f"FiniteSubset({list(self.elements)!r})"

    @property
    def frozen(self) -> frozenset:
        return self._set

    def issubset(self, other) -> bool:
        return self._set <= _as_frozen(other)

    def translate_left(self, g) -> "FiniteSubset":
        mul = self.group.mul
        return FiniteSubset._trusted(self.group, (mul(g, x) for x in self.elements))

    def translate_right(self, g) -> "FiniteSubset":
        mul = self.group.mul
        return FiniteSubset._trusted(self.group, (mul(x, g) for x in self.elements))

    def product(self, other: "FiniteSubset") -> "FiniteSubset":
        return set_product(self.group, self, other)

    def symmetric_difference(self, other) -> "FiniteSubset":
        return FiniteSubset._trusted(self.group, self._set ^ _as_frozen(other))

    def intersection(self, other) -> "FiniteSubset":
        return FiniteSubset._trusted(self.group, self._set & _as_frozen(other))

    def difference(self, other) -> "FiniteSubset":
        return FiniteSubset._trusted(self.group, self._set - _as_frozen(other))

    def union(self, other) -> "FiniteSubset":
        return FiniteSubset._trusted(self.group, self._set | _as_frozen(other))

    def inverse(self) -> "FiniteSubset":
        return FiniteSubset._trusted(self.group, (self.group.inv(x) for x in self.elements))


def _as_frozen(s) -> frozenset:
    if isinstance(s, FiniteSubset):
        return s.frozen
    return frozenset(s)


def subset(group: Group, elements: Iterable) -> FiniteSubset:
    return FiniteSubset(group, elements)


def set_product(group: Group, *sets) -> FiniteSubset:
    """The product set S1 S2 ... Sk; the empty product is the identity singleton."""
    current = {group.identity()}
    mul = group.mul
    for s in sets:
        current = {mul(a, b) for a in current for b in s}
    return FiniteSubset._trusted(group, current)


def product_collision(group: Group, left, right):
    """First pair of distinct pairs with equal products, or None when the product map is injective."""
    seen = {}
    mul = group.mul
    for a in left:
        for b in right:
            p = mul(a, b)
            if p in seen:
                return seen[p], (a, b), p
            seen[p] = (a, b)
    return None


@dataclass(frozen=True)
class CFSequence:
    """A finite prefix (F_0..F_N, C_1..C_N) over a group."""

    group: Group
    F: tuple
    C: tuple

    def __init__(self, group: Group, F: Sequence, C: Sequence):
        F = tuple(x if isinstance(x, FiniteSubset) else FiniteSubset(group, x) for x in F)
        C = tuple(x if isinstance(x, FiniteSubset) else FiniteSubset(group, x) for x in C)
        if len(F) != len(C) + 1:
            raise PreconditionError(f"need len(F) == len(C) + 1, got {len(F)} and {len(C)}")
        for s in F + C:
            if s.group != group:
                raise DomainError("subset belongs to a different group")
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "C", C)

    @property
    def depth(self) -> int:
        return len(self.C)

    def f(self, n: int) -> FiniteSubset:
        return self.F[n]

    def c(self, n: int) -> FiniteSubset:
        """C_n for 1 <= n <= N."""
        if not 1 <= n <= self.depth:
            raise IndexError(f"C_{n} is outside the stored prefix 1..{self.depth}")
        return self.C[n - 1]

    def truncate(self, n: int) -> "CFSequence":
        return CFSequence(self.group, self.F[: n + 1], self.C[:n])

    def __repr__(self):
        return f"CFSequence({self.group!r}, N={self.depth})"


@dataclass
class Clause:
    name: str
    level: int
    ok: bool
    detail: str = ""


@dataclass
class ValidationReport:
    clauses: list
    identity_in_F: list
    identity_in_C: list
    mass: list
    action_prefix: dict = field(default_factory=dict)
    folner: dict = field(default_factory=dict)

    @property
    def violations(self) -> list:
        return [c for c in self.clauses if not c.ok]

    @property
    def accepted(self) -> bool:
        return not self.violations

    @property
    def structural_ok(self) -> bool:
        return all(c.ok for c in self.clauses if c.name != "C-size")

    @property
    def normalized(self) -> bool:
        return all(self.identity_in_F) and all(self.identity_in_C)

    def failed(self, name: str) -> list:
        return [c.level for c in self.violations if c.name == name]


STRUCTURAL = ("F0-singleton", "inclusion", "disjointness")


def _check_levels(seq: CFSequence) -> list:
    group = seq.group
    mul = group.mul
    clauses = [Clause("F0-singleton", 0, len(seq.F[0]) == 1, f"#F0 = {len(seq.F[0])}")]
    for n in range(1, seq.depth + 1):
        C = seq.c(n)
        prev = seq.f(n - 1)
        cur = seq.f(n)
        clauses.append(Clause("C-size", n, len(C) > 1, f"#C{n} = {len(C)}"))
        outside = None
        for f in prev:
            for c in C:
                if mul(f, c) not in cur:
                    outside = (f, c)
                    break
            if outside:
                break
        clauses.append(
            Clause("inclusion", n, outside is None, "" if outside is None else f"{outside[0]!r}*{outside[1]!r} not in F{n}")
        )
        hit = product_collision(group, prev, C)
        detail = ""
        if hit:
            (f1, c1), (f2, c2), p = hit
            detail = f"F{n - 1}*{c1!r} and F{n - 1}*{c2!r} share {p!r}"
        clauses.append(Clause("disjointness", n, hit is None, detail))
    return clauses


def validate(seq: CFSequence, window: Iterable = ()) -> ValidationReport:
    """Check every structural clause on the stored prefix and gather diagnostics.

    ``window`` lists group elements for which the action-definedness prefix
    status and the Folner profile are added to the report.
    """
    from .space import action_definedness_diagnostic, folner_defect

    clauses = _check_levels(seq)
    e = seq.group.identity()
    report = ValidationReport(
        clauses=clauses,
        identity_in_F=[e in F for F in seq.F],
        identity_in_C=[e in C for C in seq.C],
        mass=_mass(seq),
    )
    structural = all(c.ok for c in clauses if c.name in STRUCTURAL)
    for g in window:
        seq.group.check(g)
        key = seq.group.encode(g)
        report.folner[key] = folner_defect(seq, g)
        if structural:
            first = {}
            for n in range(seq.depth):
                rows = action_definedness_diagnostic(seq, g, n)
                first[n] = next((r.m for r in rows if r.holds), None)
            report.action_prefix[key] = first
    return report


def require_structural(seq: CFSequence) -> None:
    bad = [c for c in _check_levels(seq) if c.name in STRUCTURAL and not c.ok]
    if bad:
        c = bad[0]
        raise ValidationError(f"sequence fails {c.name} at level {c.level}: {c.detail}")


def _mass(seq: CFSequence) -> list:
    out, denom = [], 1
    for n in range(seq.depth + 1):
        if n:
            denom *= len(seq.c(n))
        out.append(Fraction(len(seq.f(n)), denom))
    return out


def mass_profile(seq: CFSequence) -> list:
    """Exact masses #F_n / (#C_1 ... #C_n) for n = 0..N."""
    require_structural(seq)
    return _mass(seq)


def level_weight(seq: CFSequence, n: int) -> Fraction:
    """Measure of a single level-n cylinder [f]_n."""
    denom = 1
    for k in range(1, n + 1):
        denom *= len(seq.c(k))
    return Fraction(1, denom)


def product_block(seq: CFSequence, n: int, m: int) -> FiniteSubset:
    """C_{n+1} C_{n+2} ... C_m, asserting the product map is injective."""
    if not 0 <= n <= m <= seq.depth:
        raise PreconditionError(f"block ({n},{m}) outside prefix 0..{seq.depth}")
    block = set_product(seq.group, *(seq.c(k) for k in range(n + 1, m + 1)))
    expected = 1
    for k in range(n + 1, m + 1):
        expected *= len(seq.c(k))
    if len(block) != expected:
        raise InvariantViolation(f"block ({n},{m}) has {len(block)} elements, expected {expected}")
    return block


def block_factorizations(seq: CFSequence, n: int, m: int) -> dict:
    """Map each element of C_{n+1}...C_m to its unique coordinate tuple."""
    mul = seq.group.mul
    table = {seq.group.identity(): ()}
    for k in range(n + 1, m + 1):
        nxt = {}
        for p, cs in table.items():
            for c in seq.c(k):
                q = mul(p, c)
                if q in nxt:
                    raise InvariantViolation(f"block ({n},{m}) element {q!r} factors twice")
                nxt[q] = cs + (c,)
        table = nxt
    return table


def from_cutting_stacking(cuts: Sequence[int], spacers: Sequence[Sequence[int]], h1: int) -> CFSequence:
    """Integer sequence of a cutting-and-stacking construction.

    Level 1 is the single column of height ``h1``. Each later level cuts the
    current column into ``cuts[i]`` copies and inserts ``spacers[i][j]``
    spacer layers on top of copy j.
    """
    if len(cuts) != len(spacers):
        raise PreconditionError("cuts and spacers must have the same length")
    if h1 < 1:
        raise PreconditionError("h1 must be positive")
    Z = IntegerLine()
    F = [[0], range(h1)]
    C = [range(h1)]
    h = h1
    for r, s in zip(cuts, spacers):
        if r < 2 or len(s) != r or any(x < 0 for x in s):
            raise PreconditionError("each cut needs r >= 2 copies and r nonnegative spacer counts")
        C.append([i * h + sum(s[:i]) for i in range(r)])
        h = r * h + sum(s)
        F.append(range(h))
    return CFSequence(Z, F, C)


def odometer(d: Sequence[int]) -> CFSequence:
    """The odometer sequence for bases d = (1, d_1, ..., d_N)."""
    if not d or d[0] != 1 or any(x < 2 for x in d[1:]):
        raise PreconditionError("need d_0 = 1 and d_n >= 2")
    Z = IntegerLine()
    F, C = [[0]], []
    size = 1
    for x in d[1:]:
        C.append([size * j for j in range(x)])
        size *= x
        F.append(range(size))
    return CFSequence(Z, F, C)


@dataclass
class ShiftFamilyReport:
    seq: CFSequence
    beta: list
    alpha: list
    c_overlap: list
    f_overlap: list


def shift_family(base: CFSequence, beta: Sequence[int]) -> ShiftFamilyReport:
    """Overlap ratios of each C_n with its shift by beta_n, and of F_n with its shift by alpha_n."""
    if not isinstance(base.group, IntegerLine):
        raise DomainError("shift families are defined over the integers")
    if len(beta) != base.depth:
        raise PreconditionError(f"need {base.depth} shifts, got {len(beta)}")
    alpha = list(itertools.accumulate(beta))
    c_ratio, f_ratio = [], []
    for n in range(1, base.depth + 1):
        C, F = base.c(n).frozen, base.f(n).frozen
        c_ratio.append(Fraction(len({x + beta[n - 1] for x in C} & C), len(C)))
        f_ratio.append(Fraction(len({x + alpha[n - 1] for x in F} & F), len(F)))
    return ShiftFamilyReport(base, list(beta), alpha, c_ratio, f_ratio)


def arithmetic_family(r: int, depth: int) -> tuple:
    """Integer sequence with C_n an r-term progression of step h_{n-1} and one-step shifts."""
    seq = from_cutting_stacking([r] * (depth - 1), [[0] * r] * (depth - 1), r)
    beta = [1] + [len(seq.f(n)) for n in range(1, depth)]
    return seq, beta
