"""Concrete countable groups with exact arithmetic.

Elements are plain immutable Python values so they hash, compare and sort
without wrappers:

* integer line: ``int``
* integer lattice of rank d: ``tuple`` of d ints
* free group of rank k: reduced word as a ``tuple`` of nonzero ints, where
  ``i`` stands for the i-th generator and ``-i`` for its inverse
* direct product: ``tuple`` of component elements

The total order used for canonical sorting is Python's native order on these
forms (integers numerically, tuples lexicographically).
"""
from __future__ import annotations

import re
from typing import Any

from .errors import DomainError, FormatError


class Group:
    kind = "abstract"

    def identity(self):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def is_element(self, a) -> bool:
        raise NotImplementedError

    def encode(self, a) -> str:
        raise NotImplementedError

    def decode(self, text: str):
        raise NotImplementedError

    def length(self, a) -> int:
        """Word length with respect to the standard generators."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def is_abelian(self) -> bool:
        return False

    def check(self, a):
        if not self.is_element(a):
            raise DomainError(f"{a!r} is not an element of {self}")
        return a

    def prod(self, items):
        out = self.identity()
        for x in items:
            out = self.mul(out, x)
        return out

    def key(self, a):
        return a

    def __eq__(self, other):
        return isinstance(other, Group) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self))


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


class IntegerLine(Group):
    kind = "IntegerLine"

    def identity(self):
        return 0

    def mul(self, a, b):
        return a + b

    def inv(self, a):
        return -a

    def is_element(self, a):
        return _is_int(a)

    def encode(self, a):
        return str(a)

    def decode(self, text):
        if not isinstance(text, str) or not re.fullmatch(r"-?(0|[1-9][0-9]*)", text) or text == "-0":
            raise FormatError(f"bad integer encoding {text!r}")
        return int(text)

    def length(self, a):
        return abs(a)

    def is_abelian(self):
        return True

    def to_dict(self):
        return {"kind": self.kind}

    def __repr__(self):
        return "IntegerLine()"


class IntegerLattice(Group):
    kind = "IntegerLattice"

    def __init__(self, rank: int):
        if not _is_int(rank) or rank < 1:
            raise DomainError("lattice rank must be a positive integer")
        self.rank = rank

    def identity(self):
        return (0,) * self.rank

    def mul(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def inv(self, a):
        return tuple(-x for x in a)

    def is_element(self, a):
        return isinstance(a, tuple) and len(a) == self.rank and all(_is_int(x) for x in a)

    def encode(self, a):
        return "(" + ",".join(str(x) for x in a) + ")"

    def decode(self, text):
        m = re.fullmatch(r"\((.*)\)", text or "")
        if not m:
            raise FormatError(f"bad vector encoding {text!r}")
        parts = m.group(1).split(",")
        if len(parts) != self.rank:
            raise FormatError(f"vector {text!r} has wrong rank")
        line = IntegerLine()
        return tuple(line.decode(p) for p in parts)

    def length(self, a):
        return sum(abs(x) for x in a)

    def is_abelian(self):
        return True

    def to_dict(self):
        return {"kind": self.kind, "rank": self.rank}

    def __repr__(self):
        return f"IntegerLattice({self.rank})"


class FreeGroup(Group):
    kind = "FreeGroup"

    def __init__(self, rank: int):
        if not _is_int(rank) or rank < 1:
            raise DomainError("free group rank must be a positive integer")
        if rank > 26:
            raise DomainError("free group rank is limited to 26 letters")
        self.rank = rank

    def identity(self):
        return ()

    def mul(self, a, b):
        i = 0
        n = min(len(a), len(b))
        while i < n and a[len(a) - 1 - i] == -b[i]:
            i += 1
        return a[: len(a) - i] + b[i:]

    def inv(self, a):
        return tuple(-x for x in reversed(a))

    def is_element(self, a):
        if not isinstance(a, tuple):
            return False
        for i, x in enumerate(a):
            if not _is_int(x) or x == 0 or abs(x) > self.rank:
                return False
            if i and a[i - 1] == -x:
                return False
        return True

    def reduce(self, letters) -> tuple:
        out: list[int] = []
        for x in letters:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return tuple(out)

    def encode(self, a):
        return "".join(chr(ord("a") + x - 1) if x > 0 else chr(ord("A") - x - 1) for x in a)

    def decode(self, text):
        if not isinstance(text, str):
            raise FormatError(f"bad word encoding {text!r}")
        letters = []
        for ch in text:
            if "a" <= ch <= "z":
                x = ord(ch) - ord("a") + 1
            elif "A" <= ch <= "Z":
                x = -(ord(ch) - ord("A") + 1)
            else:
                raise FormatError(f"bad letter {ch!r} in word {text!r}")
            if abs(x) > self.rank:
                raise FormatError(f"letter {ch!r} exceeds rank {self.rank}")
            letters.append(x)
        word = tuple(letters)
        if not self.is_element(word):
            raise FormatError(f"word {text!r} is not reduced")
        return word

    def length(self, a):
        return len(a)

    def to_dict(self):
        return {"kind": self.kind, "rank": self.rank}

    def __repr__(self):
        return f"FreeGroup({self.rank})"


class DirectProduct(Group):
    kind = "DirectProduct"

    def __init__(self, components):
        components = tuple(components)
        if len(components) < 2:
            raise DomainError("a direct product needs at least two components")
        for c in components:
            if not isinstance(c, Group):
                raise DomainError(f"{c!r} is not a group descriptor")
        self.components = components

    def identity(self):
        return tuple(c.identity() for c in self.components)

    def mul(self, a, b):
        return tuple(c.mul(x, y) for c, x, y in zip(self.components, a, b))

    def inv(self, a):
        return tuple(c.inv(x) for c, x in zip(self.components, a))

    def is_element(self, a):
        return (
            isinstance(a, tuple)
            and len(a) == len(self.components)
            and all(c.is_element(x) for c, x in zip(self.components, a))
        )

    def encode(self, a):
        return "<" + ";".join(c.encode(x) for c, x in zip(self.components, a)) + ">"

    def decode(self, text):
        if not isinstance(text, str) or not (text.startswith("<") and text.endswith(">")):
            raise FormatError(f"bad product encoding {text!r}")
        parts = _split_top(text[1:-1])
        if len(parts) != len(self.components):
            raise FormatError(f"product {text!r} has wrong number of components")
        return tuple(c.decode(p) for c, p in zip(self.components, parts))

    def length(self, a):
        return sum(c.length(x) for c, x in zip(self.components, a))

    def is_abelian(self):
        return all(c.is_abelian() for c in self.components)

    def to_dict(self):
        return {"kind": self.kind, "components": [c.to_dict() for c in self.components]}

    def __repr__(self):
        return "DirectProduct([" + ", ".join(repr(c) for c in self.components) + "])"


def _split_top(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "<":
            depth += 1
        elif ch == ">":
            depth -= 1
            if depth < 0:
                raise FormatError("unbalanced product brackets")
        if ch == ";" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise FormatError("unbalanced product brackets")
    parts.append("".join(cur))
    return parts


def group_from_dict(d: Any) -> Group:
    if not isinstance(d, dict) or "kind" not in d:
        raise FormatError(f"bad group descriptor {d!r}")
    kind = d["kind"]
    try:
        if kind == "IntegerLine":
            return IntegerLine()
        if kind == "IntegerLattice":
            return IntegerLattice(d["rank"])
        if kind == "FreeGroup":
            return FreeGroup(d["rank"])
        if kind == "DirectProduct":
            return DirectProduct(group_from_dict(c) for c in d["components"])
    except (KeyError, TypeError, DomainError) as exc:
        raise FormatError(f"bad group descriptor {d!r}: {exc}") from exc
    raise FormatError(f"unknown group kind {kind!r}")


def multiply(group: Group, a, b):
    group.check(a)
    group.check(b)
    return group.mul(a, b)


def inverse(group: Group, a):
    return group.inv(group.check(a))


def identity(group: Group):
    return group.identity()
