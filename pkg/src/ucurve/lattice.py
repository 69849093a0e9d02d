"""Boolean-lattice primitives.

Subsets of the ground set are plain ``int`` bit masks of width ``n``
(the instance degree). Bit ``i`` of a mask is feature ``i``; the textual
characteristic vector puts feature 0 in the leftmost character, so
``"1110"`` is the mask 0b0111. All solvers share this encoding.

The module provides adjacency, the textual form, restriction antichains
with interval coverage tests, and extraction of minimal/maximal elements
of the remaining search space.
"""

from __future__ import annotations

from typing import Iterable, Iterator

LOWER = "lower"
UPPER = "upper"

MAX_DEGREE = 64

# Coverage bitmaps cost 2**n bytes per restriction side; above this degree
# covers() falls back to scanning the antichain.
_ACCEL_MAX_DEGREE = 20


def check_degree(n: int) -> None:
    if not isinstance(n, int) or not 1 <= n <= MAX_DEGREE:
        raise ValueError(f"degree must be an int in 1..{MAX_DEGREE}, got {n!r}")


def check_element(x: int, n: int) -> None:
    """Raise ValueError unless x is a valid width-n element."""
    if x < 0 or x >> n:
        raise ValueError(f"element {x} out of range for degree {n}")


def full_set(n: int) -> int:
    """The mask containing all n features."""
    check_degree(n)
    return (1 << n) - 1


def render_element(x: int, n: int) -> str:
    """Characteristic vector of x, leftmost character is feature 0."""
    check_element(x, n)
    return "".join("1" if x >> i & 1 else "0" for i in range(n))


def parse_element(text: str, n: int | None = None) -> int:
    """Inverse of render_element; width is len(text) unless n pins it."""
    if n is not None and len(text) != n:
        raise ValueError(f"expected a width-{n} vector, got {text!r}")
    if not text or len(text) > MAX_DEGREE:
        raise ValueError(f"characteristic vector must have 1..{MAX_DEGREE} characters")
    x = 0
    for i, ch in enumerate(text):
        if ch == "1":
            x |= 1 << i
        elif ch != "0":
            raise ValueError(f"invalid characteristic vector {text!r}")
    return x


def adjacent_elements(x: int, n: int) -> list[int]:
    """All elements at Hamming distance one from x, ascending bit index."""
    check_element(x, n)
    return [x ^ (1 << b) for b in range(n)]


class RestrictionSet:
    """An antichain of subsets that removes intervals from the search space.

    With LOWER orientation each member R removes the interval from the empty
    set up to R; with UPPER orientation it removes the interval from R up to
    the full set. ``update`` keeps the member list an antichain: an element
    already covered is dropped, and inserting an element absorbs the members
    its interval swallows.

    A per-degree coverage bitmap makes ``covers`` O(1) for n <= 20; marking
    is incremental and touches each lattice element at most once over the
    set's lifetime (coverage only ever grows). Construction with
    ``accelerate=False`` forces the antichain-scan path instead.
    """

    __slots__ = ("orientation", "n", "members", "_full", "_cover")

    def __init__(
        self,
        orientation: str,
        n: int,
        members: Iterable[int] = (),
        accelerate: bool | None = None,
    ) -> None:
        if orientation not in (LOWER, UPPER):
            raise ValueError(f"orientation must be {LOWER!r} or {UPPER!r}")
        check_degree(n)
        self.orientation = orientation
        self.n = n
        self.members: list[int] = []
        self._full = (1 << n) - 1
        if accelerate is None:
            accelerate = n <= _ACCEL_MAX_DEGREE
        self._cover = bytearray(1 << n) if accelerate else None
        for m in members:
            self.update(m)

    def covers(self, x: int) -> bool:
        """True iff some member's interval contains x."""
        if x < 0 or x >> self.n:
            raise ValueError(f"element {x} out of range for degree {self.n}")
        cover = self._cover
        if cover is not None:
            return cover[x] != 0
        if self.orientation == LOWER:
            return any(x & ~r == 0 for r in self.members)
        return any(r & ~x == 0 for r in self.members)

    def update(self, x: int) -> None:
        """Insert x unless already covered; absorb members x dominates."""
        if self.covers(x):
            return
        if self.orientation == LOWER:
            # drop members properly contained in x
            self.members = [r for r in self.members if r & ~x]
            self.members.append(x)
            if self._cover is not None:
                self._mark_down(x)
        else:
            # drop members properly containing x
            self.members = [r for r in self.members if x & ~r]
            self.members.append(x)
            if self._cover is not None:
                self._mark_up(x)

    def _mark_down(self, x: int) -> None:
        cover = self._cover
        cover[x] = 1
        stack = [x]
        while stack:
            y = stack.pop()
            bits = y
            while bits:
                b = bits & -bits
                bits ^= b
                child = y ^ b
                if not cover[child]:
                    cover[child] = 1
                    stack.append(child)

    def _mark_up(self, x: int) -> None:
        cover = self._cover
        full = self._full
        cover[x] = 1
        stack = [x]
        while stack:
            y = stack.pop()
            bits = full & ~y
            while bits:
                b = bits & -bits
                bits ^= b
                parent = y | b
                if not cover[parent]:
                    cover[parent] = 1
                    stack.append(parent)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, x: int) -> bool:
        return x in self.members

    def copy(self) -> "RestrictionSet":
        dup = RestrictionSet(self.orientation, self.n, accelerate=False)
        dup.members = list(self.members)
        dup._cover = bytearray(self._cover) if self._cover is not None else None
        return dup

    def __repr__(self) -> str:
        vecs = [render_element(m, self.n) for m in self.members]
        return f"RestrictionSet({self.orientation}, n={self.n}, members={vecs})"


def in_current_space(r_lower: RestrictionSet, r_upper: RestrictionSet, x: int) -> bool:
    """True iff x survives both restriction collections."""
    if r_lower.orientation != LOWER or r_upper.orientation != UPPER:
        raise ValueError("in_current_space needs a LOWER and an UPPER collection")
    return not r_lower.covers(x) and not r_upper.covers(x)


def minimal_element(n: int, r_lower: RestrictionSet) -> int | None:
    """A minimal element of the space left by r_lower, or None if empty.

    Greedy descent from the full set: one ascending pass over the bits,
    clearing each bit whose removal keeps the element uncovered. Coverage is
    downward closed, so a removal that was covered stays covered as the
    element shrinks; the pass therefore ends at a fixpoint where every lower
    neighbour is covered, which is exactly minimality.
    """
    if r_lower.orientation != LOWER:
        raise ValueError("minimal_element needs a LOWER restriction collection")
    check_degree(n)
    x = (1 << n) - 1
    if r_lower.covers(x):
        return None
    for b in range(n):
        bit = 1 << b
        if x & bit:
            candidate = x ^ bit
            if not r_lower.covers(candidate):
                x = candidate
    return x


def maximal_element(n: int, r_upper: RestrictionSet) -> int | None:
    """Dual of minimal_element over the space left by r_upper."""
    if r_upper.orientation != UPPER:
        raise ValueError("maximal_element needs an UPPER restriction collection")
    check_degree(n)
    if r_upper.covers(0):
        return None
    x = 0
    for b in range(n):
        bit = 1 << b
        if not x & bit:
            candidate = x | bit
            if not r_upper.covers(candidate):
                x = candidate
    return x
