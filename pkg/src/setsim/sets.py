"""Finite base sets and bitmask-encoded subsets.

Elements of a universe of size n are the integers 1..n; a subset is a bit
mask where bit (e-1) encodes membership of element e.  All operations are
pure and values are immutable, so everything here is safe to share across
threads.
"""

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

MAX_UNIVERSE_SIZE = 24  # full power-set tables must fit in memory


class UniverseMismatchError(ValueError):
    """Two subsets from different universes were combined."""


@dataclass(frozen=True)
class Universe:
    """Base set {1, ..., size}."""

    size: int

    def __post_init__(self):
        if not isinstance(self.size, int) or not 1 <= self.size <= MAX_UNIVERSE_SIZE:
            raise ValueError(
                f"universe size must be an integer in [1, {MAX_UNIVERSE_SIZE}], got {self.size!r}"
            )

    @property
    def n_subsets(self) -> int:
        return 1 << self.size

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def subset(self, elements: Iterable[int] = ()) -> "Subset":
        mask = 0
        for e in elements:
            if not isinstance(e, int) or not 1 <= e <= self.size:
                raise ValueError(f"element {e!r} outside universe of size {self.size}")
            mask |= 1 << (e - 1)
        return Subset(self, mask)

    def from_mask(self, mask: int) -> "Subset":
        return Subset(self, mask)

    def empty(self) -> "Subset":
        return Subset(self, 0)

    def full(self) -> "Subset":
        return Subset(self, self.full_mask)

    def subsets(self) -> Iterator["Subset"]:
        """All 2^n subsets in ascending mask order."""
        for mask in range(self.n_subsets):
            yield Subset(self, mask)


@dataclass(frozen=True)
class Subset:
    """Immutable subset of a universe, encoded as a bit mask."""

    universe: Universe
    mask: int

    def __post_init__(self):
        if not isinstance(self.mask, int) or not 0 <= self.mask <= self.universe.full_mask:
            raise ValueError(
                f"mask {self.mask!r} has bits outside universe of size {self.universe.size}"
            )

    def _check(self, other: "Subset") -> None:
        if self.universe != other.universe:
            raise UniverseMismatchError(
                f"subsets belong to different universes "
                f"({self.universe.size} vs {other.universe.size})"
            )

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, element: int) -> bool:
        return 1 <= element <= self.universe.size and bool(self.mask >> (element - 1) & 1)

    def __or__(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset(self.universe, self.mask | other.mask)

    def __and__(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset(self.universe, self.mask & other.mask)

    def __sub__(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset(self.universe, self.mask & ~other.mask)

    def __xor__(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset(self.universe, self.mask ^ other.mask)

    def complement(self) -> "Subset":
        return Subset(self.universe, self.universe.full_mask ^ self.mask)

    def issubset(self, other: "Subset") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def add(self, element: int) -> "Subset":
        if not 1 <= element <= self.universe.size:
            raise ValueError(f"element {element!r} outside universe of size {self.universe.size}")
        return Subset(self.universe, self.mask | 1 << (element - 1))

    def elements(self) -> tuple[int, ...]:
        """Sorted element labels; this is also the serialization form."""
        return tuple(e for e in range(1, self.universe.size + 1) if self.mask >> (e - 1) & 1)

    def __repr__(self) -> str:
        return "{" + ",".join(str(e) for e in self.elements()) + "}"


class GreekCounts(NamedTuple):
    """The six region cardinalities induced by nested symmetric differences.

    For X, Y, Ytilde with X^Y a subset of X^Ytilde the universe splits into
    alpha=|X\\Y|, beta=|Y\\Ytilde|, zeta=|X&Ytilde|, delta=|Y\\X|,
    epsilon=|Ytilde\\Y| and eta=|complement of (X|Ytilde)|.
    """

    alpha: int
    beta: int
    zeta: int
    delta: int
    epsilon: int
    eta: int


def symmetric_difference(x: Subset, y: Subset) -> Subset:
    """Elements in exactly one of x, y."""
    return x ^ y


def greek_decompose(x: Subset, y: Subset, ytilde: Subset) -> GreekCounts:
    """Region cardinalities for a nested pair of symmetric differences.

    Requires (x ^ y) to be a subset of (x ^ ytilde); the counts then
    partition the universe: alpha+beta+zeta+delta+epsilon+eta = |V|.
    """
    x._check(y)
    x._check(ytilde)
    if not (x ^ y).issubset(x ^ ytilde):
        raise ValueError("nesting violated: x^y must be a subset of x^ytilde")
    return GreekCounts(
        alpha=len(x - y),
        beta=len(y - ytilde),
        zeta=len(x & ytilde),
        delta=len(y - x),
        epsilon=len(ytilde - y),
        eta=len((x | ytilde).complement()),
    )


def enumerate_subsets(universe: Universe) -> Iterator[Subset]:
    """All subsets, ascending mask order (deterministic)."""
    return universe.subsets()
