"""Explicit set-function tables and exhaustive structure testers.

A set function is stored as a value per subset mask.  The testers enumerate
the defining inequalities and either pass or return a Certificate: the worst
violation found, replayable through the same inequality.

Submodularity is tested through second-order differences

    D(A, s, t) = f(A|{t}) - f(A) - f(A|{s,t}) + f(A|{s})    (s, t not in A)

which are >= 0 for submodular f and <= 0 for supermodular f.  Monotonicity
is checked on covering pairs (A, A|{x}) only, which is equivalent by
transitivity and keeps the loop at O(2^n * n).
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Literal, Optional, Sequence

from .rational import Num
from .sets import Subset, Universe

DEFAULT_TOL = 1e-9
MAX_TESTER_SIZE = 16  # tester loops are O(2^n * n^2)

CertificateKind = Literal[
    "submodularity",
    "supermodularity",
    "monotonicity",
    "modularity",
    "convexity",
    "triangle",
    "similarity-axiom",
]

Direction = Literal["nonincreasing", "nondecreasing"]


class PreconditionError(ValueError):
    """An operation's input failed a required property."""


@dataclass(frozen=True)
class Certificate:
    """A violation witness: the sets/indices involved and the margin.

    The margin is the magnitude by which the defining inequality fails;
    re-evaluating the inequality at the witness reproduces it exactly.
    """

    kind: CertificateKind
    witness: tuple
    margin: Num

    def to_json(self) -> dict:
        def enc(w):
            if isinstance(w, Subset):
                return list(w.elements())
            if isinstance(w, Fraction):
                return float(w)
            return w

        return {
            "kind": self.kind,
            "witness": [enc(w) for w in self.witness],
            "margin": float(self.margin),
        }


class SetFunctionTable:
    """Explicit table of f : P(V) -> R, indexed by subset mask."""

    def __init__(self, universe: Universe, values: Sequence[Num]):
        values = list(values)
        if len(values) != universe.n_subsets:
            raise ValueError(
                f"expected {universe.n_subsets} values for n={universe.size}, got {len(values)}"
            )
        for v in values:
            if isinstance(v, float) and not (v == v and abs(v) != float("inf")):
                raise ValueError(f"non-finite table entry {v!r}")
        self.universe = universe
        self.values = values

    @classmethod
    def from_function(cls, universe: Universe, fn: Callable[[Subset], Num]) -> "SetFunctionTable":
        return cls(universe, [fn(s) for s in universe.subsets()])

    @classmethod
    def from_cardinality(cls, universe: Universe, g: Sequence[Num]) -> "SetFunctionTable":
        if len(g) != universe.size + 1:
            raise ValueError(f"need {universe.size + 1} profile values, got {len(g)}")
        return cls(universe, [g[m.bit_count()] for m in range(universe.n_subsets)])

    def __call__(self, x: Subset) -> Num:
        if x.universe != self.universe:
            raise ValueError("subset belongs to a different universe")
        return self.values[x.mask]

    def negate(self) -> "SetFunctionTable":
        return SetFunctionTable(self.universe, [-v for v in self.values])

    def to_json(self) -> dict:
        return {"n": self.universe.size, "values": [float(v) for v in self.values]}

    @classmethod
    def from_json(cls, obj: dict) -> "SetFunctionTable":
        return cls(Universe(int(obj["n"])), obj["values"])

    @classmethod
    def load(cls, path: str) -> "SetFunctionTable":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class CardinalityProfile:
    """Values g(0..n) of a set function that depends only on cardinality."""

    values: tuple[Num, ...]

    def __post_init__(self):
        if len(self.values) < 1:
            raise ValueError("empty profile")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> Num:
        return self.values[k]


def second_order_difference(f: SetFunctionTable, a: Subset, s: int, t: int) -> Num:
    """f(A|{t}) - f(A) - f(A|{s,t}) + f(A|{s}) for s, t distinct and outside A."""
    if s == t:
        raise ValueError("s and t must be distinct")
    if s in a or t in a:
        raise ValueError("s and t must lie outside A")
    v = f.values
    am = a.mask
    sb, tb = 1 << (s - 1), 1 << (t - 1)
    return v[am | tb] - v[am] - v[am | sb | tb] + v[am | sb]


def _check_size(f: SetFunctionTable) -> None:
    if f.universe.size > MAX_TESTER_SIZE:
        raise ValueError(f"tester capped at n <= {MAX_TESTER_SIZE}, got n={f.universe.size}")


def _second_order_scan(f: SetFunctionTable, sign: int, tol: float, kind: CertificateKind):
    """Worst signed slack over all (A, s, t); slack < -tol means violation.

    sign=+1 tests submodularity (wants D >= 0), sign=-1 supermodularity.
    Deterministic: ascending A mask, then s < t, strict improvement only, so
    ties resolve to the lowest witness.
    """
    _check_size(f)
    n = f.universe.size
    u = f.universe
    v = f.values
    worst = None
    worst_witness = None
    for am in range(u.n_subsets):
        free = [e for e in range(1, n + 1) if not am >> (e - 1) & 1]
        for i, s in enumerate(free):
            sb = 1 << (s - 1)
            for t in free[i + 1 :]:
                tb = 1 << (t - 1)
                d = v[am | tb] - v[am] - v[am | sb | tb] + v[am | sb]
                slack = sign * d
                if worst is None or slack < worst:
                    worst = slack
                    worst_witness = (Subset(u, am), s, t)
    if worst is not None and worst < -tol:
        return Certificate(kind, worst_witness, -worst)
    return None


def is_submodular(f: SetFunctionTable, tol: float = DEFAULT_TOL) -> Optional[Certificate]:
    """None if every second-order difference is >= -tol, else the worst violation."""
    return _second_order_scan(f, +1, tol, "submodularity")


def is_supermodular(f: SetFunctionTable, tol: float = DEFAULT_TOL) -> Optional[Certificate]:
    """Supermodularity of f is submodularity of -f."""
    return _second_order_scan(f, -1, tol, "supermodularity")


def is_monotone(
    f: SetFunctionTable, direction: Direction = "nonincreasing", tol: float = DEFAULT_TOL
) -> Optional[Certificate]:
    """Check f(A) >= f(A|{x}) (nonincreasing) or <= (nondecreasing) on covering pairs."""
    _check_size(f)
    if direction not in ("nonincreasing", "nondecreasing"):
        raise ValueError(f"unknown direction {direction!r}")
    sign = 1 if direction == "nonincreasing" else -1
    u = f.universe
    v = f.values
    worst = None
    worst_witness = None
    for am in range(u.n_subsets):
        for e in range(1, u.size + 1):
            eb = 1 << (e - 1)
            if am & eb:
                continue
            slack = sign * (v[am] - v[am | eb])
            if worst is None or slack < worst:
                worst = slack
                worst_witness = (Subset(u, am), Subset(u, am | eb))
    if worst is not None and worst < -tol:
        return Certificate("monotonicity", worst_witness, -worst)
    return None


def is_modular(f: SetFunctionTable, tol: float = DEFAULT_TOL) -> Optional[Certificate]:
    """Modular = submodular and supermodular; returns the first failing side's witness."""
    return is_submodular(f, tol) or is_supermodular(f, tol)


def cardinality_profile_of(
    f: SetFunctionTable, tol: float = DEFAULT_TOL
) -> Optional[CardinalityProfile]:
    """The profile g with f(A) = g(|A|), or None if same-size values disagree."""
    n = f.universe.size
    profile: list = [None] * (n + 1)
    for mask, value in enumerate(f.values):
        k = mask.bit_count()
        if profile[k] is None:
            profile[k] = value
        elif abs(value - profile[k]) > tol:
            return None
    return CardinalityProfile(tuple(profile))


def is_convex_profile(g: CardinalityProfile, tol: float = DEFAULT_TOL) -> Optional[Certificate]:
    """Second differences g(x+1) - 2g(x) + g(x-1) must be >= -tol."""
    if len(g) < 2:
        raise ValueError("profile needs at least 2 values")
    worst = None
    worst_x = None
    for x in range(1, len(g) - 1):
        slack = g[x + 1] - 2 * g[x] + g[x - 1]
        if worst is None or slack < worst:
            worst = slack
            worst_x = x
    if worst is not None and worst < -tol:
        return Certificate("convexity", (worst_x,), -worst)
    return None


def product_supermodularity_check(
    f: SetFunctionTable, g: SetFunctionTable, tol: float = DEFAULT_TOL
) -> Optional[Certificate]:
    """Test supermodularity of the pointwise product of two set functions.

    Preconditions (verified, PreconditionError otherwise): f and g are
    non-negative, supermodular, and share a monotonicity direction.  Under
    those the product is always supermodular, so the expected return is None.
    """
    if f.universe != g.universe:
        raise ValueError("tables must share a universe")
    for name, table in (("f", f), ("g", g)):
        if any(v < -tol for v in table.values):
            raise PreconditionError(f"{name} is not non-negative")
        if is_supermodular(table, tol) is not None:
            raise PreconditionError(f"{name} is not supermodular")
    f_dirs = {d for d in ("nonincreasing", "nondecreasing") if is_monotone(f, d, tol) is None}
    g_dirs = {d for d in ("nonincreasing", "nondecreasing") if is_monotone(g, d, tol) is None}
    if not f_dirs:
        raise PreconditionError("f is not monotone in either direction")
    if not g_dirs:
        raise PreconditionError("g is not monotone in either direction")
    if not f_dirs & g_dirs:
        raise PreconditionError("f and g are monotone in opposite directions")
    product = SetFunctionTable(f.universe, [a * b for a, b in zip(f.values, g.values)])
    return is_supermodular(product, tol)
