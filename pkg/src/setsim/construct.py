"""Constructions: slice functions from supermodular ingredients, profile
similarities, and collision-preserving value transforms.

The central recipe normalizes an arbitrary supermodular g plus a
non-negative increasing modular m into a slice function f that is
supermodular, nonincreasing, non-negative and has f(empty) = 1:

    f(X) = N(V \\ X) / N(V),
    N(A) = g(A) - g(empty) - sum_{i in A} (g({i}) - g(empty)) + m(A).

Every such f arises this way, and decompose_shs inverts the construction.
Turning f into the similarity S(X,Y) = f(X ^ Y) always yields a
(pseudo)metric distance 1 - S.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import setfunctions as sf
from .catalog import SimilaritySpec
from .rational import Num, as_fraction
from .setfunctions import CardinalityProfile, PreconditionError, SetFunctionTable
from .sets import Subset, Universe

PGF_SUM_TOL = 1e-12


@dataclass(frozen=True)
class ModularSpec:
    """m(A) = offset + sum of weights over A; non-negative and increasing."""

    offset: Num
    weights: tuple[Num, ...]

    def __post_init__(self):
        if self.offset < 0:
            raise ValueError("offset must be non-negative")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be non-negative")

    @classmethod
    def zero(cls, n: int) -> "ModularSpec":
        return cls(0, (0,) * n)

    @property
    def size(self) -> int:
        return len(self.weights)

    def value_at(self, mask: int) -> Num:
        total = self.offset
        for i, w in enumerate(self.weights):
            if mask >> i & 1:
                total = total + w
        return total

    def __call__(self, x: Subset) -> Num:
        if x.universe.size != self.size:
            raise ValueError(f"modular spec is over {self.size} elements, got {x.universe.size}")
        return self.value_at(x.mask)

    def table(self, universe: Universe) -> SetFunctionTable:
        if universe.size != self.size:
            raise ValueError(f"modular spec is over {self.size} elements")
        return SetFunctionTable(universe, [self.value_at(m) for m in range(universe.n_subsets)])

    def to_json(self) -> dict:
        return {"offset": float(self.offset), "weights": [float(w) for w in self.weights]}

    @classmethod
    def from_json(cls, obj: dict) -> "ModularSpec":
        return cls(obj["offset"], tuple(obj["weights"]))


@dataclass(frozen=True)
class PGFSpec:
    """A power series with non-negative coefficients summing to 1, scaled by
    a dilution alpha in [0,1].

    Either finite support (coefficients p_0..p_d) or the named geometric
    family p_i = (1-ratio) * ratio^(i-1) on i >= 1, kept symbolic so both
    evaluation and sampling are exact.
    """

    coefficients: Optional[tuple] = None
    family: Optional[str] = None
    ratio: Optional[Num] = None
    alpha: Num = 1

    def __post_init__(self):
        if not 0 <= self.alpha <= 1:
            raise ValueError(f"alpha must lie in [0,1], got {self.alpha}")
        if (self.coefficients is None) == (self.family is None):
            raise ValueError("specify exactly one of coefficients or family")
        if self.coefficients is not None:
            if any(c < 0 for c in self.coefficients):
                raise ValueError("coefficients must be non-negative")
            total = sum(self.coefficients)
            if abs(total - 1) > PGF_SUM_TOL:
                raise ValueError(f"coefficients must sum to 1, got {total}")
        else:
            if self.family != "geometric":
                raise ValueError(f"unknown family {self.family!r}")
            if not 0 <= self.ratio < 1:
                raise ValueError(f"geometric ratio must lie in [0,1), got {self.ratio}")

    @classmethod
    def finite(cls, coefficients: Sequence[Num], alpha: Num = 1) -> "PGFSpec":
        return cls(coefficients=tuple(coefficients), alpha=alpha)

    @classmethod
    def geometric(cls, ratio: Num | str, alpha: Num = 1) -> "PGFSpec":
        return cls(family="geometric", ratio=as_fraction(ratio), alpha=alpha)

    @classmethod
    def identity(cls) -> "PGFSpec":
        return cls(coefficients=(0, 1))

    def value(self, x: Num) -> Num:
        """The series value p(x) for x in [0,1] (the alpha scale is applied
        by callers, so a PGFSpec composes like a plain function)."""
        if self.coefficients is not None:
            total = 0
            power = 1
            for c in self.coefficients:
                total = total + c * power
                power = power * x
            return total
        # geometric: sum_{i>=1} (1-r) r^(i-1) x^i = (1-r) x / (1 - r x)
        r = self.ratio
        return (1 - r) * x / (1 - r * x)

    def sample_index(self, u: float) -> int:
        """Inverse-CDF draw of the power index from one unit uniform."""
        if self.coefficients is not None:
            acc = 0.0
            for i, c in enumerate(self.coefficients):
                acc += float(c)
                if u < acc:
                    return i
            return len(self.coefficients) - 1
        r = float(self.ratio)
        if r == 0.0:
            return 1
        return 1 + int(math.log1p(-u) / math.log(r))

    def to_json(self) -> dict:
        if self.coefficients is not None:
            return {"alpha": float(self.alpha), "coeffs": [float(c) for c in self.coefficients]}
        return {"alpha": float(self.alpha), "family": "geometric", "ratio": float(self.ratio)}

    @classmethod
    def from_json(cls, obj: dict) -> "PGFSpec":
        alpha = obj.get("alpha", 1)
        if "coeffs" in obj:
            return cls.finite(tuple(obj["coeffs"]), alpha=alpha)
        if obj.get("family") == "geometric":
            return cls.geometric(obj["ratio"], alpha=alpha)
        raise ValueError("pgf spec needs 'coeffs' or family='geometric'")


def _require_slice_function(f: SetFunctionTable, tol: float, caller: str) -> None:
    if abs(f.values[0] - 1) > tol:
        raise PreconditionError(f"{caller}: f(empty) must be 1, got {f.values[0]!r}")
    if any(v < -tol for v in f.values):
        raise PreconditionError(f"{caller}: f must be non-negative")
    if sf.is_monotone(f, "nonincreasing", tol) is not None:
        raise PreconditionError(f"{caller}: f must be nonincreasing")
    if sf.is_supermodular(f, tol) is not None:
        raise PreconditionError(f"{caller}: f must be supermodular")


def shs_from_supermodular(
    g: SetFunctionTable, m: Optional[ModularSpec] = None, tol: float = sf.DEFAULT_TOL
) -> SetFunctionTable:
    """Normalize supermodular g plus modular m into a valid slice function.

    Submodular ingredients enter through their negative: pass g.negate().
    Fails when g is not supermodular or when the normalizer is zero (which
    happens only for modular g with zero m).  The result is verified
    post-hoc; a verification failure would be a bug, not bad input.
    """
    u = g.universe
    n = u.size
    if m is None:
        m = ModularSpec.zero(n)
    if m.size != n:
        raise ValueError(f"modular spec is over {m.size} elements, table over {n}")
    cert = sf.is_supermodular(g, tol)
    if cert is not None:
        raise PreconditionError(f"g is not supermodular (margin {float(cert.margin):g})")

    gv = g.values
    g0 = gv[0]
    singleton_gain = [gv[1 << i] - g0 for i in range(n)]

    def normalized(mask: int) -> Num:
        total = gv[mask] - g0 + m.value_at(mask)
        for i in range(n):
            if mask >> i & 1:
                total = total - singleton_gain[i]
        return total

    denom = normalized(u.full_mask)
    if denom == 0:
        raise PreconditionError(
            "normalizer is zero (g modular and m zero); perturb g or supply a nonzero m"
        )
    full = u.full_mask
    f = SetFunctionTable(u, [normalized(full ^ mask) / denom for mask in range(u.n_subsets)])
    try:
        _require_slice_function(f, tol, "construction output")
    except PreconditionError as exc:  # guaranteed by construction; reaching this is a bug
        raise RuntimeError(f"internal error: constructed table invalid: {exc}") from exc
    return f


def decompose_shs(
    f: SetFunctionTable, tol: float = sf.DEFAULT_TOL
) -> tuple[SetFunctionTable, ModularSpec]:
    """Invert the construction: recover (g_hat, m_hat) with
    shs_from_supermodular(g_hat, m_hat) == f exactly.

    m_hat matches f on V and V minus singletons; g_hat(X) = f(V\\X) - m_hat(X).
    """
    _require_slice_function(f, tol, "decompose")
    u = f.universe
    n = u.size
    full = u.full_mask
    fv = f.values
    # monotonicity/non-negativity held within tol; clamp float dust at zero
    offset = fv[full] if fv[full] > 0 else 0
    weights = tuple(
        w if w > 0 else 0 for w in (fv[full ^ (1 << i)] - fv[full] for i in range(n))
    )
    m_hat = ModularSpec(offset, weights)
    g_hat = SetFunctionTable(
        u, [fv[full ^ mask] - m_hat.value_at(mask) for mask in range(u.n_subsets)]
    )
    return g_hat, m_hat


def similarity_from_slice_function(
    f: SetFunctionTable, tol: float = sf.DEFAULT_TOL
) -> SimilaritySpec:
    """S(X, Y) = f(X ^ Y) as a custom-table similarity.

    Requires a valid slice function; 1 - S then satisfies the triangle
    inequality for every such f.
    """
    _require_slice_function(f, tol, "similarity_from_slice_function")
    size = f.universe.n_subsets
    rows = tuple(tuple(f.values[xm ^ ym] for ym in range(size)) for xm in range(size))
    return SimilaritySpec.from_table(rows)


def cshs_from_profile(h: CardinalityProfile | Sequence[Num]) -> SimilaritySpec:
    """S(X, Y) = h(|X ^ Y|) from a convex nonincreasing profile with h(0)=1.

    Each validity condition is checked separately so errors name what
    failed.  h may reach 0 (the linear Hamming profile does).
    """
    values = tuple(h.values if isinstance(h, CardinalityProfile) else h)
    if len(values) < 2:
        raise ValueError("profile needs at least two values")
    if values[0] != 1:
        raise ValueError(f"profile must satisfy h(0) = 1, got {values[0]!r}")
    if any(v < 0 for v in values):
        raise ValueError("profile must be non-negative")
    for i in range(1, len(values)):
        if values[i] > values[i - 1]:
            raise ValueError(f"profile must be nonincreasing; rises at index {i}")
    cert = sf.is_convex_profile(CardinalityProfile(values), 0.0)
    if cert is not None:
        raise ValueError(
            f"profile must be convex; second difference at index {cert.witness[0]} "
            f"is {-float(cert.margin):g}"
        )
    return SimilaritySpec.from_profile(values)


def pgf_transform(pgf: PGFSpec, spec: SimilaritySpec) -> SimilaritySpec:
    """Value-wise transform S'(X,Y) = alpha * p(S(X,Y)) off the diagonal.

    The diagonal stays exactly 1, so the output is again a similarity.
    Applied with alpha = 1 to a supermodular similarity the result
    classifies supermodular again.
    """
    if not isinstance(pgf, PGFSpec):
        raise TypeError("expected a PGFSpec")
    return SimilaritySpec.transformed(spec, pgf)


@dataclass(frozen=True)
class PGFCheck:
    """Whether a coefficient list is a diluted PGF (all >= 0, sum <= 1)."""

    ok: bool
    alpha: Optional[Num] = None
    coefficients: Optional[tuple] = None  # normalized to sum 1
    witness_index: Optional[int] = None
    reason: Optional[str] = None


def is_pgf_dilution(coefficients: Sequence[Num]) -> PGFCheck:
    """Check coefficients for non-negativity and total mass at most 1.

    On success returns the dilution alpha (the coefficient sum) and the
    normalized distribution; on failure the witness is the first negative
    index, or None when only the mass constraint fails.
    """
    coeffs = tuple(coefficients)
    for idx, c in enumerate(coeffs):
        if c < 0:
            return PGFCheck(False, witness_index=idx, reason=f"negative coefficient at {idx}")
    alpha = sum(coeffs)
    if alpha > 1 + PGF_SUM_TOL:
        return PGFCheck(False, reason=f"coefficient sum {float(alpha):g} exceeds 1")
    if alpha == 0:
        return PGFCheck(True, alpha=0, coefficients=(1,))
    return PGFCheck(True, alpha=alpha, coefficients=tuple(c / alpha for c in coeffs))


# The cubic 3/2 x^2 - 1/2 x^3: not a diluted PGF (negative cube term), yet
# composed with the linear Hamming profile it stays a valid convex profile.
CSHS_WITNESS_COEFFICIENTS = (Fraction(0), Fraction(0), Fraction(3, 2), Fraction(-1, 2))


@dataclass(frozen=True)
class CshsCounterexample:
    profile: CardinalityProfile
    similarity: SimilaritySpec
    pgf_check: PGFCheck
    coefficients: tuple


def cshs_counterexample(n: int) -> CshsCounterexample:
    """A profile similarity that no diluted-PGF transform of the linear
    Hamming profile can produce: h(x) = q(1 - x/n) with
    q(t) = 3/2 t^2 - 1/2 t^3."""

    def q(t: Fraction) -> Fraction:
        return Fraction(3, 2) * t * t - Fraction(1, 2) * t * t * t

    values = tuple(q(1 - Fraction(x, n)) for x in range(n + 1))
    profile = CardinalityProfile(values)
    spec = cshs_from_profile(profile)  # raises if the profile were invalid
    check = is_pgf_dilution(CSHS_WITNESS_COEFFICIENTS)
    return CshsCounterexample(profile, spec, check, CSHS_WITNESS_COEFFICIENTS)
