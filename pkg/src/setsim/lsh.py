"""Hash families whose collision probabilities equal the catalog similarities.

A family is a seeded sampler of deterministic hash functions: the pair
(seed, draw-index) always yields the same function, and hash values are
opaque 16-byte tokens that are only meaningfully compared within one draw.

Each draw's randomness is row `index` of a canonical uniform matrix produced
by a counter-based generator, so single-draw sampling and the vectorized
batch used for Monte-Carlo verification see identical draws.  Exact
collision probabilities come from enumerating the discrete outcome space
with rational branch weights, independent of any sampling.
"""

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable, Optional, Sequence

import numpy as np

from .catalog import SimilaritySpec, eval_similarity
from .construct import PGFSpec, pgf_transform
from .sets import Subset, Universe

HashFunction = Callable[[Subset], bytes]

MINHASH_EXACT_MAX = 8  # permutation enumeration is O(n! * 2^n)
ALL_PAIRS_MAX = 6


class NotLSHableError(ValueError):
    """No hash family with matching collision probabilities exists."""


class ExactUnsupportedError(ValueError):
    """The family's outcome space cannot be enumerated at this size."""


def _token(*parts) -> bytes:
    h = hashlib.blake2b(digest_size=16)
    for p in parts:
        h.update(repr(p).encode())
        h.update(b"\x1f")
    return h.digest()


def _child_seed(seed: int, tag) -> int:
    digest = hashlib.blake2b(repr((seed, tag)).encode(), digest_size=16).digest()
    return int.from_bytes(digest, "big")


def _philox(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed & (2**128 - 1)))


def _uniform_matrix(seed: int, samples: int, width: int) -> np.ndarray:
    return _philox(seed).random((samples, width))


def _uniform_row(seed: int, index: int, width: int) -> np.ndarray:
    # Row `index` of the canonical matrix; prefix regeneration keeps this
    # exactly equal to _uniform_matrix(seed, N, width)[index] for any N.
    if index < 0:
        raise ValueError("draw index must be non-negative")
    return _philox(seed).random((index + 1, width))[index]


class HashFamily:
    """Base class: a seeded, deterministic sampler of hash functions."""

    name: str
    universe: Universe
    target: SimilaritySpec
    width: int  # uniforms consumed per draw

    def sample(self, seed: int, index: int) -> HashFunction:
        """The hash function for one draw; deterministic in (seed, index)."""
        row = _uniform_row(seed, index, self.width)
        return self._function(seed, index, row)

    def _function(self, seed: int, index: int, row: np.ndarray) -> HashFunction:
        raise NotImplementedError

    def _tokens(self, seed: int, samples: int) -> np.ndarray:
        """(samples, 2^n) integer tokens; equality within a row mirrors the
        hash-value equality of the corresponding draw."""
        raise NotImplementedError

    def tokens(self, seed: int, samples: int) -> np.ndarray:
        cache = getattr(self, "_token_cache", None)
        if cache is None:
            cache = self._token_cache = {}
        key = (seed, samples)
        if key not in cache:
            cache[key] = self._tokens(seed, samples)
        return cache[key]

    def exact_collision(self, x: Subset, y: Subset) -> Fraction:
        raise ExactUnsupportedError(f"{self.name} has no exact enumeration")

    def _check_pair(self, x: Subset, y: Subset) -> None:
        if x.universe != self.universe or y.universe != self.universe:
            raise ValueError("subsets do not belong to this family's universe")


class MinHashFamily(HashFamily):
    """Uniform random permutation of V; h(X) is the first element of X in
    permutation order (sentinel for the empty set).  Collision probability
    equals the Jaccard similarity."""

    def __init__(self, universe: Universe):
        self.universe = universe
        self.name = "minhash"
        self.target = SimilaritySpec.named("jaccard")
        self.width = max(universe.size - 1, 1)
        self._exact_table: Optional[np.ndarray] = None

    def _ranks_from_row(self, row: np.ndarray) -> list[int]:
        # Fisher-Yates over 0-based element indices, one uniform per step.
        n = self.universe.size
        order = list(range(n))
        for step, i in enumerate(range(n - 1, 0, -1)):
            j = int(row[step] * (i + 1))
            order[i], order[j] = order[j], order[i]
        ranks = [0] * n
        for pos, e in enumerate(order):
            ranks[e] = pos
        return ranks

    def _function(self, seed, index, row):
        ranks = self._ranks_from_row(row)

        def h(x: Subset) -> bytes:
            self._check_pair(x, x)
            if x.mask == 0:
                return _token("minhash", "empty")
            first = min(x.elements(), key=lambda e: ranks[e - 1])
            return _token("minhash", "elem", first)

        return h

    def _tokens(self, seed, samples):
        n = self.universe.size
        size = self.universe.n_subsets
        u = _uniform_matrix(seed, samples, self.width)
        order = np.tile(np.arange(n, dtype=np.int32), (samples, 1))
        rows = np.arange(samples)
        for step, i in enumerate(range(n - 1, 0, -1)):
            j = (u[:, step] * (i + 1)).astype(np.int64)
            tmp = order[rows, i].copy()
            order[rows, i] = order[rows, j]
            order[rows, j] = tmp
        ranks = np.empty_like(order)
        ranks[rows[:, None], order] = np.arange(n, dtype=np.int32)[None, :]
        tokens = np.empty((samples, size), dtype=np.int32)
        tokens[:, 0] = n  # empty-set sentinel
        for mask in range(1, size):
            cols = [e for e in range(n) if mask >> e & 1]
            if len(cols) == 1:
                tokens[:, mask] = cols[0]
            else:
                sub = ranks[:, cols]
                tokens[:, mask] = np.asarray(cols, dtype=np.int32)[np.argmin(sub, axis=1)]
        return tokens

    def _permutation_table(self) -> np.ndarray:
        # First element (0-based) of every mask under every permutation.
        if self._exact_table is None:
            n = self.universe.size
            size = self.universe.n_subsets
            perms = np.array(list(permutations(range(n))), dtype=np.int32)
            ranks = np.empty_like(perms)
            ranks[np.arange(len(perms))[:, None], perms] = np.arange(n, dtype=np.int32)[None, :]
            table = np.empty((len(perms), size), dtype=np.int32)
            table[:, 0] = n
            for mask in range(1, size):
                cols = [e for e in range(n) if mask >> e & 1]
                if len(cols) == 1:
                    table[:, mask] = cols[0]
                else:
                    sub = ranks[:, cols]
                    table[:, mask] = np.asarray(cols, dtype=np.int32)[np.argmin(sub, axis=1)]
            self._exact_table = table
        return self._exact_table

    def exact_collision(self, x: Subset, y: Subset) -> Fraction:
        self._check_pair(x, y)
        if self.universe.size > MINHASH_EXACT_MAX:
            raise ExactUnsupportedError(
                f"minhash exact enumeration capped at n <= {MINHASH_EXACT_MAX}"
            )
        table = self._permutation_table()
        hits = int(np.count_nonzero(table[:, x.mask] == table[:, y.mask]))
        return Fraction(hits, table.shape[0])


class BitSamplingFamily(HashFamily):
    """Uniform element i of V; h(X) = [i in X].  Collision probability is
    the Hamming similarity 1 - |X ^ Y| / n."""

    def __init__(self, universe: Universe):
        self.universe = universe
        self.name = "bit_sampling"
        self.target = SimilaritySpec.named("hamming")
        self.width = 1

    def _element_from_row(self, row: np.ndarray) -> int:
        return min(int(row[0] * self.universe.size), self.universe.size - 1)

    def _function(self, seed, index, row):
        e = self._element_from_row(row) + 1

        def h(x: Subset) -> bytes:
            self._check_pair(x, x)
            return _token("bit", 1 if e in x else 0)

        return h

    def _tokens(self, seed, samples):
        n = self.universe.size
        u = _uniform_matrix(seed, samples, 1)
        idx = np.minimum((u[:, 0] * n).astype(np.int64), n - 1)
        masks = np.arange(self.universe.n_subsets, dtype=np.int64)
        return ((masks[None, :] >> idx[:, None]) & 1).astype(np.int8)

    def exact_collision(self, x: Subset, y: Subset) -> Fraction:
        self._check_pair(x, y)
        n = self.universe.size
        hits = sum(1 for i in range(n) if (x.mask >> i & 1) == (y.mask >> i & 1))
        return Fraction(hits, n)


class IntersectionFamily(HashFamily):
    """Mixture realizing the intersection-similarity encodings.

    With probability k*h, pick i in {1..k}: a token shared by all sets
    containing i, otherwise a token unique to the set's encoded identity.
    With probability x, a constant token; with the remaining 1 - x - k*h,
    the identity hash.  For distinct encoded identities the collision
    probability is x + h*|X & Y & {1..k}|; sets with equal encodings always
    collide, matching the encoding's unit similarity.
    """

    def __init__(self, x, hstep, k: int, nint: int, encoding: str):
        if encoding == "cardinality":
            self.target = SimilaritySpec.cardinality_intersection(x, hstep, k, nint)
        elif encoding == "identity":
            self.target = SimilaritySpec.identity_intersection(x, hstep, k, nint)
        else:
            raise ValueError(f"unknown encoding {encoding!r}")
        self.encoding = encoding
        self.x = self.target.x
        self.hstep = self.target.step
        self.k = k
        self.nint = nint
        self.universe = Universe(self.target.required_universe_size())
        self.name = f"intersection_{encoding}"
        self.width = 1
        size = self.universe.n_subsets
        canon: dict = {}
        self._canon_id = []
        for mask in range(size):
            key = self._canon_key(mask)
            self._canon_id.append(canon.setdefault(key, len(canon)))

    def _canon_key(self, mask: int):
        if self.encoding == "identity":
            return mask
        kmask = (1 << self.k) - 1
        return (mask & kmask, (mask >> self.k).bit_count())

    def _branch_from_row(self, row: np.ndarray) -> int:
        # -1 = constant, 0..k-1 = shared-element branches, k = identity.
        u = float(row[0])
        xf, hf = float(self.x), float(self.hstep)
        if u < xf:
            return -1
        if hf > 0 and u < xf + self.k * hf:
            return min(int((u - xf) / hf), self.k - 1)
        return self.k

    def _function(self, seed, index, row):
        branch = self._branch_from_row(row)

        def h(x: Subset) -> bytes:
            self._check_pair(x, x)
            if branch == -1:
                return _token("intersection", "const")
            if 0 <= branch < self.k and (branch + 1) in x:
                return _token("intersection", "shared", branch)
            return _token("intersection", "unique", seed, index, self._canon_key(x.mask))

        return h

    def _tokens(self, seed, samples):
        size = self.universe.n_subsets
        u = _uniform_matrix(seed, samples, 1)[:, 0]
        xf, hf = float(self.x), float(self.hstep)
        const_rows = u < xf
        if hf > 0:
            branch = np.minimum(((u - xf) / hf).astype(np.int64), self.k - 1)
        else:
            branch = np.full(samples, self.k, dtype=np.int64)
        branch = np.where(const_rows, -1, np.where(u < xf + self.k * hf, branch, self.k))
        canon_ids = 2 + np.asarray(self._canon_id, dtype=np.int32)
        tokens = np.tile(canon_ids, (samples, 1))
        tokens[const_rows] = 0
        masks = np.arange(size, dtype=np.int64)
        for b in range(self.k):
            rows = branch == b
            if rows.any():
                member = ((masks >> b) & 1).astype(bool)
                tokens[np.ix_(rows, member)] = 1
        return tokens

    def exact_collision(self, x: Subset, y: Subset) -> Fraction:
        self._check_pair(x, y)
        if self._canon_key(x.mask) == self._canon_key(y.mask):
            return Fraction(1)
        total = Fraction(self.x)
        for b in range(self.k):
            if (x.mask >> b) & (y.mask >> b) & 1:
                total += Fraction(self.hstep)
        return total


class PgfComposedFamily(HashFamily):
    """Compose a base family through a diluted PGF.

    Each draw samples a power index i from the PGF and tuples i independent
    base draws (i = 0 gives a constant token); with probability 1 - alpha
    the draw is instead a fresh-token hash, keyed on (seed, draw, input), so
    distinct inputs never collide while equal inputs still do.  Collision
    probability for X != Y is alpha * sum_i p_i * S(X,Y)^i.
    """

    def __init__(self, base: HashFamily, pgf: PGFSpec):
        self.base = base
        self.pgf = pgf
        self.universe = base.universe
        self.name = f"pgf({base.name})"
        self.target = pgf_transform(pgf, base.target)
        self.width = 2

    def _function(self, seed, index, row):
        diluted = float(row[0]) >= float(self.pgf.alpha)
        power = self.pgf.sample_index(float(row[1]))

        if diluted:

            def h(x: Subset) -> bytes:
                self._check_pair(x, x)
                return _token("pgf", "fresh", seed, index, x.mask)

            return h

        if power == 0:

            def h0(x: Subset) -> bytes:
                self._check_pair(x, x)
                return _token("pgf", "const")

            return h0

        parts = [self.base.sample(_child_seed(seed, ("slot", s)), index) for s in range(power)]

        def hp(x: Subset) -> bytes:
            return _token("pgf", "tuple", tuple(p(x) for p in parts))

        return hp

    def _power_indices(self, u: np.ndarray) -> np.ndarray:
        pgf = self.pgf
        if pgf.coefficients is not None:
            cum = np.cumsum(np.asarray([float(c) for c in pgf.coefficients]))
            return np.minimum(
                np.searchsorted(cum, u, side="right"), len(pgf.coefficients) - 1
            ).astype(np.int64)
        r = float(pgf.ratio)
        if r == 0.0:
            return np.ones(len(u), dtype=np.int64)
        return 1 + (np.log1p(-u) / math.log(r)).astype(np.int64)

    def _tokens(self, seed, samples):
        size = self.universe.n_subsets
        u = _uniform_matrix(seed, samples, 2)
        diluted = u[:, 0] >= float(self.pgf.alpha)
        powers = self._power_indices(u[:, 1])
        effective = np.where(diluted, 0, powers)
        tokens = np.empty((samples, size), dtype=np.int64)
        tokens[diluted] = np.arange(size, dtype=np.int64)  # fresh: injective per row
        tokens[(~diluted) & (powers == 0)] = -1  # constant per row
        combined = None
        for s in range(int(effective.max())):
            ts = self.base._tokens(_child_seed(seed, ("slot", s)), samples).astype(np.int64)
            if combined is None:
                combined = ts
            else:
                merged = combined * (int(ts.max()) + 1) + ts
                _, inverse = np.unique(merged, return_inverse=True)
                combined = inverse.reshape(merged.shape)
            done = (~diluted) & (powers == s + 1)
            if done.any():
                tokens[done] = combined[done]
        return tokens

    def exact_collision(self, x: Subset, y: Subset) -> Fraction:
        self._check_pair(x, y)
        if x.mask == y.mask:
            return Fraction(1)
        base = self.base.exact_collision(x, y)
        pgf = self.pgf
        alpha = Fraction(pgf.alpha)
        if pgf.coefficients is not None:
            total = Fraction(0)
            power = Fraction(1)
            for c in pgf.coefficients:
                total += Fraction(c) * power
                power *= base
            return alpha * total
        r = Fraction(pgf.ratio)
        return alpha * (1 - r) * base / (1 - r * base)


def minhash_family(universe: Universe) -> MinHashFamily:
    return MinHashFamily(universe)


def bit_sampling_family(universe: Universe) -> BitSamplingFamily:
    return BitSamplingFamily(universe)


def intersection_family(x, hstep, k: int, nint: int, encoding: str) -> IntersectionFamily:
    return IntersectionFamily(x, hstep, k, nint, encoding)


def pgf_compose_family(base: HashFamily, pgf: PGFSpec) -> PgfComposedFamily:
    return PgfComposedFamily(base, pgf)


def family_for_similarity(spec: SimilaritySpec, universe: Optional[Universe] = None) -> HashFamily:
    """The hash family realizing a catalog similarity, when one exists."""
    kind = spec.kind
    if kind in ("cardinality_intersection", "identity_intersection"):
        return IntersectionFamily(
            spec.x, spec.step, spec.k, spec.nint, kind.removesuffix("_intersection")
        )
    if universe is None:
        raise ValueError(f"{spec.descriptor()} needs an explicit universe")
    if kind == "jaccard":
        return MinHashFamily(universe)
    if kind == "hamming":
        return BitSamplingFamily(universe)
    if kind in ("anderberg", "rogers_tanimoto", "sorensen_gamma", "sokal_sneath_gamma"):
        gamma = Fraction(2) if kind in ("anderberg", "rogers_tanimoto") else spec.gamma
        if gamma < 1:
            raise NotLSHableError(f"{spec.descriptor()} is not LSHable (needs gamma >= 1)")
        base: HashFamily
        if kind in ("anderberg", "sorensen_gamma"):
            base = MinHashFamily(universe)
        else:
            base = BitSamplingFamily(universe)
        return PgfComposedFamily(base, PGFSpec.geometric(1 - Fraction(1) / gamma))
    raise NotLSHableError(f"{spec.descriptor()} is not LSHable; no hash family exists for it")


@dataclass
class CollisionRow:
    x: Subset
    y: Subset
    target: float
    rate: float
    samples: int

    @property
    def stderr(self) -> float:
        return math.sqrt(self.rate * (1 - self.rate) / self.samples)

    @property
    def z(self) -> float:
        diff = self.rate - self.target
        if diff == 0:
            return 0.0
        if self.stderr == 0:
            return math.inf if diff > 0 else -math.inf
        return diff / self.stderr

    def to_json(self) -> dict:
        return {
            "X": list(self.x.elements()),
            "Y": list(self.y.elements()),
            "target": self.target,
            "rate": self.rate,
            "samples": self.samples,
            "stderr": self.stderr,
            "z": self.z,
        }


@dataclass
class CollisionReport:
    family: str
    similarity: str
    samples: int
    seed: int
    zmax: float
    rows: list[CollisionRow]

    @property
    def passed(self) -> bool:
        return all(abs(r.z) <= self.zmax for r in self.rows)

    @property
    def worst_z(self) -> float:
        return max((abs(r.z) for r in self.rows), default=0.0)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "similarity": self.similarity,
            "samples": self.samples,
            "seed": self.seed,
            "zmax": self.zmax,
            "passed": self.passed,
            "worst_z": self.worst_z,
            "rows": [r.to_json() for r in self.rows],
        }

    def to_text(self) -> str:
        lines = [
            f"family: {self.family}   similarity: {self.similarity}",
            f"samples: {self.samples}   seed: {self.seed}   zmax: {self.zmax}",
            f"{'X':<16}{'Y':<16}{'target':>10}{'rate':>10}{'stderr':>10}{'z':>9}",
        ]
        for r in self.rows:
            lines.append(
                f"{str(r.x):<16}{str(r.y):<16}{r.target:>10.6f}{r.rate:>10.6f}"
                f"{r.stderr:>10.6f}{r.z:>9.2f}"
            )
        lines.append(f"result: {'pass' if self.passed else 'FAIL'} (worst |z| = {self.worst_z:.2f})")
        return "\n".join(lines)


def empirical_collision(
    fam: HashFamily, x: Subset, y: Subset, samples: int, seed: int
) -> CollisionRow:
    """Collision fraction over `samples` draws, with the family's own target."""
    return _collision_row(fam, fam.target, x, y, samples, seed)


def _collision_row(fam, spec, x, y, samples, seed) -> CollisionRow:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    fam._check_pair(x, y)
    tokens = fam.tokens(seed, samples)
    hits = int(np.count_nonzero(tokens[:, x.mask] == tokens[:, y.mask]))
    target = float(eval_similarity(spec, x, y))
    return CollisionRow(x, y, target, hits / samples, samples)


def verify_lsh(
    fam: HashFamily,
    spec: Optional[SimilaritySpec] = None,
    pairs: Optional[Sequence[tuple[Subset, Subset]]] = None,
    samples: int = 100_000,
    seed: int = 0,
    zmax: float = 4.0,
) -> CollisionReport:
    """Monte-Carlo check that collision rates match a similarity.

    With no explicit pairs, all distinct unordered pairs of the family's
    universe are tested (capped at n <= 6).  Passes when every pair's
    |z| <= zmax.
    """
    if spec is None:
        spec = fam.target
    if pairs is None:
        u = fam.universe
        if u.size > ALL_PAIRS_MAX:
            raise ValueError(f"all-pairs verification capped at n <= {ALL_PAIRS_MAX}")
        pairs = [
            (u.from_mask(xm), u.from_mask(ym))
            for xm in range(u.n_subsets)
            for ym in range(xm + 1, u.n_subsets)
        ]
    rows = [_collision_row(fam, spec, x, y, samples, seed) for x, y in pairs]
    return CollisionReport(fam.name, spec.descriptor(), samples, seed, zmax, rows)


def exact_collision(fam: HashFamily, x: Subset, y: Subset) -> Fraction:
    """Exact collision probability by enumerating the family's outcomes."""
    return fam.exact_collision(x, y)


def load_pairs(path: str, universe: Universe) -> list[tuple[Subset, Subset]]:
    """Pairs from JSON: [{"X": [...], "Y": [...]}, ...]."""
    import json

    with open(path) as fh:
        data = json.load(fh)
    return [(universe.subset(row["X"]), universe.subset(row["Y"])) for row in data]
