"""Weight sequences, Bernoulli label sampling, and the closed-form calculus.

An AlphaParams assigns a nonnegative weight to each integer index; indices
i > 0 feed positive blocks, i < 0 negative blocks, and 0 the singleton pool.
Everything downstream is a function of those weights: Newton and super-Newton
power sums, the fixed-point product formulas, Thoma characters, and the
classification of the induced random-subgroup law.

Two numeric modes exist and are never mixed inside one comparison: rational
(exact Fractions, the default for formulas and oracles) and float (for large
Monte Carlo runs).  Weights are finite-support by construction; infinite
tails are out of scope.

Monte Carlo estimators split a master seed into shard seeds through the
avalanche mix in ``seeding`` and merge shard hit counts by summation, so a
run is bit-reproducible for a fixed shard count.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, SizeLimitError
from .perms import CycleType, Permutation, cycle_type
from .seeding import child_seed, generator
from .young import SignedPartition, SignedYoungSubgroup

MODES = ("rational", "float")
FLOAT_SUM_TOL = 1e-12
EXHAUSTIVE_CELL_CAP = 10 ** 7


def _coerce(value, mode: str):
    if mode == "rational":
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        # floats go through their decimal repr, so "0.25" means 1/4, not the
        # nearest binary float; thirds must be written "1/3"
        return Fraction(str(value))
    return float(Fraction(str(value))) if isinstance(value, str) else float(value)


@dataclass(frozen=True)
class AlphaParams:
    """Finite-support weights by integer index.

    ``weights`` is stored sorted by index with zero entries dropped.  The
    constructor checks positivity and normalization but not the canonical
    ordering; ``validate`` produces the canonical form (descending weights
    reindexed 1,2,... and -1,-2,...).  Empirical estimates keep their
    observed indices, which is why non-canonical instances are legal.
    """

    weights: tuple[tuple[int, object], ...]
    mode: str = "rational"

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"unknown numeric mode {self.mode!r}")
        cleaned = []
        seen = set()
        for i, w in self.weights:
            i = int(i)
            if i in seen:
                raise DomainError(f"duplicate index {i}")
            seen.add(i)
            w = _coerce(w, self.mode)
            if w < 0:
                raise DomainError(f"negative weight {w} at index {i}")
            if w > 0:
                cleaned.append((i, w))
        if not cleaned:
            raise DomainError("empty support: no positive weight")
        cleaned.sort(key=lambda iw: iw[0])
        total = sum(w for _, w in cleaned)
        if self.mode == "rational":
            if total != 1:
                raise DomainError(f"weights sum to {total}, not 1")
        elif abs(total - 1.0) > FLOAT_SUM_TOL:
            raise DomainError(f"weights sum to {total!r}, not 1 within {FLOAT_SUM_TOL}")
        object.__setattr__(self, "weights", tuple(cleaned))

    def weight(self, i: int):
        for j, w in self.weights:
            if j == i:
                return w
        return Fraction(0) if self.mode == "rational" else 0.0

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.weights)

    @property
    def alpha0(self):
        return self.weight(0)

    def positive(self) -> tuple:
        return tuple(w for i, w in self.weights if i > 0)

    def negative(self) -> tuple:
        return tuple(w for i, w in self.weights if i < 0)

    def is_canonical(self) -> bool:
        pos = [(i, w) for i, w in self.weights if i > 0]
        neg = [(i, w) for i, w in self.weights if i < 0]
        ok_pos = ([i for i, _ in pos] == list(range(1, len(pos) + 1))
                  and all(pos[j][1] >= pos[j + 1][1] for j in range(len(pos) - 1)))
        ok_neg = ([i for i, _ in neg] == list(range(-len(neg), 0))
                  and all(neg[j][1] <= neg[j + 1][1] for j in range(len(neg) - 1)))
        return ok_pos and ok_neg

    def as_dict(self) -> dict[str, object]:
        out = {}
        for i, w in self.weights:
            out[str(i)] = f"{w.numerator}/{w.denominator}" if isinstance(w, Fraction) else w
        return out

    def to_json(self) -> dict:
        return {"weights": self.as_dict(), "mode": self.mode}


def validate(weights, mode: str = "rational") -> AlphaParams:
    """Canonicalize a weight map: positive-side weights sorted descending get
    indices 1,2,..., negative-side likewise at -1,-2,...; index 0 is kept.
    Original index names matter only through their sign."""
    if isinstance(weights, AlphaParams):
        mode = weights.mode
        items = list(weights.weights)
    elif isinstance(weights, dict):
        items = [(int(k), v) for k, v in weights.items()]
    else:
        items = [(int(i), v) for i, v in weights]
    probe = AlphaParams(tuple(items), mode)  # positivity + normalization
    pos = sorted((w for i, w in probe.weights if i > 0), reverse=True)
    neg = sorted((w for i, w in probe.weights if i < 0), reverse=True)
    out = [(i, w) for i, w in zip(itertools.count(1), pos)]
    out += [(-i, w) for i, w in zip(itertools.count(1), neg)]
    if probe.alpha0 > 0:
        out.append((0, probe.alpha0))
    return AlphaParams(tuple(out), mode)


def parse_alpha(source, mode: str = "rational") -> AlphaParams:
    """Accepts a weights dict, a JSON string, or a path to a JSON file.
    The JSON form is {"weights": {"1": "1/2", "-1": "1/4", ...}}; a bare
    weight map without the "weights" wrapper is accepted too."""
    if isinstance(source, AlphaParams):
        return validate(source)
    data = source
    if isinstance(source, str):
        if os.path.exists(source):
            with open(source) as fh:
                data = json.load(fh)
        else:
            try:
                data = json.loads(source)
            except json.JSONDecodeError as exc:
                raise DomainError(f"alpha is neither a file nor JSON: {exc}") from None
    if not isinstance(data, dict):
        raise DomainError("alpha JSON must be an object")
    if "weights" in data:
        data = data["weights"]
    try:
        items = {int(k): v for k, v in data.items()}
    except (TypeError, ValueError):
        raise DomainError("alpha keys must be integers") from None
    return validate(items, mode)


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class LabelSample:
    """An i.i.d. label vector for one window, tagged with its seed."""

    window: int
    labels: tuple[int, ...]
    seed: int

    def partition(self) -> SignedPartition:
        return SignedPartition(self.window, self.labels)

    def subgroup(self) -> SignedYoungSubgroup:
        return SignedYoungSubgroup(self.partition())


def _sampling_arrays(alpha: AlphaParams):
    values = np.array([i for i, _ in alpha.weights], dtype=np.int64)
    probs = np.array([float(w) for _, w in alpha.weights], dtype=np.float64)
    return values, np.cumsum(probs)


def sample_labels(alpha: AlphaParams, window: int, seed: int) -> LabelSample:
    """Draw window-many labels with the alpha marginal, deterministically.

    Thresholds are float even in rational mode; the sampled labels are still
    exact integers and the draw is reproducible from (alpha, window, seed).
    """
    if window < 1:
        raise DomainError("window must be at least 1")
    values, cum = _sampling_arrays(alpha)
    rng = generator(seed)
    u = rng.random(window)
    idx = np.searchsorted(cum, u, side="right")
    np.clip(idx, 0, len(values) - 1, out=idx)
    return LabelSample(window, tuple(int(v) for v in values[idx]), seed)


def sample_signed_young(alpha: AlphaParams, window: int, seed: int) -> SignedYoungSubgroup:
    return sample_labels(alpha, window, seed).subgroup()


# ---------------------------------------------------------------------------
# power sums and product formulas


def _one(alpha: AlphaParams):
    return Fraction(1) if alpha.mode == "rational" else 1.0


def newton_sum(alpha: AlphaParams, k: int):
    """p_k = sum of alpha_i^k over nonzero indices i."""
    if k < 2:
        raise DomainError("power sums are used for cycle lengths k >= 2")
    return sum((w ** k for i, w in alpha.weights if i != 0), _one(alpha) * 0)


def super_newton_sum(alpha: AlphaParams, k: int):
    """Signed power sum: positive indices count +alpha_i^k, negative indices
    count (-1)^(k-1) alpha_i^k."""
    if k < 2:
        raise DomainError("power sums are used for cycle lengths k >= 2")
    sign = 1 if k % 2 == 1 else -1
    return sum(((w ** k if i > 0 else sign * w ** k)
                for i, w in alpha.weights if i != 0), _one(alpha) * 0)


def _cycle_counts(g) -> tuple[tuple[int, int], ...]:
    if isinstance(g, CycleType):
        return g.items()
    if isinstance(g, Permutation):
        return cycle_type(g).items()
    raise DomainError(f"expected a Permutation or CycleType, got {type(g).__name__}")


def fixed_measure_paper(alpha: AlphaParams, g) -> object:
    """Product of p_k^(c_k) over the cycle type of g; 1 for the identity."""
    out = _one(alpha)
    for k, c in _cycle_counts(g):
        out *= newton_sum(alpha, k) ** c
    return out


def fixed_measure_full(alpha: AlphaParams, g) -> object:
    """Product of (p_k + alpha_0^k)^(c_k): per-cycle monochromaticity with
    the 0 label allowed (pool points may be permuted among themselves).
    Agrees with fixed_measure_paper exactly when alpha_0 = 0."""
    out = _one(alpha)
    a0 = alpha.alpha0
    for k, c in _cycle_counts(g):
        out *= (newton_sum(alpha, k) + a0 ** k) ** c
    return out


def thoma_character(alpha: AlphaParams, g) -> object:
    """Product of super-Newton sums over the cycle type; the character value
    of the permutation under the weights' extreme character."""
    out = _one(alpha)
    for k, c in _cycle_counts(g):
        out *= super_newton_sum(alpha, k) ** c
    return out


def exhaustive_fixed_probability(alpha: AlphaParams, g: Permutation) -> object:
    """Independent oracle: sum the weight of every label assignment of
    supp(g) whose cycles are all monochromatic.  No product factorization is
    used, so agreement with fixed_measure_full is a real check."""
    if not isinstance(g, Permutation):
        raise DomainError("exhaustive enumeration needs a concrete permutation")
    points = g.support
    support = alpha.support()
    cells = len(support) ** len(points)
    if cells > EXHAUSTIVE_CELL_CAP:
        raise SizeLimitError(
            f"{len(support)}^{len(points)} = {cells} label assignments exceed "
            f"the cap {EXHAUSTIVE_CELL_CAP}")
    cycles = [c for c in g.cycles() if len(c) > 1]
    pos = {x: i for i, x in enumerate(points)}
    weights = [w for _, w in alpha.weights]
    total = _one(alpha) * 0
    for assign in itertools.product(range(len(support)), repeat=len(points)):
        if any(any(assign[pos[x]] != assign[pos[cyc[0]]] for x in cyc[1:])
               for cyc in cycles):
            continue
        w = _one(alpha)
        for j in assign:
            w *= weights[j]
        total += w
    return total


# ---------------------------------------------------------------------------
# Monte Carlo fixed-point estimation


@dataclass(frozen=True)
class FactorRow:
    """Per-cycle-length factor of the two closed forms."""
    k: int
    count: int
    paper_factor: object
    full_factor: object


@dataclass(frozen=True)
class FixProbReport:
    cycle_type: CycleType
    factors: tuple[FactorRow, ...]
    paper_value: object
    full_value: object
    mc_estimate: object
    mc_stderr: float
    sample_count: int
    seed: int
    shards: int
    mode: str

    @property
    def discrepancy(self) -> bool:
        """True when the textbook product and the per-cycle computation with
        the 0 label differ (only possible with mass at index 0)."""
        return self.paper_value != self.full_value

    def to_json(self) -> dict:
        def enc(v):
            return f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else v
        return {
            "cycle_type": list(self.cycle_type.counts),
            "factors": [{"k": f.k, "count": f.count,
                         "paper_factor": enc(f.paper_factor),
                         "full_factor": enc(f.full_factor)} for f in self.factors],
            "paper_value": enc(self.paper_value),
            "full_value": enc(self.full_value),
            "mc_estimate": enc(self.mc_estimate),
            "mc_stderr": self.mc_stderr,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "shards": self.shards,
            "mode": self.mode,
            "discrepancy": self.discrepancy,
        }


DEFAULT_SHARDS = 8


def mc_fixed_probability(alpha: AlphaParams, g: Permutation, samples: int,
                         seed: int, *, shards: int = DEFAULT_SHARDS) -> FixProbReport:
    """Estimate the probability that every cycle of g is monochromatic.

    Labels are drawn only on supp(g): the event is measurable with respect
    to those coordinates, so the estimator has exactly the right law.  The
    master seed is split per shard and shard hit counts are summed.
    """
    if samples < 1:
        raise DomainError("sample count must be at least 1")
    if shards < 1:
        raise DomainError("shard count must be at least 1")
    points = g.support
    pos = {x: i for i, x in enumerate(points)}
    cycles = [[pos[x] for x in c] for c in g.cycles() if len(c) > 1]
    values, cum = _sampling_arrays(alpha)

    hits = 0
    base, extra = divmod(samples, shards)
    for shard in range(shards):
        m = base + (1 if shard < extra else 0)
        if m == 0:
            continue
        rng = generator(child_seed(seed, shard))
        if not points:
            hits += m
            continue
        u = rng.random((m, len(points)))
        idx = np.searchsorted(cum, u, side="right")
        np.clip(idx, 0, len(values) - 1, out=idx)
        ok = np.ones(m, dtype=bool)
        for cyc in cycles:
            first = idx[:, cyc[0]]
            for j in cyc[1:]:
                ok &= idx[:, j] == first
        hits += int(np.count_nonzero(ok))

    if alpha.mode == "rational":
        estimate = Fraction(hits, samples)
    else:
        estimate = hits / samples
    p = hits / samples
    stderr = math.sqrt(p * (1.0 - p) / samples)

    ct = cycle_type(g)
    a0 = alpha.alpha0
    factors = tuple(
        FactorRow(k, c, newton_sum(alpha, k) ** c,
                  (newton_sum(alpha, k) + a0 ** k) ** c)
        for k, c in ct.items())
    return FixProbReport(
        cycle_type=ct, factors=factors,
        paper_value=fixed_measure_paper(alpha, ct),
        full_value=fixed_measure_full(alpha, ct),
        mc_estimate=estimate, mc_stderr=stderr,
        sample_count=samples, seed=seed, shards=shards, mode=alpha.mode)


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class NuClassification:
    classification: str  # "TNF" or "RTNF-not-TNF"
    degenerate: str      # "identity" | "alternating" | "regular" | "none"
    atomic: bool

    @property
    def tnf(self) -> bool:
        return self.classification == "TNF"

    def to_json(self) -> dict:
        return {"classification": self.classification, "tnf": self.tnf,
                "degenerate": self.degenerate, "atomic": self.atomic}


def classify_nu(alpha: AlphaParams) -> NuClassification:
    """TNF exactly when all mass sits on positive indices; RTNF always.
    The three unit point masses are the degenerate (atomic) laws: all mass
    at one positive index is the full group, at one negative index the even
    subgroup, at index 0 the trivial subgroup."""
    tnf = all(i > 0 for i in alpha.support())
    degenerate = "none"
    if len(alpha.weights) == 1:
        (i, _w), = alpha.weights
        degenerate = "identity" if i > 0 else ("alternating" if i < 0 else "regular")
    return NuClassification(
        classification="TNF" if tnf else "RTNF-not-TNF",
        degenerate=degenerate,
        atomic=degenerate != "none")


@dataclass(frozen=True)
class SequenceActionClassification:
    classification: str
    symmetry_size: int
    repeated_weights: tuple

    @property
    def tnf(self) -> bool:
        return self.classification == "TNF"

    def to_json(self) -> dict:
        def enc(v):
            return f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else v
        return {"classification": self.classification, "tnf": self.tnf,
                "symmetry_size": self.symmetry_size,
                "repeated_weights": [[enc(w), c] for w, c in self.repeated_weights]}


def classify_sequence_action(alpha: AlphaParams) -> SequenceActionClassification:
    """The coordinate-permuting action on integer sequences is TNF exactly
    when the nonzero-index weights are pairwise distinct; a repeated weight
    of multiplicity c contributes a factor c! of value-relabeling symmetry."""
    nonzero = [w for i, w in alpha.weights if i != 0]
    counts: dict = {}
    for w in nonzero:
        counts[w] = counts.get(w, 0) + 1
    repeats = tuple(sorted(((w, c) for w, c in counts.items() if c > 1),
                           key=lambda wc: (-wc[1], -wc[0])))
    size = 1
    for _, c in repeats:
        size *= math.factorial(c)
    return SequenceActionClassification(
        classification="TNF" if size == 1 else "RTNF-not-TNF",
        symmetry_size=size,
        repeated_weights=repeats)


# ---------------------------------------------------------------------------
# empirical estimators


def definetti_estimate(sample: LabelSample) -> AlphaParams:
    """Empirical frequencies keyed by the observed label values; exact
    rationals summing to 1.  Deliberately not canonicalized, so estimates
    stay aligned with the true indices."""
    counts: dict[int, int] = {}
    for lab in sample.labels:
        counts[lab] = counts.get(lab, 0) + 1
    n = sample.window
    return AlphaParams(tuple(sorted((v, Fraction(c, n)) for v, c in counts.items())),
                       "rational")


def independence_check(alpha: AlphaParams, window: int, t: int, replicates: int,
                       seed: int) -> float:
    """Max absolute deviation of the joint law of t fixed coordinates from
    the product of their empirical marginals, across replicate windows."""
    if t < 1:
        raise DomainError("t must be at least 1")
    if t > 3:
        raise DomainError("t is capped at 3 coordinates")
    if window < t:
        raise DomainError(f"window {window} is smaller than t = {t}")
    s = len(alpha.weights)
    if s ** t > 1000:
        raise DomainError(f"{s}^{t} joint cells exceed the cap 1000")
    if replicates < 1:
        raise DomainError("replicate count must be at least 1")
    values, cum = _sampling_arrays(alpha)
    rng = generator(seed)
    u = rng.random((replicates, t))
    idx = np.searchsorted(cum, u, side="right")
    np.clip(idx, 0, s - 1, out=idx)

    code = np.zeros(replicates, dtype=np.int64)
    for j in range(t):
        code = code * s + idx[:, j]
    joint = np.bincount(code, minlength=s ** t) / replicates
    marginals = [np.bincount(idx[:, j], minlength=s) / replicates for j in range(t)]

    worst = 0.0
    for cell in itertools.product(range(s), repeat=t):
        flat = 0
        for j in range(t):
            flat = flat * s + cell[j]
        prod = 1.0
        for j in range(t):
            prod *= marginals[j][cell[j]]
        worst = max(worst, abs(float(joint[flat]) - prod))
    return worst


# ---------------------------------------------------------------------------
# matching overlap decay


def part_l_overlap(l: int, m: int) -> Fraction:
    """Probability that a fixed pair is a block of a uniform perfect
    matching on 2m points: 1/(2m-1).  Exact for block length 2 only; larger
    blocks are served by the Monte Carlo tensor estimate."""
    if m < 1:
        raise DomainError("m must be at least 1")
    if l != 2:
        raise DomainError(
            "exact overlap is implemented for block length 2 only; "
            "use part_l_overlap_mc for the tensor analog")
    return Fraction(1, 2 * m - 1)


def matching_overlap_bruteforce(m: int) -> Fraction:
    """Direct count over all perfect matchings of {1..2m}: the fraction
    containing the block {1,2}.  Independent of the closed form."""
    if m < 1:
        raise DomainError("m must be at least 1")
    if m > 8:
        raise SizeLimitError("brute-force matching enumeration is capped at m = 8")

    def matchings(points: tuple[int, ...]):
        if not points:
            yield ()
            return
        x = points[0]
        rest = points[1:]
        for j, y in enumerate(rest):
            for tail in matchings(rest[:j] + rest[j + 1:]):
                yield ((x, y),) + tail

    total = 0
    hits = 0
    for match in matchings(tuple(range(1, 2 * m + 1))):
        total += 1
        if (1, 2) in match:
            hits += 1
    return Fraction(hits, total)


def part_l_overlap_mc(l: int, m: int, samples: int, seed: int,
                      *, shards: int = DEFAULT_SHARDS) -> tuple[float, float]:
    """Monte Carlo estimate of the probability that the fixed tuple
    (1,...,l) forms one block of a uniform partition of l*m points into m
    blocks of size l.  Samples whole random arrangements and reads off block
    membership; returns (estimate, stderr)."""
    if l < 2:
        raise DomainError("block length must be at least 2")
    if m < 1:
        raise DomainError("m must be at least 1")
    if samples < 1:
        raise DomainError("sample count must be at least 1")
    n = l * m
    base_row = np.arange(n, dtype=np.int64)
    block_of_slot = np.repeat(np.arange(m, dtype=np.int64), l)

    hits = 0
    base, extra = divmod(samples, shards)
    for shard in range(shards):
        cnt = base + (1 if shard < extra else 0)
        if cnt == 0:
            continue
        rng = generator(child_seed(seed, shard))
        rows = rng.permuted(np.tile(base_row, (cnt, 1)), axis=1)
        # block index of each value: scatter slot blocks through the shuffle
        blocks = np.empty((cnt, n), dtype=np.int64)
        blocks[np.arange(cnt)[:, None], rows] = block_of_slot[None, :]
        ok = np.all(blocks[:, 1:l] == blocks[:, :1], axis=1)
        hits += int(np.count_nonzero(ok))

    p = hits / samples
    return p, math.sqrt(p * (1.0 - p) / samples)
