"""Measurements as set partitions, paths, and their partial operations.

A measurement partitions a finite ground set of atomic outcome elements
into detectors (blocks).  A path picks one detector per step of a
measurement sequence whose first and last steps are atomic.  The partial
operations on paths are chaining, coarsening, their inverses unchaining
and refinement, reversal, and insertion.

Impossibility is thread-based: within each maximal segment of
consecutive measurements over the same ground set, an underlying atomic
element must survive every result.  A path is possible iff every such
segment has a nonempty intersection of its results; ``find_igps`` reports
the adjacent index pair at which the surviving element set first dies
out.  Possible paths reduce to a unique nonredundant normal form by
removing duplicated steps and splitting away result elements that no
thread can carry.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import (
    ChainMismatch,
    CoarsenMismatch,
    GroundSetTooLarge,
    ImpossiblePathHasNoNormalForm,
    InsertMismatch,
    NotAFactor,
    NotRefinable,
    TooManyPaths,
)

Block = frozenset

DEFAULT_GROUND_BOUND = 10
DEFAULT_PATH_BOUND = 10 ** 6


@dataclass(frozen=True)
class GroundSet:
    """A named, ordered finite set of atomic outcome element ids."""

    id: str
    elements: tuple

    def __post_init__(self):
        if not self.elements:
            raise ValueError("ground set must be nonempty")
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("ground set elements must be unique")

    def element_set(self) -> frozenset:
        return frozenset(self.elements)


@dataclass(frozen=True, eq=False)
class Measurement:
    """A partition of a ground set; each block is a detector.

    Identity is by outcome structure: two measurements are equal iff they
    have the same blocks.  The ``id`` is a display label only.
    """

    id: str
    ground: GroundSet
    blocks: frozenset

    def __post_init__(self):
        union = set()
        total = 0
        for block in self.blocks:
            if not block:
                raise ValueError("empty detector block")
            total += len(block)
            union |= block
        if union != set(self.ground.elements) or total != len(self.ground.elements):
            raise ValueError(
                f"blocks of {self.id!r} do not partition ground {self.ground.id!r}")

    def __eq__(self, other):
        return isinstance(other, Measurement) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        parts = ",".join("{" + ",".join(sorted(b)) + "}" for b in sorted_blocks(self.blocks))
        return f"Measurement({self.id}: {parts})"

    @property
    def is_atomic(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)

    @property
    def is_fully_coarse(self) -> bool:
        return len(self.blocks) == 1

    def element_set(self) -> frozenset:
        return self.ground.element_set()

    def block_containing(self, element: str) -> Block:
        for block in self.blocks:
            if element in block:
                return block
        raise KeyError(element)


def measurement(id: str, ground: GroundSet, blocks: Iterable[Iterable[str]]) -> Measurement:
    return Measurement(id, ground, frozenset(frozenset(b) for b in blocks))


def atomic_measurement(ground: GroundSet, id: Optional[str] = None) -> Measurement:
    return measurement(id or f"{ground.id}.atomic", ground,
                       ([e] for e in ground.elements))


def fully_coarse_measurement(ground: GroundSet, id: Optional[str] = None) -> Measurement:
    return measurement(id or f"{ground.id}.coarse", ground, [ground.elements])


def weakly_equivalent(m1: Measurement, m2: Measurement) -> bool:
    """True iff both measurements partition the same underlying element set."""
    return m1.element_set() == m2.element_set()


def equal_measurements(m1: Measurement, m2: Measurement) -> bool:
    """True iff the measurements have identical detector sets."""
    return m1.blocks == m2.blocks


@dataclass(frozen=True)
class MeasurementSequence:
    """An experiment: at least two measurements, atomic at both ends."""

    steps: tuple

    def __post_init__(self):
        if len(self.steps) < 2:
            raise ValueError("a sequence needs at least two measurements")
        if not self.steps[0].is_atomic or not self.steps[-1].is_atomic:
            raise ValueError("source and target measurements must be atomic")

    def __len__(self):
        return len(self.steps)

    def __repr__(self):
        return f"MeasurementSequence([{', '.join(m.id for m in self.steps)}])"


def sequence(steps: Iterable[Measurement]) -> MeasurementSequence:
    return MeasurementSequence(tuple(steps))


@dataclass(frozen=True)
class Path:
    """One chosen detector result per step of a measurement sequence."""

    sequence: MeasurementSequence
    results: tuple

    def __post_init__(self):
        steps = self.sequence.steps
        if len(self.results) != len(steps):
            raise ValueError("one result per measurement required")
        for m, r in zip(steps, self.results):
            if r not in m.blocks:
                raise ValueError(
                    f"result {set(r)} is not a detector of measurement {m.id!r}")

    @property
    def steps(self) -> tuple:
        return self.sequence.steps

    def __len__(self):
        return len(self.results)

    @property
    def source(self) -> Block:
        return self.results[0]

    @property
    def target(self) -> Block:
        return self.results[-1]

    def __repr__(self):
        parts = ",".join("{" + ",".join(sorted(r)) + "}" for r in self.results)
        return f"Path([{parts}])"


def path(steps: Iterable[Measurement], results: Iterable[Iterable[str]]) -> Path:
    return Path(sequence(steps), tuple(frozenset(r) for r in results))


@dataclass(frozen=True)
class PathClass:
    """Classification flags for a path."""

    cyclic: bool
    symmetric: bool
    trivial: bool
    possible: bool
    igps: tuple

    def to_json(self) -> dict:
        return {
            "cyclic": self.cyclic,
            "symmetric": self.symmetric,
            "trivial": self.trivial,
            "possible": self.possible,
            "igps": [list(p) for p in self.igps],
        }


# -- canonical serialization ----------------------------------------------------

def sorted_blocks(blocks: Iterable[Block]) -> list:
    return sorted(blocks, key=lambda b: sorted(b))


def measurement_to_json(m: Measurement) -> dict:
    return {
        "ground": sorted(m.ground.elements),
        "blocks": [sorted(b) for b in sorted_blocks(m.blocks)],
    }


def path_to_json(p: Path) -> dict:
    return {
        "steps": [measurement_to_json(m) for m in p.steps],
        "results": [sorted(r) for r in p.results],
    }


def path_key(p: Path):
    """A canonical sortable key; equal keys coincide with path equality."""
    return (
        tuple(tuple(sorted(r)) for r in p.results),
        tuple(tuple(tuple(sorted(b)) for b in sorted_blocks(m.blocks)) for m in p.steps),
    )


# -- weak-equivalence runs and impossibility ------------------------------------

def runs(p: Path) -> list:
    """Maximal segments [lo, hi] of consecutive steps over one ground set."""
    segments = []
    steps = p.steps
    lo = 0
    for j in range(1, len(steps)):
        if steps[j].element_set() != steps[lo].element_set():
            segments.append((lo, j - 1))
            lo = j
    segments.append((lo, len(steps) - 1))
    return segments


def find_igps(p: Path) -> tuple:
    """Impossibility witnesses as adjacent index pairs (j, j+1).

    Within each run of weakly equivalent steps the set of atomic elements
    that can have produced every result so far is intersected left to
    right; a pair is reported whenever that set dies out, and the scan
    restarts there.  The path is possible iff no pair is reported, which
    is equivalent to every run having a nonempty intersection of results.
    """
    reports = []
    for lo, hi in runs(p):
        alive = p.results[lo]
        for j in range(lo + 1, hi + 1):
            survived = alive & p.results[j]
            if survived:
                alive = survived
            else:
                reports.append((j - 1, j))
                alive = p.results[j]
    return tuple(reports)


def is_possible(p: Path) -> bool:
    return not find_igps(p)


# -- chaining and unchaining -----------------------------------------------------

def chain(a: Path, b: Path) -> Path:
    """Sequential composition sharing the junction step once."""
    if not equal_measurements(a.steps[-1], b.steps[0]):
        raise ChainMismatch("junction measurements differ")
    if a.results[-1] != b.results[0]:
        raise ChainMismatch("junction results differ")
    return Path(
        sequence(a.steps + b.steps[1:]),
        a.results + b.results[1:],
    )


def unchain_right(c: Path, b: Path) -> Path:
    """The unique a with chain(a, b) = c, where it exists."""
    cut = len(c) - len(b)
    if cut < 1:
        raise NotAFactor("suffix is too long to leave a prefix path")
    for m1, m2 in zip(c.steps[cut:], b.steps):
        if not equal_measurements(m1, m2):
            raise NotAFactor("suffix measurements do not match")
    if c.results[cut:] != b.results:
        raise NotAFactor("suffix results do not match")
    return Path(sequence(c.steps[:cut + 1]), c.results[:cut + 1])


def unchain_left(a: Path, c: Path) -> Path:
    """The unique b with chain(a, b) = c, where it exists."""
    cut = len(a) - 1
    if len(c) - cut < 2:
        raise NotAFactor("prefix is too long to leave a suffix path")
    for m1, m2 in zip(a.steps, c.steps[:cut + 1]):
        if not equal_measurements(m1, m2):
            raise NotAFactor("prefix measurements do not match")
    if a.results != c.results[:cut + 1]:
        raise NotAFactor("prefix results do not match")
    return Path(sequence(c.steps[cut:]), c.results[cut:])


# -- coarsening and refinement ----------------------------------------------------

def _coarsen_direct(a: Path, b: Path) -> Path:
    if len(a) != len(b):
        raise CoarsenMismatch("operands have different lengths")
    diff = [j for j in range(len(a)) if a.results[j] != b.results[j]]
    if len(diff) != 1:
        raise CoarsenMismatch(f"results differ at {len(diff)} steps, need exactly 1")
    j = diff[0]
    if j == 0 or j == len(a) - 1:
        raise CoarsenMismatch("cannot coarsen at the source or target")
    for k in range(len(a)):
        if k != j and not equal_measurements(a.steps[k], b.steps[k]):
            raise CoarsenMismatch("operands are over different measurement sequences")
    ra, rb = a.results[j], b.results[j]
    if ra & rb:
        raise CoarsenMismatch("results to merge are not disjoint")
    # The merge step tolerates operands whose measurements differ inside the
    # merged region (needed so that (a v b) v c aligns with c); everything
    # inside the merged block is forgotten, the rest must agree.
    merged = ra | rb
    outside = None
    for m in (a.steps[j], b.steps[j]):
        for blk in m.blocks:
            if blk & merged and not blk <= merged:
                raise CoarsenMismatch("a detector straddles the merged result")
        rest = frozenset(blk for blk in m.blocks if not blk & merged)
        if outside is None:
            outside = rest
        elif outside != rest:
            raise CoarsenMismatch("detectors outside the merged result disagree")
    old = a.steps[j]
    coarse = Measurement(old.id, old.ground, outside | {merged})
    steps = a.steps[:j] + (coarse,) + a.steps[j + 1:]
    return Path(sequence(steps), a.results[:j] + (merged,) + a.results[j + 1:])


def _dedup_fixpoint(p: Path) -> Path:
    while len(p) > 2:
        for j in range(len(p) - 1):
            if equal_measurements(p.steps[j], p.steps[j + 1]) \
                    and p.results[j] == p.results[j + 1]:
                p = Path(sequence(p.steps[:j] + p.steps[j + 1:]),
                         p.results[:j] + p.results[j + 1:])
                break
        else:
            return p
    return p


def _padded_variants(p: Path, target_len: int):
    """All paths obtained from p by duplicating steps to reach target_len."""
    extra = target_len - len(p)
    if extra < 0:
        return
    if extra == 0:
        yield p
        return
    for positions in itertools.combinations_with_replacement(range(len(p)), extra):
        steps = list(p.steps)
        results = list(p.results)
        for j in sorted(positions, reverse=True):
            steps.insert(j, steps[j])
            results.insert(j, results[j])
        yield Path(sequence(steps), tuple(results))


def coarsen(a: Path, b: Path) -> Path:
    """Merge the two disjoint results at the single step where a, b differ.

    If the operands do not align directly, the operation is retried on
    redundancy representatives: both are normalized (duplicate removal;
    full normal form for possible operands) and re-padded with duplicated
    steps up to a bounded extra length, and the first aligned pair wins.
    """
    try:
        return _coarsen_direct(a, b)
    except CoarsenMismatch:
        pass
    ra = normal_form(a) if is_possible(a) else _dedup_fixpoint(a)
    rb = normal_form(b) if is_possible(b) else _dedup_fixpoint(b)
    lo = max(len(ra), len(rb))
    hi = lo + max(len(a), len(b))
    for target in range(lo, hi + 1):
        for pa in _padded_variants(ra, target):
            for pb in _padded_variants(rb, target):
                try:
                    return _coarsen_direct(pa, pb)
                except CoarsenMismatch:
                    continue
    raise CoarsenMismatch("no redundancy representatives align for coarsening")


def refine(c: Path, b: Path) -> Path:
    """The unique a with coarsen(a, b) = c, where it exists."""
    if len(c) != len(b):
        raise NotRefinable("operands have different lengths")
    diff = [j for j in range(len(c))
            if c.results[j] != b.results[j]
            or not equal_measurements(c.steps[j], b.steps[j])]
    if len(diff) != 1:
        raise NotRefinable(f"operands differ at {len(diff)} steps, need exactly 1")
    j = diff[0]
    if j == 0 or j == len(c) - 1:
        raise NotRefinable("cannot refine at the source or target")
    rb, rc = b.results[j], c.results[j]
    if not (rb < rc):
        raise NotRefinable("refining result is not a proper subset")
    rest = rc - rb
    fine = b.steps[j]
    if rest not in fine.blocks:
        raise NotRefinable("split remainder is not a detector of the finer measurement")
    expected_coarse = (fine.blocks - {rb, rest}) | {rc}
    if c.steps[j].blocks != expected_coarse:
        raise NotRefinable("coarse measurement does not merge exactly the two results")
    return Path(b.sequence, c.results[:j] + (rest,) + c.results[j + 1:])


# -- reversal, insertion, factorization -------------------------------------------

def reverse(p: Path) -> Path:
    return Path(sequence(reversed(p.steps)), tuple(reversed(p.results)))


def insert_measurement(p: Path, j: int, m: Measurement, result) -> Path:
    """Insert a single measurement with its result before step j (interior)."""
    if not 1 <= j <= len(p) - 1:
        raise InsertMismatch(f"insertion index {j} outside 1..{len(p) - 1}")
    result = frozenset(result)
    if result not in m.blocks:
        raise InsertMismatch("result is not a detector of the inserted measurement")
    steps = p.steps[:j] + (m,) + p.steps[j:]
    return Path(sequence(steps), p.results[:j] + (result,) + p.results[j:])


def insert_cyclic(p: Path, j: int, x: Path) -> Path:
    """Splice a cyclic path at step j, whose measurement and result must match."""
    if not equal_measurements(x.steps[0], x.steps[-1]) or x.results[0] != x.results[-1]:
        raise InsertMismatch("inserted path is not cyclic")
    if not 0 <= j < len(p):
        raise InsertMismatch(f"junction index {j} out of range")
    if not equal_measurements(p.steps[j], x.steps[0]) or p.results[j] != x.results[0]:
        raise InsertMismatch("junction measurement or result does not match")
    steps = p.steps[:j] + x.steps + p.steps[j + 1:]
    results = p.results[:j] + x.results + p.results[j + 1:]
    return Path(sequence(steps), results)


def factorize(p: Path) -> list:
    """Split at every interior atomic step; the chain of factors equals p."""
    cuts = [0] + [j for j in range(1, len(p) - 1) if p.steps[j].is_atomic] \
        + [len(p) - 1]
    factors = []
    for lo, hi in zip(cuts, cuts[1:]):
        factors.append(Path(sequence(p.steps[lo:hi + 1]), p.results[lo:hi + 1]))
    return factors


# -- normal form -------------------------------------------------------------------

def _run_of(p: Path, j: int) -> tuple:
    for lo, hi in runs(p):
        if lo <= j <= hi:
            return lo, hi
    raise AssertionError("unreachable")


def _surviving_set(p: Path, j: int):
    """Intersection of all other results in j's run, or None if j is alone."""
    lo, hi = _run_of(p, j)
    if lo == hi:
        return None
    others = [p.results[k] for k in range(lo, hi + 1) if k != j]
    alive = others[0]
    for r in others[1:]:
        alive &= r
    return alive


def _live_blocks(p: Path, j: int) -> frozenset:
    """Non-result blocks of step j that carry a surviving thread element.

    Blocks disjoint from the run's surviving set can be re-blocked at will
    by coarsening and refining with impossible operands, so only these
    blocks (and the result) constrain what step j can be turned into.
    """
    alive = _surviving_set(p, j)
    return frozenset(b for b in p.steps[j].blocks
                     if b != p.results[j] and alive & b)


def _canonical_step(p: Path, k: int) -> Measurement:
    """Step k with its re-blockable dead region split into singletons."""
    old = p.steps[k]
    if not 1 <= k <= len(p) - 2:
        return old
    live = _live_blocks(p, k)
    kept = live | {p.results[k]}
    dead = old.element_set() - frozenset().union(*kept)
    if not dead:
        return old
    blocks = kept | frozenset(frozenset({d}) for d in dead)
    return Measurement(old.id, old.ground, blocks)


def _drop_at(p: Path, j: int, k: int) -> Path:
    """Remove step j, canonicalizing its surviving twin at index k."""
    survivor = _canonical_step(p, k)
    steps = list(p.steps)
    steps[k] = survivor
    del steps[j]
    results = p.results[:j] + p.results[j + 1:]
    return Path(sequence(steps), results)


def _drop_candidates(p: Path) -> list:
    """Pairs (j, k): step j is redundant next to its equal-result neighbor k.

    A step can be dropped when a weakly equivalent neighbor carries the
    same result and either an identical detector set, or (for interior
    steps) a detector set into which step j can be re-blocked: every live
    block of step j must be a detector of the neighbor.
    """
    if len(p) <= 2:
        return []
    out = []
    for j in range(len(p)):
        interior = 1 <= j <= len(p) - 2
        for k in (j - 1, j + 1):
            if not 0 <= k < len(p):
                continue
            if p.steps[j].element_set() != p.steps[k].element_set():
                continue
            if p.results[j] != p.results[k]:
                continue
            if equal_measurements(p.steps[j], p.steps[k]) or (
                    interior and _live_blocks(p, j) <= p.steps[k].blocks):
                out.append((j, k))
                break
    return out


def _strip_candidates(p: Path) -> list:
    out = []
    for j in range(1, len(p) - 1):
        alive = _surviving_set(p, j)
        if alive is None:
            continue
        removed = p.results[j] - alive
        if removed and p.results[j] - removed:
            out.append(j)
    return out


def _strip_at(p: Path, j: int) -> Path:
    alive = _surviving_set(p, j)
    removed = p.results[j] - alive
    keep = p.results[j] - removed
    old = p.steps[j]
    blocks = (old.blocks - {p.results[j]}) | {keep, removed}
    m = Measurement(old.id, old.ground, blocks)
    steps = p.steps[:j] + (m,) + p.steps[j + 1:]
    return Path(sequence(steps), p.results[:j] + (keep,) + p.results[j + 1:])


def reduction_steps(p: Path):
    """All single reduction moves from p: redundant-step drops and element strips."""
    for j, k in _drop_candidates(p):
        yield ("drop", j, _drop_at(p, j, k))
    for j in _strip_candidates(p):
        yield ("strip", j, _strip_at(p, j))


def normal_form(p: Path) -> Path:
    """The nonredundant representative of a possible path.

    Repeatedly strips from each interior result the elements that no
    surviving thread through its weak-equivalence run can carry (the
    result block splits in two), and drops steps that are redundant next
    to a weakly equivalent neighbor with the same result and a compatible
    detector structure, until no rule applies.  The reduction order does
    not affect the outcome.
    """
    if find_igps(p):
        raise ImpossiblePathHasNoNormalForm(repr(p))
    while True:
        drops = _drop_candidates(p)
        if drops:
            j, k = drops[0]
            p = _drop_at(p, j, k)
            continue
        strips = _strip_candidates(p)
        if strips:
            p = _strip_at(p, strips[0])
            continue
        return p


def equivalent(a: Path, b: Path) -> bool:
    """True iff both possible paths share the same nonredundant form."""
    return normal_form(a) == normal_form(b)


def classify(p: Path) -> PathClass:
    """Flags: cyclic on the raw endpoints, symmetric/trivial on the normal form."""
    igps = find_igps(p)
    possible = not igps
    cyclic = equal_measurements(p.steps[0], p.steps[-1]) \
        and p.results[0] == p.results[-1]
    base = normal_form(p) if possible else p
    symmetric = base == reverse(base)
    trivial = len(base) == 2 \
        and equal_measurements(base.steps[0], base.steps[1]) \
        and base.results[0] == base.results[1]
    return PathClass(cyclic=cyclic, symmetric=symmetric, trivial=trivial,
                     possible=possible, igps=igps)


# -- enumeration --------------------------------------------------------------------

def enumerate_partitions(ground: GroundSet, max_elements: int = DEFAULT_GROUND_BOUND) -> list:
    """All set partitions of the ground set, Bell(n) of them, in stable order."""
    n = len(ground.elements)
    if n > max_elements:
        raise GroundSetTooLarge(f"{n} elements exceeds bound {max_elements}")
    partitions = [[]]
    for element in ground.elements:
        grown = []
        for part in partitions:
            for i in range(len(part)):
                grown.append(part[:i] + [part[i] + [element]] + part[i + 1:])
            grown.append(part + [[element]])
        partitions = grown
    out = []
    for i, part in enumerate(partitions):
        out.append(measurement(f"{ground.id}#p{i}", ground, part))
    return out


def enumerate_paths(s: MeasurementSequence, max_paths: int = DEFAULT_PATH_BOUND) -> list:
    """All result combinations over the sequence, in block-sorted order."""
    count = 1
    for m in s.steps:
        count *= len(m.blocks)
    if count > max_paths:
        raise TooManyPaths(f"{count} paths exceeds bound {max_paths}")
    choices = [sorted_blocks(m.blocks) for m in s.steps]
    return [Path(s, combo) for combo in itertools.product(*choices)]
