"""Concrete agent valuations: exact piecewise-constant densities.

A valuation assigns a rational value to every subinterval of the cake
by integrating a nonnegative step density that is normalized to total
mass 1.  Being piecewise-constant keeps every eval and mark query in
exact rational arithmetic: additivity holds on the nose, marks have
closed forms, and zero-density segments give the plateaus that make
mark queries genuinely non-deterministic.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .core import Interval, SliceError


class MarkInfeasible(Exception):
    """No mark exists: the target exceeds the value of [start, 1]."""


class ScriptedMarkInvalid(Exception):
    """A scripted mark does not realize the requested target value."""


@dataclass(frozen=True)
class PiecewiseValuation:
    """Step-density valuation on [0, 1].

    ``breakpoints`` is an ascending chain 0 = b0 < b1 < ... < bm = 1 and
    ``densities[i]`` is the (constant, nonnegative) density on
    ``(b_i, b_{i+1})``.  The total mass is exactly 1, so the whole cake
    has value 1, single points have value 0, and the value of a piece
    is additive in its parts.
    """

    breakpoints: tuple[Fraction, ...]
    densities: tuple[Fraction, ...]

    def __post_init__(self):
        bps = tuple(Fraction(b) for b in self.breakpoints)
        ds = tuple(Fraction(d) for d in self.densities)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "densities", ds)
        if len(bps) < 2 or len(ds) != len(bps) - 1:
            raise ValueError("need m+1 breakpoints and m densities")
        if bps[0] != 0 or bps[-1] != 1:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly ascending")
        if any(d < 0 for d in ds):
            raise ValueError("densities must be nonnegative")
        mass = sum(d * (b1 - b0) for d, b0, b1 in zip(ds, bps, bps[1:]))
        if mass != 1:
            raise ValueError(f"total mass is {mass}, expected 1")

    def segments(self):
        return zip(self.breakpoints, self.breakpoints[1:], self.densities)


def uniform() -> PiecewiseValuation:
    return PiecewiseValuation((Fraction(0), Fraction(1)), (Fraction(1),))


def value_of(v: PiecewiseValuation, piece: Union[Interval, tuple]) -> Fraction:
    """Exact value of an interval (or of each interval in a tuple, summed)."""
    if isinstance(piece, tuple):
        return sum((value_of(v, p) for p in piece), Fraction(0))
    lo, hi = piece.lo, piece.hi
    total = Fraction(0)
    for b0, b1, d in v.segments():
        overlap = min(hi, b1) - max(lo, b0)
        if overlap > 0:
            total += d * overlap
    return total


def _cum_from(v: PiecewiseValuation, start: Fraction, x: Fraction) -> Fraction:
    return value_of(v, Interval(start, x))


def mark_bounds(v: PiecewiseValuation, start: Fraction, target: Fraction) -> tuple[Fraction, Fraction]:
    """Infimum and supremum of the valid marks for the query, both attained.

    Valid marks are the r in [start, 1] with value_of(v, [start, r]) equal
    to the target; they form a closed interval because the cumulative
    value is continuous and monotone in r (constant exactly on
    zero-density plateaus).
    """
    start = Fraction(start)
    target = Fraction(target)
    if not (0 <= start <= 1):
        raise ValueError(f"mark start {start} outside [0, 1]")
    if target < 0 or target > value_of(v, Interval(start, 1)):
        raise MarkInfeasible(f"target {target} exceeds remaining value")

    # Leftmost: first r where the running integral reaches the target.
    acc = Fraction(0)
    leftmost: Optional[Fraction] = None
    if target == 0:
        leftmost = start
    else:
        for b0, b1, d in v.segments():
            lo = max(start, b0)
            if lo >= b1:
                continue
            seg = d * (b1 - lo)
            if acc + seg >= target:
                # acc < target here, so this segment has positive density
                leftmost = lo + (target - acc) / d
                break
            acc += seg
        if leftmost is None:
            leftmost = Fraction(1)

    # Rightmost: extend through any zero-density run after the leftmost mark.
    rightmost = leftmost
    for b0, b1, d in v.segments():
        if b1 <= rightmost:
            continue
        if d == 0:
            rightmost = b1
        else:
            break
    return leftmost, rightmost


@dataclass
class MarkPolicy:
    """How an agent picks a mark when several realize the target.

    ``leftmost`` and ``rightmost`` take the infimum/supremum of the
    feasible plateau; ``offset`` interpolates at a fixed fraction
    between the two; ``scripted`` replays a fixed list of marks and
    fails loudly if a scripted mark is not actually valid.
    """

    kind: str = "leftmost"
    offset: Optional[Fraction] = None
    script: list = field(default_factory=list)
    _cursor: int = field(default=0, repr=False)

    KINDS = ("leftmost", "rightmost", "offset", "scripted")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown mark policy {self.kind!r}")
        if self.kind == "offset":
            if self.offset is None or not (0 <= self.offset <= 1):
                raise ValueError("offset policy needs an offset in [0, 1]")

    def fresh(self) -> "MarkPolicy":
        """A copy with the script cursor rewound (scripts are consumed per run)."""
        return MarkPolicy(self.kind, self.offset, list(self.script))


LEFTMOST = MarkPolicy("leftmost")
RIGHTMOST = MarkPolicy("rightmost")


def scripted(marks: Sequence[Fraction]) -> MarkPolicy:
    return MarkPolicy("scripted", script=[Fraction(m) for m in marks])


def mark_of(v: PiecewiseValuation, start: Fraction, target: Fraction,
            policy: MarkPolicy = LEFTMOST) -> Fraction:
    """Answer a mark query, or raise MarkInfeasible.

    Returns r with value_of(v, [start, r]) == target, chosen within the
    feasible plateau according to the policy.
    """
    if policy.kind == "scripted":
        if policy._cursor >= len(policy.script):
            raise ScriptedMarkInvalid("mark script exhausted")
        r = policy.script[policy._cursor]
        policy._cursor += 1
        if not (Fraction(start) <= r <= 1):
            raise ScriptedMarkInvalid(f"scripted mark {r} outside [{start}, 1]")
        if value_of(v, Interval(Fraction(start), r)) != Fraction(target):
            raise ScriptedMarkInvalid(f"scripted mark {r} does not hit target {target}")
        return r
    lo, hi = mark_bounds(v, start, target)
    if policy.kind == "leftmost":
        return lo
    if policy.kind == "rightmost":
        return hi
    return lo + policy.offset * (hi - lo)


def random_valuation(seed: int, max_segments: int = 4) -> PiecewiseValuation:
    """Deterministic random step valuation for testing.

    Zero-density segments are drawn with sizeable probability so that
    sampled runs exercise non-unique marks; at least one segment always
    has positive density, and the densities are rescaled exactly so the
    total mass is 1.
    """
    if max_segments < 1:
        raise ValueError("max_segments must be >= 1")
    rng = random.Random(seed)
    m = rng.randint(1, max_segments)
    denom = max(16, 4 * max_segments)
    cuts = sorted(rng.sample(range(1, denom), m - 1)) if m > 1 else []
    bps = [Fraction(0)] + [Fraction(c, denom) for c in cuts] + [Fraction(1)]
    weights = [Fraction(0) if rng.random() < 0.25 else Fraction(rng.randint(1, 8)) for _ in range(m)]
    if all(w == 0 for w in weights):
        weights[rng.randrange(m)] = Fraction(rng.randint(1, 8))
    mass = sum(w * (b1 - b0) for w, b0, b1 in zip(weights, bps, bps[1:]))
    densities = [w / mass for w in weights]
    return PiecewiseValuation(tuple(bps), tuple(densities))


# ---------------------------------------------------------------------------
# Valuation profile files
# ---------------------------------------------------------------------------
# One agent per line: "b0 d1 b1 d2 ... bm" with rationals written p/q.

def parse_rational(tok: str) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise SliceError(f"bad rational {tok!r}: {exc}") from None


def parse_profile(text: str) -> list[PiecewiseValuation]:
    profile = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) < 3 or len(toks) % 2 == 0:
            raise SliceError("valuation line needs b0 d1 b1 ... bm", (lineno, 1))
        nums = [parse_rational(t) for t in toks]
        try:
            profile.append(PiecewiseValuation(tuple(nums[0::2]), tuple(nums[1::2])))
        except ValueError as exc:
            raise SliceError(str(exc), (lineno, 1)) from None
    return profile


def format_profile(profile: Sequence[PiecewiseValuation]) -> str:
    lines = []
    for v in profile:
        toks = [str(v.breakpoints[0])]
        for d, b in zip(v.densities, v.breakpoints[1:]):
            toks += [str(d), str(b)]
        lines.append(" ".join(toks))
    return "\n".join(lines) + "\n"
