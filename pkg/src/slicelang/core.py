"""Core abstract syntax, runtime values, and types for Slice.

A Slice program manipulates pieces of a divisible good (the "cake",
modeled as the unit interval) through two query primitives: ``eval``
(an agent reports the value of an interval) and ``mark`` (an agent
returns a cut point realizing a target value).  Everything else is a
small first-order expression language: literals, primitive operators,
let-binding, tuples, projections, and conditionals.

All numbers are exact rationals (`fractions.Fraction`); the protocols
in the shipped corpus only ever produce rational constants, so no
floating point is needed anywhere in the evaluator.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

Rat = Fraction
Loc = tuple[int, int]  # (line, column), 1-based


class SliceError(Exception):
    """Base class for user-facing errors raised by this package."""

    def __init__(self, msg: str, loc: Optional[Loc] = None):
        self.msg = msg
        self.loc = loc
        super().__init__(self.render())

    def render(self) -> str:
        if self.loc is not None:
            return f"{self.loc[0]}:{self.loc[1]}: {self.msg}"
        return self.msg


@dataclass(frozen=True)
class Interval:
    """A closed subinterval of the unit interval, ``lo <= hi``."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if not (0 <= self.lo <= self.hi <= 1):
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


EMPTY_PIECE = Interval(0, 0)

# Runtime values: booleans, rationals, intervals, and tuples of values.
Value = Union[bool, Fraction, Interval, tuple]


def values_equal(a: Value, b: Value) -> bool:
    """Structural equality on values; bools never equal numbers."""
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    if isinstance(a, Interval) and isinstance(b, Interval):
        return a == b
    if isinstance(a, tuple) and isinstance(b, tuple):
        return len(a) == len(b) and all(values_equal(x, y) for x, y in zip(a, b))
    return False


def format_value(v: Value) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, Interval):
        return str(v)
    if isinstance(v, tuple):
        return "(" + ", ".join(format_value(x) for x in v) + ")"
    raise TypeError(f"not a value: {v!r}")


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Expr:
    pass


def _loc_field():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Lit(Expr):
    """A literal value (rational, boolean, or interval constant)."""

    value: Value
    loc: Optional[Loc] = _loc_field()

    def __post_init__(self):
        if isinstance(self.value, bool) or isinstance(self.value, Interval):
            return
        if isinstance(self.value, (int, Fraction)):
            object.__setattr__(self, "value", Fraction(self.value))
            return
        raise ValueError(f"bad literal: {self.value!r}")


@dataclass(frozen=True)
class Var(Expr):
    name: str
    loc: Optional[Loc] = _loc_field()


@dataclass(frozen=True)
class Op(Expr):
    """Application of a primitive operator from the fixed signature."""

    op: str
    args: tuple[Expr, ...]
    loc: Optional[Loc] = _loc_field()

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown operator {self.op!r}")
        if len(self.args) != OPS[self.op].arity:
            raise ValueError(f"operator {self.op!r} expects {OPS[self.op].arity} arguments")
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Let(Expr):
    name: str
    bound: Expr
    body: Expr
    loc: Optional[Loc] = _loc_field()


@dataclass(frozen=True)
class Tup(Expr):
    items: tuple[Expr, ...]
    loc: Optional[Loc] = _loc_field()

    def __post_init__(self):
        if len(self.items) < 2:
            raise ValueError("tuples have arity >= 2")
        object.__setattr__(self, "items", tuple(self.items))


@dataclass(frozen=True)
class Proj(Expr):
    """1-based projection out of a tuple."""

    index: int
    tup: Expr
    loc: Optional[Loc] = _loc_field()

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("projection indices are 1-based")


@dataclass(frozen=True)
class If(Expr):
    guard: Expr
    then: Expr
    orelse: Expr
    loc: Optional[Loc] = _loc_field()


@dataclass(frozen=True)
class Cake(Expr):
    loc: Optional[Loc] = _loc_field()


@dataclass(frozen=True)
class LeftEnd(Expr):
    arg: Expr
    loc: Optional[Loc] = _loc_field()


@dataclass(frozen=True)
class RightEnd(Expr):
    arg: Expr
    loc: Optional[Loc] = _loc_field()


@dataclass(frozen=True)
class Divide(Expr):
    """Split an interval in two at a cut position."""

    piece: Expr
    at: Expr
    loc: Optional[Loc] = _loc_field()


@dataclass(frozen=True)
class Mark(Expr):
    """Mark query: agent returns r with V_agent([start, r]) = target."""

    agent: int
    start: Expr
    target: Expr
    loc: Optional[Loc] = _loc_field()

    def __post_init__(self):
        if self.agent < 1:
            raise ValueError("agent indices are 1-based")


@dataclass(frozen=True)
class Eval(Expr):
    """Eval query: agent reports the value of an interval."""

    agent: int
    piece: Expr
    loc: Optional[Loc] = _loc_field()

    def __post_init__(self):
        if self.agent < 1:
            raise ValueError("agent indices are 1-based")


def children(e: Expr) -> tuple[Expr, ...]:
    """Direct subexpressions of e, in left-to-right evaluation order."""
    if isinstance(e, (Lit, Var, Cake)):
        return ()
    if isinstance(e, Op):
        return e.args
    if isinstance(e, Let):
        return (e.bound, e.body)
    if isinstance(e, Tup):
        return e.items
    if isinstance(e, Proj):
        return (e.tup,)
    if isinstance(e, If):
        return (e.guard, e.then, e.orelse)
    if isinstance(e, (LeftEnd, RightEnd)):
        return (e.arg,)
    if isinstance(e, Divide):
        return (e.piece, e.at)
    if isinstance(e, Mark):
        return (e.start, e.target)
    if isinstance(e, Eval):
        return (e.piece,)
    raise TypeError(f"not an expression: {e!r}")


def fv(e: Expr) -> frozenset[str]:
    """Free program variables of e under let-binding scope."""
    if isinstance(e, Var):
        return frozenset({e.name})
    if isinstance(e, Let):
        return fv(e.bound) | (fv(e.body) - {e.name})
    out: frozenset[str] = frozenset()
    for c in children(e):
        out |= fv(c)
    return out


def size(e: Expr) -> int:
    return 1 + sum(size(c) for c in children(e))


def agents_used(e: Expr) -> frozenset[int]:
    out: frozenset[int] = frozenset()
    if isinstance(e, (Mark, Eval)):
        out |= {e.agent}
    for c in children(e):
        out |= agents_used(c)
    return out


# ---------------------------------------------------------------------------
# Primitive operators
# ---------------------------------------------------------------------------

def _as_rat(v: Value) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, Fraction):
        raise TypeError(f"expected a number, got {format_value(v)}")
    return v


def _as_bool(v: Value) -> bool:
    if not isinstance(v, bool):
        raise TypeError(f"expected a boolean, got {format_value(v)}")
    return v


@dataclass(frozen=True)
class OpInfo:
    arity: int
    apply: "callable"


def _div(a: Value, b: Value) -> Fraction:
    d = _as_rat(b)
    if d == 0:
        raise ZeroDivisionError("division by zero")
    return _as_rat(a) / d


OPS: dict[str, OpInfo] = {
    "=": OpInfo(2, lambda a, b: values_equal(a, b)),
    "!=": OpInfo(2, lambda a, b: not values_equal(a, b)),
    ">=": OpInfo(2, lambda a, b: _as_rat(a) >= _as_rat(b)),
    "<=": OpInfo(2, lambda a, b: _as_rat(a) <= _as_rat(b)),
    ">": OpInfo(2, lambda a, b: _as_rat(a) > _as_rat(b)),
    "<": OpInfo(2, lambda a, b: _as_rat(a) < _as_rat(b)),
    "+": OpInfo(2, lambda a, b: _as_rat(a) + _as_rat(b)),
    "-": OpInfo(2, lambda a, b: _as_rat(a) - _as_rat(b)),
    "*": OpInfo(2, lambda a, b: _as_rat(a) * _as_rat(b)),
    "/": OpInfo(2, _div),
    "and": OpInfo(2, lambda a, b: _as_bool(a) and _as_bool(b)),
    "or": OpInfo(2, lambda a, b: _as_bool(a) or _as_bool(b)),
    "not": OpInfo(1, lambda a: not _as_bool(a)),
}

COMPARISON_OPS = {"=", "!=", ">=", "<=", ">", "<"}
ARITH_OPS = {"+", "-", "*", "/"}
BOOL_OPS = {"and", "or", "not"}


class AllocationShapeError(SliceError):
    """The output type of a protocol is not an allocation shape."""


def arity_of_output(e: Expr, n_agents: int) -> list[int]:
    """Number of intervals allocated to each agent, from the output type.

    The protocol's result must be an n_agents-tuple (or a bare interval
    when n_agents is 1) whose components are intervals or tuples of
    intervals; component ``a`` contributes ``k_a`` intervals.
    """
    from . import typecheck  # deferred: typecheck depends on core

    ty = typecheck.infer(e, ())
    comps: list
    if n_agents == 1:
        comps = [ty]
    else:
        if not isinstance(ty, typecheck.ProdTy) or len(ty.items) != n_agents:
            raise AllocationShapeError(
                f"output type {typecheck.format_ty(ty)} is not an allocation for {n_agents} agents")
        comps = list(ty.items)
    out = []
    for comp in comps:
        if comp is typecheck.INTERVAL:
            out.append(1)
        elif isinstance(comp, typecheck.ProdTy) and all(t is typecheck.INTERVAL for t in comp.items):
            out.append(len(comp.items))
        else:
            raise AllocationShapeError(
                f"allocation component has type {typecheck.format_ty(comp)}; expected intervals")
    return out
