"""Simple types for Slice expressions.

Base types are booleans, naturals, reals, positions (reals intended to
lie in the unit interval), and intervals, plus n-ary products.  The
system is deliberately loose about numbers: naturals and positions
coerce to reals, and any numeric expression is accepted where a
position is demanded -- cut points are validated dynamically by the
divide/mark side conditions, not statically.  A well-typed closed
program can only get stuck on those two side conditions.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from .core import (
    ARITH_OPS, BOOL_OPS, COMPARISON_OPS, Cake, Divide, Eval, Expr, If, Interval,
    LeftEnd, Let, Lit, Mark, Op, Proj, RightEnd, SliceError, Tup, Var,
)


class BaseTy(Enum):
    BOOL = "bool"
    NAT = "nat"
    REAL = "real"
    POS = "pos"
    INTERVAL = "interval"


BOOL = BaseTy.BOOL
NAT = BaseTy.NAT
REAL = BaseTy.REAL
POS = BaseTy.POS
INTERVAL = BaseTy.INTERVAL


@dataclass(frozen=True)
class ProdTy:
    items: tuple["Ty", ...]

    def __post_init__(self):
        if len(self.items) < 2:
            raise ValueError("products have arity >= 2")
        object.__setattr__(self, "items", tuple(self.items))


Ty = Union[BaseTy, ProdTy]

# Ordered variable->type bindings; the innermost (rightmost) wins.
TyCtx = tuple[tuple[str, Ty], ...]


class SliceTypeError(SliceError):
    pass


def format_ty(ty: Ty) -> str:
    if isinstance(ty, ProdTy):
        return "(" + " * ".join(format_ty(t) for t in ty.items) + ")"
    return ty.value


def lookup(ctx: TyCtx, name: str) -> Optional[Ty]:
    for n, ty in reversed(ctx):
        if n == name:
            return ty
    return None


def is_numeric(ty: Ty) -> bool:
    return ty in (NAT, REAL, POS)


def _join_numeric(a: Ty, b: Ty) -> Ty:
    return a if a == b else REAL


def join(a: Ty, b: Ty) -> Optional[Ty]:
    """Least common type of two branch types, or None if incompatible."""
    if a == b:
        return a
    if is_numeric(a) and is_numeric(b):
        return REAL
    if isinstance(a, ProdTy) and isinstance(b, ProdTy) and len(a.items) == len(b.items):
        joined = [join(x, y) for x, y in zip(a.items, b.items)]
        if any(j is None for j in joined):
            return None
        return ProdTy(tuple(joined))
    return None


def _nonzero_literal(e: Expr) -> bool:
    return isinstance(e, Lit) and isinstance(e.value, Fraction) and e.value != 0


def infer(e: Expr, ctx: TyCtx = (), n_agents: Optional[int] = None) -> Ty:
    """Infer the unique type of e, or raise SliceTypeError."""

    def err(msg: str, node: Expr):
        raise SliceTypeError(msg, getattr(node, "loc", None))

    def go(e: Expr, ctx: TyCtx) -> Ty:
        if isinstance(e, Lit):
            if isinstance(e.value, bool):
                return BOOL
            if isinstance(e.value, Interval):
                return INTERVAL
            v = e.value
            return NAT if v.denominator == 1 and v >= 0 else REAL
        if isinstance(e, Var):
            ty = lookup(ctx, e.name)
            if ty is None:
                err(f"unbound variable {e.name!r}", e)
            return ty
        if isinstance(e, Op):
            tys = [go(a, ctx) for a in e.args]
            if e.op in ("=", "!="):
                a, b = tys
                ok = (is_numeric(a) and is_numeric(b)) or a == b == BOOL or a == b == INTERVAL
                if not ok:
                    err(f"cannot compare {format_ty(a)} with {format_ty(b)}", e)
                return BOOL
            if e.op in COMPARISON_OPS:
                if not all(is_numeric(t) for t in tys):
                    err(f"operator {e.op!r} expects numbers", e)
                return BOOL
            if e.op in ARITH_OPS:
                if not all(is_numeric(t) for t in tys):
                    err(f"operator {e.op!r} expects numbers", e)
                if e.op == "/":
                    if not _nonzero_literal(e.args[1]):
                        err("division is only by a nonzero rational literal", e)
                    return REAL
                if e.op == "*" or e.op == "+" or e.op == "-":
                    return _join_numeric(tys[0], tys[1]) if tys[0] == tys[1] == NAT else REAL
            if e.op in BOOL_OPS:
                if not all(t == BOOL for t in tys):
                    err(f"operator {e.op!r} expects booleans", e)
                return BOOL
            err(f"unknown operator {e.op!r}", e)
        if isinstance(e, Let):
            bound = go(e.bound, ctx)
            return go(e.body, ctx + ((e.name, bound),))
        if isinstance(e, Tup):
            return ProdTy(tuple(go(x, ctx) for x in e.items))
        if isinstance(e, Proj):
            ty = go(e.tup, ctx)
            if not isinstance(ty, ProdTy):
                err(f"projection from non-tuple type {format_ty(ty)}", e)
            if e.index > len(ty.items):
                err(f"projection index {e.index} out of range for {format_ty(ty)}", e)
            return ty.items[e.index - 1]
        if isinstance(e, If):
            g = go(e.guard, ctx)
            if g != BOOL:
                err(f"if-guard has type {format_ty(g)}, expected bool", e)
            a = go(e.then, ctx)
            b = go(e.orelse, ctx)
            j = join(a, b)
            if j is None:
                err(f"branches have incompatible types {format_ty(a)} and {format_ty(b)}", e)
            return j
        if isinstance(e, Cake):
            return INTERVAL
        if isinstance(e, (LeftEnd, RightEnd)):
            ty = go(e.arg, ctx)
            if ty is not INTERVAL:
                err(f"endpoint of non-interval type {format_ty(ty)}", e)
            return POS
        if isinstance(e, Divide):
            ity = go(e.piece, ctx)
            if ity is not INTERVAL:
                err(f"divide expects an interval, got {format_ty(ity)}", e)
            cty = go(e.at, ctx)
            if not is_numeric(cty):
                err(f"divide expects a cut position, got {format_ty(cty)}", e)
            return ProdTy((INTERVAL, INTERVAL))
        if isinstance(e, Mark):
            _check_agent(e, e.agent)
            sty = go(e.start, ctx)
            if not is_numeric(sty):
                err(f"mark expects a start position, got {format_ty(sty)}", e)
            tty = go(e.target, ctx)
            if not is_numeric(tty):
                err(f"mark expects a target value, got {format_ty(tty)}", e)
            return POS
        if isinstance(e, Eval):
            _check_agent(e, e.agent)
            ty = go(e.piece, ctx)
            if ty is not INTERVAL:
                err(f"eval expects an interval, got {format_ty(ty)}", e)
            return REAL
        raise TypeError(f"not an expression: {e!r}")

    def _check_agent(node: Expr, a: int):
        if n_agents is not None and not (1 <= a <= n_agents):
            err(f"agent {a} out of range (1..{n_agents})", node)

    return go(e, ctx)
