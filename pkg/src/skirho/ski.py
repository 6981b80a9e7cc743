"""The SKI combinator calculus in three presentations.

``plain`` is the unrestricted calculus where every context reduces.  ``whnf``
guards each rule with a reduction-context marker R that a structural
congruence keeps on the head of the application spine, so only head redexes
ever fire and reduction computes the weak head normal form.  ``gas`` uses the
same guarded left-hand sides but drops the marker from each right-hand side,
so every step consumes one R, like a fuel supply.
"""

from __future__ import annotations

import random as _random
from typing import Optional

from .core import (
    CongruenceSpec,
    ConstructorDecl,
    FuelExhausted,
    MetaVar,
    OrientedEquation,
    Pattern,
    PatternNode,
    Presentation,
    RewriteRule,
    Sort,
    Term,
    Trace,
    reduce,
)

T = Sort("T")

S_DECL = ConstructorDecl("S", (), T)
K_DECL = ConstructorDecl("K", (), T)
I_DECL = ConstructorDecl("I", (), T)
APP_DECL = ConstructorDecl("app", (T, T), T)
R_DECL = ConstructorDecl("R", (T,), T)

VARIANTS = ("plain", "whnf", "gas")

DEFAULT_FUEL = 1000


def S() -> Term:
    return Term(S_DECL)


def K() -> Term:
    return Term(K_DECL)


def I() -> Term:
    return Term(I_DECL)


def ap(f: Term, x: Term) -> Term:
    return Term(APP_DECL, (f, x))


def R(t: Term) -> Term:
    return Term(R_DECL, (t,))


def _mv(name: str) -> MetaVar:
    return MetaVar(name, T)


def _pap(f: Pattern, x: Pattern) -> PatternNode:
    return PatternNode(APP_DECL, (f, x))


def _pr(x: Pattern) -> PatternNode:
    return PatternNode(R_DECL, (x,))


def _atom(decl: ConstructorDecl) -> PatternNode:
    return PatternNode(decl)


_x, _y, _z = _mv("x"), _mv("y"), _mv("z")

_R_PROPAGATION = OrientedEquation(
    lhs=_pr(_pap(_x, _y)),
    rhs=_pap(_pr(_x), _y),
)


def ski_presentation(variant: str) -> Presentation:
    """One of the three presentations: plain, whnf, or gas."""
    if variant == "plain":
        return Presentation(
            sorts=(T,),
            constructors=(S_DECL, K_DECL, I_DECL, APP_DECL),
            congruence=CongruenceSpec(),
            rules=(
                RewriteRule("sigma", _pap(_pap(_pap(_atom(S_DECL), _x), _y), _z),
                            _pap(_pap(_x, _z), _pap(_y, _z))),
                RewriteRule("kappa", _pap(_pap(_atom(K_DECL), _y), _z), _y),
                RewriteRule("iota", _pap(_atom(I_DECL), _z), _z),
            ),
        )
    if variant == "whnf":
        return Presentation(
            sorts=(T,),
            constructors=(S_DECL, K_DECL, I_DECL, APP_DECL, R_DECL),
            congruence=CongruenceSpec(oriented_equations=(_R_PROPAGATION,)),
            rules=(
                RewriteRule("sigma", _pap(_pap(_pap(_pr(_atom(S_DECL)), _x), _y), _z),
                            _pap(_pap(_pr(_x), _z), _pap(_y, _z))),
                RewriteRule("kappa", _pap(_pap(_pr(_atom(K_DECL)), _y), _z), _pr(_y)),
                RewriteRule("iota", _pap(_pr(_atom(I_DECL)), _z), _pr(_z)),
            ),
        )
    if variant == "gas":
        return Presentation(
            sorts=(T,),
            constructors=(S_DECL, K_DECL, I_DECL, APP_DECL, R_DECL),
            congruence=CongruenceSpec(oriented_equations=(_R_PROPAGATION,)),
            rules=(
                RewriteRule("sigma", _pap(_pap(_pap(_pr(_atom(S_DECL)), _x), _y), _z),
                            _pap(_pap(_x, _z), _pap(_y, _z))),
                RewriteRule("kappa", _pap(_pap(_pr(_atom(K_DECL)), _y), _z), _y),
                RewriteRule("iota", _pap(_pr(_atom(I_DECL)), _z), _z),
            ),
        )
    raise ValueError(f"unknown variant {variant!r}, expected one of {VARIANTS}")


def marker_count(t: Term) -> int:
    n = 1 if t.head is R_DECL else 0
    return n + sum(marker_count(c) for c in t.children)


def contains_marker(t: Term) -> bool:
    return marker_count(t) > 0


def strip_marker(t: Term) -> Term:
    """Remove the unique R from a normal form, recovering the plain term."""
    if marker_count(t) != 1:
        raise ValueError("expected exactly one R to strip")

    def go(u: Term) -> Term:
        if u.head is R_DECL:
            return u.children[0]
        if u.head is APP_DECL:
            return ap(go(u.children[0]), u.children[1])
        raise ValueError("R is not on the application spine")

    return go(t)


def wrap_markers(t: Term, n: int) -> Term:
    for _ in range(n):
        t = R(t)
    return t


def whnf_run(t: Term, fuel: int = DEFAULT_FUEL) -> Trace:
    """Marker-guided reduction of Rt with the whnf presentation, first strategy."""
    if contains_marker(t):
        raise ValueError("term must be R-free")
    return reduce(ski_presentation("whnf"), R(t), "first", fuel)


def whnf(t: Term, fuel: int = DEFAULT_FUEL) -> Optional[Term]:
    """Weak head normal form of an R-free term, or None when fuel runs out."""
    trace = whnf_run(t, fuel)
    if trace.status != "normal_form":
        return None
    return strip_marker(trace.final)


def gas_run(t: Term, n: int, fuel: Optional[int] = None) -> tuple[Term, int]:
    """Reduce R^n t with the gas presentation; returns (final term, steps used).

    Every step consumes exactly one R, so at most n steps can happen and the
    run always halts.
    """
    if contains_marker(t):
        raise ValueError("term must be R-free")
    if n < 0:
        raise ValueError("n must be >= 0")
    if fuel is None:
        fuel = n
    trace = gas_trace(t, n, fuel)
    if trace.status == "fuel_exhausted":
        raise FuelExhausted("gas run did not finish within fuel")
    return trace.final, len(trace.steps)


def gas_trace(t: Term, n: int, fuel: Optional[int] = None) -> Trace:
    if fuel is None:
        fuel = n
    return reduce(ski_presentation("gas"), wrap_markers(t, n), "first", fuel)


def whnf_oracle(t: Term, fuel: int = DEFAULT_FUEL) -> Optional[Term]:
    """Head-spine evaluation with no marker machinery, for cross-checking.

    Unwinds the application spine and contracts the head combinator whenever
    it has enough arguments; never looks inside argument positions.
    """
    if contains_marker(t):
        raise ValueError("term must be R-free")
    steps = 0
    while True:
        head, args = t, []
        while head.head is APP_DECL:
            args.append(head.children[1])
            head = head.children[0]
        args.reverse()
        if head.head is S_DECL and len(args) >= 3:
            reduct = ap(ap(args[0], args[2]), ap(args[1], args[2]))
            rest = args[3:]
        elif head.head is K_DECL and len(args) >= 2:
            reduct = args[0]
            rest = args[2:]
        elif head.head is I_DECL and len(args) >= 1:
            reduct = args[0]
            rest = args[1:]
        else:
            return t
        steps += 1
        if steps > fuel:
            return None
        t = reduct
        for a in rest:
            t = ap(t, a)


def random_ski_term(size: int, rng: _random.Random) -> Term:
    """Uniform random choice over tree shapes and atoms with a size budget.

    ``size`` counts combinator atoms (leaves); no R is ever generated.
    """
    if size <= 1:
        return rng.choice((S, K, I))()
    left = rng.randint(1, size - 1)
    return ap(random_ski_term(left, rng), random_ski_term(size - left, rng))
