"""Combinators for the reflective process calculus, and both translations.

The combinator signature has eleven nullary constructors and binary
application.  Parallel composition is curried application of the ``|``
constructor and forms a commutative monoid with unit ``0``; communication
and quote evaluation are guarded by a linear context resource ``C``, while
the S/K/I rules fire in any context.  Translation from the calculus
eliminates binders by bracket abstraction; translation back reduces S/K/I
spines first and reads the constructors off, inventing a fresh bound name
for each input continuation.
"""

from __future__ import annotations

import itertools
import random as _random
from dataclasses import dataclass
from typing import Optional, Union

from . import rho
from .core import (
    AcuGroup,
    CongruenceSpec,
    ConstructorDecl,
    MetaVar,
    Pattern,
    PatternNode,
    Presentation,
    RewriteRule,
    Sort,
    Term,
    canonicalize,
    reduce,
)
from .rho import Deref, Input, Output, Par, Process, Quote, Var, ZERO as RHO_ZERO

T = Sort("T")

C_DECL = ConstructorDecl("C", (), T)
ZERO_DECL = ConstructorDecl("0", (), T)
PAR_DECL = ConstructorDecl("|", (), T)
FOR_DECL = ConstructorDecl("for", (), T)
BANG_DECL = ConstructorDecl("!", (), T)
AMP_DECL = ConstructorDecl("&", (), T)
STAR_DECL = ConstructorDecl("*", (), T)
S_DECL = ConstructorDecl("S", (), T)
K_DECL = ConstructorDecl("K", (), T)
I_DECL = ConstructorDecl("I", (), T)
APP_DECL = ConstructorDecl("app", (T, T), T)

ATOM_DECLS = (C_DECL, ZERO_DECL, PAR_DECL, FOR_DECL, BANG_DECL, AMP_DECL,
              STAR_DECL, S_DECL, K_DECL, I_DECL)

NAME_TOKEN_PREFIX = "$"

STRUCTURAL_RULES = ("sigma", "kappa", "iota")
NON_COMM_RULES = ("sigma", "kappa", "iota", "epsilon")

DEFAULT_FUEL = 2000


class TranslationError(Exception):
    pass


def atom(decl: ConstructorDecl) -> Term:
    return Term(decl)


def ap(f: Term, x: Term) -> Term:
    return Term(APP_DECL, (f, x))


def aps(*terms: Term) -> Term:
    out = terms[0]
    for t in terms[1:]:
        out = ap(out, t)
    return out


def name_token(ident: str) -> Term:
    """A free name token, only present mid-translation."""
    return Term(ConstructorDecl(NAME_TOKEN_PREFIX + ident, (), T))


def is_name_token(t: Term) -> bool:
    return not t.children and t.head.name.startswith(NAME_TOKEN_PREFIX)


def contains_name_token(t: Term, ident: Optional[str] = None) -> bool:
    if is_name_token(t) and (ident is None or t.head.name == NAME_TOKEN_PREFIX + ident):
        return True
    return any(contains_name_token(c, ident) for c in t.children)


def contains_constructor(t: Term, decl: ConstructorDecl) -> bool:
    return t.head == decl or any(contains_constructor(c, decl) for c in t.children)


def _mv(name: str) -> MetaVar:
    return MetaVar(name, T)


def _pap(f: Pattern, x: Pattern) -> PatternNode:
    return PatternNode(APP_DECL, (f, x))


def _paps(*pats: Pattern) -> Pattern:
    out = pats[0]
    for q in pats[1:]:
        out = _pap(out, q)
    return out


def _patom(decl: ConstructorDecl) -> PatternNode:
    return PatternNode(decl)


_P, _Q, _R = _mv("P"), _mv("Q"), _mv("R")


def comb_presentation() -> Presentation:
    par, c, amp = _patom(PAR_DECL), _patom(C_DECL), _patom(AMP_DECL)
    return Presentation(
        sorts=(T,),
        constructors=ATOM_DECLS + (APP_DECL,),
        congruence=CongruenceSpec(
            acu_groups=(AcuGroup(app=APP_DECL, operator=atom(PAR_DECL), unit=atom(ZERO_DECL)),),
        ),
        rules=(
            RewriteRule("sigma", _paps(_patom(S_DECL), _P, _Q, _R),
                        _pap(_pap(_P, _R), _pap(_Q, _R))),
            RewriteRule("kappa", _paps(_patom(K_DECL), _P, _Q), _P),
            RewriteRule("iota", _pap(_patom(I_DECL), _P), _P),
            RewriteRule(
                "xi",
                _paps(par, c,
                      _paps(par,
                            _pap(_pap(_patom(FOR_DECL), _pap(amp, _P)), _Q),
                            _pap(_pap(_patom(BANG_DECL), _pap(amp, _P)), _R))),
                _paps(par, c, _pap(_Q, _pap(amp, _R))),
            ),
            RewriteRule(
                "epsilon",
                _paps(par, c, _pap(_patom(STAR_DECL), _pap(amp, _P))),
                _paps(par, c, _P),
            ),
        ),
    )


_PRESENTATION = comb_presentation()


def canon(t: Term) -> Term:
    return canonicalize(_PRESENTATION, t)


def wrap_context(t: Term) -> Term:
    return aps(atom(PAR_DECL), atom(C_DECL), t)


# ---------------------------------------------------------------------------
# calculus -> combinators


def interp(p: Process) -> Term:
    """Translate a closed process into a combinator with no bound names."""
    if not rho.is_closed(p):
        raise TranslationError("process must be closed")
    return _interp(rho.canon_process(p))


def _interp(p: Process) -> Term:
    match p:
        case rho.Zero():
            return atom(ZERO_DECL)
        case Par(l, r):
            return aps(atom(PAR_DECL), _interp(l), _interp(r))
        case Output(x, body):
            return aps(atom(BANG_DECL), _interp_name(x), _interp(body))
        case Input(x, binder, body):
            return aps(atom(FOR_DECL), _interp_name(x),
                       abstract_elim(binder, _interp(body)))
        case Deref(x):
            return ap(atom(STAR_DECL), _interp_name(x))
    raise TypeError(f"not a process: {p!r}")


def _interp_name(n: rho.Name) -> Term:
    r = rho.resolve_name(n)
    if isinstance(r, Var):
        return name_token(r.ident)
    return ap(atom(AMP_DECL), _interp(r.process))


def abstract_elim(ident: str, c: Term) -> Term:
    """Eliminate the free name token `ident` by bracket abstraction.

    Yields (K c) when the token is absent, I at the token itself, and an S
    split at applications; the result contains no occurrence of the token.
    """
    token = NAME_TOKEN_PREFIX + ident
    if not contains_name_token(c, ident):
        return ap(atom(K_DECL), c)
    if c.head.name == token and not c.children:
        return atom(I_DECL)
    if c.head == APP_DECL:
        return aps(atom(S_DECL),
                   abstract_elim(ident, c.children[0]),
                   abstract_elim(ident, c.children[1]))
    raise TranslationError(f"name token {ident} under non-application {c.head.name}")


# ---------------------------------------------------------------------------
# sorting


@dataclass(frozen=True)
class BaseSort:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ArrowSort:
    arg: "SortExpr"
    res: "SortExpr"

    def __repr__(self) -> str:
        arg = f"({self.arg!r})" if isinstance(self.arg, ArrowSort) else repr(self.arg)
        return f"{arg} => {self.res!r}"


@dataclass(frozen=True)
class SortVar:
    name: str

    def __repr__(self) -> str:
        return f"'{self.name}"


SortExpr = Union[BaseSort, ArrowSort, SortVar]

W = BaseSort("W")
N = BaseSort("N")


@dataclass(frozen=True)
class SortScheme:
    quantified: tuple[str, ...]
    body: SortExpr


def _arrows(*sorts: SortExpr) -> SortExpr:
    out = sorts[-1]
    for s in reversed(sorts[:-1]):
        out = ArrowSort(s, out)
    return out


SORT_TABLE: dict[str, SortScheme] = {
    "C": SortScheme((), W),
    "0": SortScheme((), W),
    "|": SortScheme((), _arrows(W, W, W)),
    "for": SortScheme((), _arrows(N, ArrowSort(N, W), W)),
    "!": SortScheme((), _arrows(N, W, W)),
    "&": SortScheme((), ArrowSort(W, N)),
    "*": SortScheme((), ArrowSort(N, W)),
    "S": SortScheme(("X", "Y", "Z"),
                    _arrows(_arrows(SortVar("Z"), SortVar("Y"), SortVar("X")),
                            ArrowSort(SortVar("Z"), SortVar("Y")),
                            SortVar("Z"), SortVar("X"))),
    "K": SortScheme(("X", "Y"), _arrows(SortVar("X"), SortVar("Y"), SortVar("X"))),
    "I": SortScheme(("X",), ArrowSort(SortVar("X"), SortVar("X"))),
}


class _UnifyError(Exception):
    pass


def _resolve(s: SortExpr, subst: dict[str, SortExpr]) -> SortExpr:
    while isinstance(s, SortVar) and s.name in subst:
        s = subst[s.name]
    return s


def _occurs(v: str, s: SortExpr, subst: dict[str, SortExpr]) -> bool:
    s = _resolve(s, subst)
    if isinstance(s, SortVar):
        return s.name == v
    if isinstance(s, ArrowSort):
        return _occurs(v, s.arg, subst) or _occurs(v, s.res, subst)
    return False


def _unify(a: SortExpr, b: SortExpr, subst: dict[str, SortExpr]) -> None:
    a, b = _resolve(a, subst), _resolve(b, subst)
    if a == b:
        return
    if isinstance(a, SortVar):
        if _occurs(a.name, b, subst):
            raise _UnifyError
        subst[a.name] = b
        return
    if isinstance(b, SortVar):
        _unify(b, a, subst)
        return
    if isinstance(a, ArrowSort) and isinstance(b, ArrowSort):
        _unify(a.arg, b.arg, subst)
        _unify(a.res, b.res, subst)
        return
    raise _UnifyError


def _apply_subst(s: SortExpr, subst: dict[str, SortExpr]) -> SortExpr:
    s = _resolve(s, subst)
    if isinstance(s, ArrowSort):
        return ArrowSort(_apply_subst(s.arg, subst), _apply_subst(s.res, subst))
    return s


def sort_infer(t: Term) -> Optional[SortExpr]:
    """Principal sort of a combinator, or None when it is not sortable.

    S, K, and I are instantiated at fresh sort variables per occurrence; name
    tokens have the name sort.
    """
    subst: dict[str, SortExpr] = {}
    counter = itertools.count()

    def inst(scheme: SortScheme) -> SortExpr:
        mapping = {q: SortVar(f"t{next(counter)}") for q in scheme.quantified}

        def walk(s: SortExpr) -> SortExpr:
            if isinstance(s, SortVar):
                return mapping.get(s.name, s)
            if isinstance(s, ArrowSort):
                return ArrowSort(walk(s.arg), walk(s.res))
            return s

        return walk(scheme.body)

    def infer(u: Term) -> SortExpr:
        if is_name_token(u):
            return N
        if u.head == APP_DECL:
            fun = infer(u.children[0])
            arg = infer(u.children[1])
            res = SortVar(f"t{next(counter)}")
            _unify(fun, ArrowSort(arg, res), subst)
            return res
        scheme = SORT_TABLE.get(u.head.name)
        if scheme is None:
            raise _UnifyError
        return inst(scheme)

    try:
        return _apply_subst(infer(t), subst)
    except _UnifyError:
        return None


def has_sort(t: Term, want: SortExpr) -> bool:
    return sort_infer(t) == want


# ---------------------------------------------------------------------------
# combinators -> calculus


def backinterp(c: Term, fuel: int = DEFAULT_FUEL) -> Process:
    """Translate a context-free, W-sorted combinator back into a process.

    S/K/I spines are reduced before constructors are read off; each input
    continuation is applied to the quote of a fresh combinator drawn from a
    deterministic family, then that name is bound.
    """
    if contains_constructor(c, C_DECL):
        raise TranslationError("combinator must not mention the context resource")
    if contains_name_token(c):
        raise TranslationError("combinator must be translation-complete (no name tokens)")
    if sort_infer(c) != W:
        raise TranslationError("combinator is not W-sorted")
    budget = [fuel]
    return rho.canon_process(_backinterp(c, budget))


def _skinormal(c: Term, budget: list[int]) -> Term:
    trace = reduce(_PRESENTATION, c, "first", max(budget[0], 0), rules=STRUCTURAL_RULES)
    budget[0] -= len(trace.steps)
    if trace.status != "normal_form" or budget[0] < 0:
        raise TranslationError("ran out of fuel unwinding S/K/I applications")
    return trace.final


def _fresh_family(i: int) -> Term:
    out = atom(ZERO_DECL)
    for _ in range(i):
        out = aps(atom(BANG_DECL), ap(atom(AMP_DECL), out), atom(ZERO_DECL))
    return out


def _quote_subterms(t: Term) -> list[Term]:
    out = []
    if t.head == APP_DECL and t.children[0].head == AMP_DECL and not t.children[0].children:
        out.append(t.children[1])
    for ch in t.children:
        out.extend(_quote_subterms(ch))
    return out


def _backinterp(c: Term, budget: list[int]) -> Process:
    c = _skinormal(c, budget)
    comps = _par_components(c)
    if len(comps) != 1:
        return rho.par_of([_backinterp(e, budget) for e in comps])
    (c,) = comps
    if c.head == ZERO_DECL:
        return RHO_ZERO
    if c.head == APP_DECL:
        fun, arg = c.children
        if fun.head == STAR_DECL:
            return Deref(Quote(_backinterp(_as_quote(c.children[1]), budget)))
        if fun.head == APP_DECL:
            head, first = fun.children
            if head.head == BANG_DECL:
                return Output(Quote(_backinterp(_as_quote(first), budget)),
                              _backinterp(arg, budget))
            if head.head == FOR_DECL:
                return _backinterp_input(_as_quote(first), arg, budget)
    raise TranslationError(f"no translation clause applies to {c!r}")


def _as_quote(t: Term) -> Term:
    if t.head == APP_DECL and t.children[0].head == AMP_DECL:
        return t.children[1]
    raise TranslationError(f"expected a quoted combinator, got {t!r}")


def _par_components(t: Term) -> list[Term]:
    group = _PRESENTATION.congruence.acu_groups[0]
    if t == group.unit:
        return [t]
    from .core import _flatten_term

    comps = _flatten_term(group, t)
    return comps if comps else [group.unit]


def _backinterp_input(subject: Term, continuation: Term, budget: list[int]) -> Process:
    subject_p = _backinterp(subject, budget)
    taboo = {rho.canon_process(_backinterp(q, budget))
             for q in _quote_subterms(continuation)}
    i = 0
    while True:
        fresh = _fresh_family(i)
        fresh_p = rho.canon_process(_backinterp(fresh, budget))
        if fresh_p not in taboo:
            break
        i += 1
    body = _backinterp(ap(continuation, ap(atom(AMP_DECL), fresh)), budget)
    bound = rho.subst_syntactic(body, Var("y0"), Quote(fresh_p))
    return Input(Quote(subject_p), "y0", bound)


# ---------------------------------------------------------------------------
# seeded generation and the normal-form probe


def random_sorted_comb(rng: _random.Random, depth: int = 3, expansions: int = 3) -> Term:
    """Seeded W-sorted context-free combinator with embedded S/K/I spines.

    Starts from the translation of a random closed process, then wraps random
    subterms in identity and constant applications (and occasionally an S
    split) that reduce back to the original.
    """
    t = interp(rho.random_process(rng, depth))
    for _ in range(rng.randint(0, expansions)):
        t = _expand_once(t, rng)
    return t


def _positions_of(t: Term) -> list[tuple[int, ...]]:
    out = [()]
    for i, c in enumerate(t.children):
        out.extend((i,) + p for p in _positions_of(c))
    return out


def _sub_at(t: Term, pos: tuple[int, ...]) -> Term:
    for i in pos:
        t = t.children[i]
    return t


def _replace_at(t: Term, pos: tuple[int, ...], new: Term) -> Term:
    if not pos:
        return new
    children = list(t.children)
    children[pos[0]] = _replace_at(children[pos[0]], pos[1:], new)
    return Term(t.head, tuple(children))


def _junk(rng: _random.Random) -> Term:
    t = interp(rho.random_process(rng, 1))
    if rng.random() < 0.5:
        return ap(atom(AMP_DECL), t)
    return t


def _expand_once(t: Term, rng: _random.Random) -> Term:
    pos = rng.choice(_positions_of(t))
    sub = _sub_at(t, pos)
    kind = rng.choice(["i", "k", "s"])
    if kind == "i":
        new = ap(atom(I_DECL), sub)
    elif kind == "k":
        new = aps(atom(K_DECL), sub, _junk(rng))
    elif kind == "s" and sub.head == APP_DECL:
        f, a = sub.children
        new = aps(atom(S_DECL), ap(atom(K_DECL), f), ap(atom(K_DECL), a), _junk(rng))
    else:
        new = ap(atom(I_DECL), sub)
    return _replace_at(t, pos, new)


def normal_form_probe(samples: int = 50, seed: int = 0, depth: int = 3) -> dict:
    """Experimental probe of the conjectured normal-form correspondence.

    Checks, on seeded samples, how often the composite translation acts as
    the identity on translation images and how communication steps line up
    one-to-one on both sides.  Returns observation counts only; nothing here
    is asserted.
    """
    rng = _random.Random(seed)
    stats = {"samples": 0, "composite_fixed": 0, "comm_matched": 0, "comm_total": 0}
    for _ in range(samples):
        p = rho.random_process(rng, depth)
        image = interp(p)
        stats["samples"] += 1
        again = interp(backinterp(image))
        if again == image:
            stats["composite_fixed"] += 1
        succs = rho.comm_step(p)
        stats["comm_total"] += len(succs)
        from .core import step as core_step

        wrapped = canon(wrap_context(image))
        comb_succs = core_step(_PRESENTATION, wrapped, rules=("xi",))
        translated = set()
        for s in comb_succs:
            inner = unwrap_context(s)
            if inner is not None:
                try:
                    translated.add(backinterp(inner))
                except TranslationError:
                    pass
        stats["comm_matched"] += len(succs & translated)
    return stats


def unwrap_context(t: Term) -> Optional[Term]:
    """Remove the single context resource from a wrapped parallel group."""
    comps = _par_components(t)
    rest = [c for c in comps if c.head != C_DECL]
    if len(rest) == len(comps) - 1:
        group = _PRESENTATION.congruence.acu_groups[0]
        from .core import group_join

        return group_join(group, rest)
    return None
