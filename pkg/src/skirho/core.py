"""Generic multisorted term rewriting modulo a restricted structural congruence.

The congruence a presentation may declare is deliberately limited to two
ingredients that keep matching decidable and fast:

* ACU groups: a curried binary shape ``((op x) y)`` that is associative and
  commutative with a unit, normalized by flattening to a sorted multiset;
* oriented equations: sort-preserving left-to-right rewrites applied to a
  fixpoint under a fuel cap (e.g. a unary marker that propagates into the
  head position of an application spine).

Redex enumeration works on canonical forms but is congruence-aware: a rule
whose left-hand side is an ACU shape may consume a sub-multiset of a
parallel group (the remainder is kept), and a rule that mentions a floating
marker may match with surplus markers peeled off into the surrounding
context.  Both correspond to matching the rule inside some representative
of the congruence class, which is exactly where the one-step edges of the
free model live.
"""

from __future__ import annotations

import random as _random
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

DEFAULT_ORIENTED_FUEL = 10_000
DEFAULT_STATE_BUDGET = 200_000

NORMAL_FORM = "normal_form"
FUEL_EXHAUSTED = "fuel_exhausted"
TARGET_REACHED = "target_reached"

REST_VAR = "__rest__"


class RewriteError(Exception):
    """Base class for rewriting failures."""


class FuelExhausted(RewriteError):
    """Raised when a fueled normalization exceeds its bound."""


class InvalidRedex(RewriteError):
    """Raised when a redex is replayed against a term it was not found in."""


@dataclass(frozen=True)
class Sort:
    name: str

    def __repr__(self) -> str:
        return f"Sort({self.name!r})"


@dataclass(frozen=True)
class ConstructorDecl:
    name: str
    argument_sorts: tuple[Sort, ...]
    result_sort: Sort

    @property
    def arity(self) -> int:
        return len(self.argument_sorts)

    def __repr__(self) -> str:
        return f"ConstructorDecl({self.name!r}/{self.arity})"


@dataclass(frozen=True)
class Term:
    head: ConstructorDecl
    children: tuple["Term", ...] = ()

    def __post_init__(self) -> None:
        if len(self.children) != self.head.arity:
            raise ValueError(
                f"constructor {self.head.name} expects {self.head.arity} "
                f"children, got {len(self.children)}"
            )

    @property
    def sort(self) -> Sort:
        return self.head.result_sort

    def __repr__(self) -> str:
        if not self.children:
            return self.head.name
        inner = " ".join(repr(c) for c in self.children)
        return f"({self.head.name} {inner})"


@dataclass(frozen=True)
class MetaVar:
    name: str
    sort: Sort

    def __repr__(self) -> str:
        return f"?{self.name}"


@dataclass(frozen=True)
class PatternNode:
    head: ConstructorDecl
    children: tuple["Pattern", ...] = ()

    def __repr__(self) -> str:
        if not self.children:
            return self.head.name
        inner = " ".join(repr(c) for c in self.children)
        return f"({self.head.name} {inner})"


Pattern = Union[MetaVar, PatternNode]


@dataclass(frozen=True)
class AcuGroup:
    """The shape ``((operator x) y)`` built with a binary ``app`` constructor."""

    app: ConstructorDecl
    operator: Term
    unit: Term
    associative: bool = True
    commutative: bool = True


@dataclass(frozen=True)
class OrientedEquation:
    lhs: Pattern
    rhs: Pattern


@dataclass(frozen=True)
class CongruenceSpec:
    acu_groups: tuple[AcuGroup, ...] = ()
    oriented_equations: tuple[OrientedEquation, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.acu_groups and not self.oriented_equations


@dataclass(frozen=True)
class RewriteRule:
    name: str
    lhs: Pattern
    rhs: Pattern


@dataclass(frozen=True)
class Presentation:
    sorts: tuple[Sort, ...]
    constructors: tuple[ConstructorDecl, ...]
    congruence: CongruenceSpec = CongruenceSpec()
    rules: tuple[RewriteRule, ...] = ()

    def constructor(self, name: str) -> ConstructorDecl:
        for ctor in self.constructors:
            if ctor.name == name:
                return ctor
        raise KeyError(name)

    def rule(self, name: str) -> RewriteRule:
        for rule in self.rules:
            if rule.name == name:
                return rule
        raise KeyError(name)


@dataclass
class Redex:
    rule: str
    position: tuple[int, ...]
    binding: dict[str, Term]
    peel: int = 0
    rest: Optional[Term] = None


@dataclass
class Trace:
    initial: Term
    steps: list[tuple[Redex, Term]]
    status: str

    @property
    def final(self) -> Term:
        return self.steps[-1][1] if self.steps else self.initial

    def __len__(self) -> int:
        return len(self.steps)


@dataclass
class ValidationReport:
    ok: bool
    defects: list[str]


# ---------------------------------------------------------------------------
# term utilities


def term_key(t: Term):
    """Fixed total order on terms: name, then arity, then children."""
    return (t.head.name, len(t.children), tuple(term_key(c) for c in t.children))


def term_size(t: Term) -> int:
    return 1 + sum(term_size(c) for c in t.children)


def subterm_at(t: Term, position: Sequence[int]) -> Term:
    for i in position:
        if i >= len(t.children):
            raise InvalidRedex(f"position {tuple(position)} is not in the term")
        t = t.children[i]
    return t


def replace_at(t: Term, position: Sequence[int], replacement: Term) -> Term:
    if not position:
        return replacement
    i = position[0]
    if i >= len(t.children):
        raise InvalidRedex(f"position {tuple(position)} is not in the term")
    children = list(t.children)
    children[i] = replace_at(children[i], position[1:], replacement)
    return Term(t.head, tuple(children))


def pattern_metavars(pat: Pattern) -> dict[str, Sort]:
    out: dict[str, Sort] = {}

    def walk(p: Pattern) -> None:
        if isinstance(p, MetaVar):
            out.setdefault(p.name, p.sort)
        else:
            for c in p.children:
                walk(c)

    walk(pat)
    return out


def pattern_sort(pat: Pattern) -> Sort:
    return pat.sort if isinstance(pat, MetaVar) else pat.head.result_sort


def instantiate(pat: Pattern, binding: dict[str, Term]) -> Term:
    if isinstance(pat, MetaVar):
        try:
            return binding[pat.name]
        except KeyError:
            raise RewriteError(f"metavariable {pat.name} is unbound") from None
    return Term(pat.head, tuple(instantiate(c, binding) for c in pat.children))


def term_to_pattern(t: Term) -> PatternNode:
    return PatternNode(t.head, tuple(term_to_pattern(c) for c in t.children))


# ---------------------------------------------------------------------------
# canonicalization


class _Budget:
    __slots__ = ("left",)

    def __init__(self, amount: int) -> None:
        self.left = amount

    def spend(self, note: str) -> None:
        self.left -= 1
        if self.left < 0:
            raise FuelExhausted(note)


def _struct_match(pat: Pattern, t: Term, binding: dict[str, Term]) -> Optional[dict[str, Term]]:
    """Plain structural matching, used for oriented equations."""
    if isinstance(pat, MetaVar):
        bound = binding.get(pat.name)
        if bound is None:
            if t.sort != pat.sort:
                return None
            out = dict(binding)
            out[pat.name] = t
            return out
        return binding if bound == t else None
    if pat.head != t.head:
        return None
    for cp, ct in zip(pat.children, t.children):
        nxt = _struct_match(cp, ct, binding)
        if nxt is None:
            return None
        binding = nxt
    return binding


def _group_of(p: Presentation, t: Term) -> Optional[AcuGroup]:
    for g in p.congruence.acu_groups:
        if (
            t.head == g.app
            and len(t.children) == 2
            and t.children[0].head == g.app
            and t.children[0].children[0] == g.operator
        ):
            return g
    return None


def _flatten_term(g: AcuGroup, t: Term) -> list[Term]:
    if t == g.unit:
        return []
    if (
        g.associative
        and t.head == g.app
        and len(t.children) == 2
        and t.children[0].head == g.app
        and t.children[0].children[0] == g.operator
    ):
        return _flatten_term(g, t.children[0].children[1]) + _flatten_term(g, t.children[1])
    return [t]


def group_join(g: AcuGroup, elems: Sequence[Term]) -> Term:
    if not elems:
        return g.unit
    if len(elems) == 1:
        return elems[0]
    rest = group_join(g, elems[1:])
    return Term(g.app, (Term(g.app, (g.operator, elems[0])), rest))


def canonicalize(p: Presentation, t: Term, *, fuel: int = DEFAULT_ORIENTED_FUEL) -> Term:
    """Canonical representative of t's congruence class.

    Oriented equations are applied left-to-right to a fixpoint (fuel capped),
    ACU groups are flattened to unit-free multisets ordered by the fixed term
    order.  Idempotent.
    """
    if p.congruence.is_empty:
        return t
    budget = _Budget(fuel)
    return _canon(p, t, budget)


def _canon(p: Presentation, t: Term, budget: _Budget) -> Term:
    t = Term(t.head, tuple(_canon(p, c, budget) for c in t.children))
    while True:
        applied = False
        for eq in p.congruence.oriented_equations:
            b = _struct_match(eq.lhs, t, {})
            if b is not None:
                budget.spend("oriented equations did not reach a fixpoint")
                t = instantiate(eq.rhs, b)
                t = Term(t.head, tuple(_canon(p, c, budget) for c in t.children))
                applied = True
                break
        if applied:
            continue
        g = _group_of(p, t)
        if g is not None:
            elems = _flatten_term(g, t)
            if g.commutative:
                elems.sort(key=term_key)
            joined = group_join(g, elems)
            if joined != t:
                t = joined
                continue
        return t


def congruent(p: Presentation, t: Term, u: Term) -> bool:
    return canonicalize(p, t) == canonicalize(p, u)


# ---------------------------------------------------------------------------
# matching


def _pattern_group(p: Presentation, pat: Pattern) -> Optional[AcuGroup]:
    if not isinstance(pat, PatternNode):
        return None
    for g in p.congruence.acu_groups:
        if (
            pat.head == g.app
            and len(pat.children) == 2
            and isinstance(pat.children[0], PatternNode)
            and pat.children[0].head == g.app
            and pat.children[0].children[0] == term_to_pattern(g.operator)
        ):
            return g
    return None


def _flatten_pattern(p: Presentation, g: AcuGroup, pat: Pattern) -> tuple[list[Pattern], list[MetaVar]]:
    """Split an ACU-shaped pattern into element patterns and collector metavars."""
    elems: list[Pattern] = []
    mvars: list[MetaVar] = []
    unit_pat = term_to_pattern(g.unit)

    def walk(q: Pattern) -> None:
        if isinstance(q, MetaVar):
            mvars.append(q)
            return
        if q == unit_pat:
            return
        if _pattern_group(p, q) is g:
            walk(q.children[0].children[1])
            walk(q.children[1])
            return
        elems.append(q)

    walk(pat)
    return elems, mvars


def _match_gen(p: Presentation, pat: Pattern, t: Term, binding: dict[str, Term]) -> Iterator[dict[str, Term]]:
    """Yield every binding (deterministic order) making pat congruent to t.

    Repeated metavariables must bind canonically equal terms; matching under
    an ACU operator enumerates multiset decompositions in canonical order.
    """
    if isinstance(pat, MetaVar):
        bound = binding.get(pat.name)
        if bound is None:
            if t.sort == pat.sort:
                out = dict(binding)
                out[pat.name] = t
                yield out
        elif bound == t:
            yield binding
        return
    g = _pattern_group(p, pat)
    if g is not None:
        yield from _match_acu(p, g, pat, t, binding, rest_var=None)
        return
    if pat.head != t.head:
        return

    def rec(i: int, b: dict[str, Term]) -> Iterator[dict[str, Term]]:
        if i == len(pat.children):
            yield b
            return
        for b2 in _match_gen(p, pat.children[i], t.children[i], b):
            yield from rec(i + 1, b2)

    yield from rec(0, binding)


def _match_acu(
    p: Presentation,
    g: AcuGroup,
    pat: Pattern,
    t: Term,
    binding: dict[str, Term],
    rest_var: Optional[str],
) -> Iterator[dict[str, Term]]:
    pelems, pvars = _flatten_pattern(p, g, pat)
    if rest_var is not None:
        pvars = pvars + [MetaVar(rest_var, g.unit.sort)]
    telems = _flatten_term(g, t)

    # bound collector metavariables contribute a fixed sub-multiset
    pending: list[MetaVar] = []
    for mv in pvars:
        bound = binding.get(mv.name)
        if bound is None:
            pending.append(mv)
            continue
        needed = _flatten_term(g, bound)
        remaining = list(telems)
        for item in needed:
            if item in remaining:
                remaining.remove(item)
            else:
                return
        telems = remaining

    def assign_vars(leftover: list[Term], i: int, b: dict[str, Term]) -> Iterator[dict[str, Term]]:
        if i == len(pending):
            if not leftover:
                yield b
            return
        mv = pending[i]
        if i == len(pending) - 1:
            value = group_join(g, leftover)
            bound = b.get(mv.name)
            if bound is None:
                if value.sort == mv.sort:
                    out = dict(b)
                    out[mv.name] = value
                    yield out
            elif bound == value:
                yield b
            return
        # several collectors: deterministically enumerate sub-multisets for
        # this one (by index subset, ascending), remainder goes rightwards
        n = len(leftover)
        for mask in range(1 << n):
            chosen = [leftover[j] for j in range(n) if mask >> j & 1]
            rest = [leftover[j] for j in range(n) if not mask >> j & 1]
            value = group_join(g, chosen)
            bound = b.get(mv.name)
            if bound is None:
                if value.sort != mv.sort:
                    continue
                out = dict(b)
                out[mv.name] = value
            elif bound == value:
                out = b
            else:
                continue
            yield from assign_vars(rest, i + 1, out)

    def match_elems(i: int, used: tuple[int, ...], b: dict[str, Term]) -> Iterator[dict[str, Term]]:
        if i == len(pelems):
            leftover = [e for j, e in enumerate(telems) if j not in used]
            yield from assign_vars(leftover, 0, b)
            return
        for j, te in enumerate(telems):
            if j in used:
                continue
            for b2 in _match_gen(p, pelems[i], te, b):
                yield from match_elems(i + 1, used + (j,), b2)

    seen: set[tuple] = set()
    for b in match_elems(0, (), binding):
        sig = tuple(sorted((k, term_key(v)) for k, v in b.items()))
        if sig not in seen:
            seen.add(sig)
            yield b


def match_pattern(p: Presentation, pat: Pattern, t: Term) -> Optional[dict[str, Term]]:
    """First binding making pat congruent to t, or None."""
    t = canonicalize(p, t)
    for b in _match_gen(p, pat, t, {}):
        return b
    return None


# ---------------------------------------------------------------------------
# redex enumeration


def _float_shapes(p: Presentation) -> list[tuple[ConstructorDecl, ConstructorDecl]]:
    """Detect oriented equations of the marker-float shape U(B(x,y)) = B(Ux, y)."""
    out = []
    for eq in p.congruence.oriented_equations:
        lhs, rhs = eq.lhs, eq.rhs
        if not (isinstance(lhs, PatternNode) and lhs.head.arity == 1):
            continue
        inner = lhs.children[0]
        if not (isinstance(inner, PatternNode) and inner.head.arity == 2):
            continue
        x, y = inner.children
        if not (isinstance(x, MetaVar) and isinstance(y, MetaVar)):
            continue
        want = PatternNode(inner.head, (PatternNode(lhs.head, (x,)), y))
        if rhs == want:
            out.append((lhs.head, inner.head))
    return out


def _spine(b_ctor: ConstructorDecl, t: Term) -> tuple[Term, list[Term]]:
    args: list[Term] = []
    while t.head == b_ctor and len(t.children) == 2:
        args.append(t.children[1])
        t = t.children[0]
    args.reverse()
    return t, args


def _unwrap_marker(u_ctor: ConstructorDecl, t: Term) -> tuple[Term, int]:
    k = 0
    while t.head == u_ctor:
        t = t.children[0]
        k += 1
    return t, k


def _pattern_spine_marker(
    u_ctor: ConstructorDecl, b_ctor: ConstructorDecl, pat: Pattern
) -> Optional[int]:
    """Marker count on the pattern's spine head; None if indeterminate."""
    while isinstance(pat, PatternNode) and pat.head == b_ctor and len(pat.children) == 2:
        pat = pat.children[0]
    c = 0
    while isinstance(pat, PatternNode) and pat.head == u_ctor:
        pat = pat.children[0]
        c += 1
    if isinstance(pat, MetaVar):
        return None
    return c


def _peel_candidate(
    floats: Sequence[tuple[ConstructorDecl, ConstructorDecl]], node: Term, lhs: Pattern
) -> tuple[int, Optional[ConstructorDecl], Term]:
    """How many floating markers to peel off into the context for this match."""
    for u_ctor, b_ctor in floats:
        if node.head != b_ctor:
            continue
        head, args = _spine(b_ctor, node)
        core, k = _unwrap_marker(u_ctor, head)
        if k == 0:
            continue
        c = _pattern_spine_marker(u_ctor, b_ctor, lhs)
        if c is None or c > k or c == k:
            continue
        peeled_head = core
        for _ in range(c):
            peeled_head = Term(u_ctor, (peeled_head,))
        peeled = peeled_head
        for a in args:
            peeled = Term(b_ctor, (peeled, a))
        return k - c, u_ctor, peeled
    return 0, None, node


def _positions(p: Presentation, t: Term) -> list[tuple[tuple[int, ...], Term, Optional[AcuGroup]]]:
    """Pre-order positions, treating a maximal ACU group as one flattened node."""
    out: list[tuple[tuple[int, ...], Term, Optional[AcuGroup]]] = []

    def rec(node: Term, path: tuple[int, ...]) -> None:
        g = _group_of(p, node)
        out.append((path, node, g))
        if g is not None:
            cur, base = node, path
            while _group_of(p, cur) is g:
                rec(cur.children[0].children[1], base + (0, 1))
                cur = cur.children[1]
                base = base + (1,)
            rec(cur, base)
        else:
            for i, c in enumerate(node.children):
                rec(c, path + (i,))

    rec(t, ())
    return out


def _iter_redexes(
    p: Presentation, t: Term, rules: Optional[Sequence[str]] = None
) -> Iterator[tuple[Redex, Term]]:
    """Yield (redex, canonical successor) pairs in deterministic order.

    Order is rule-major: presentation rule order first, then leftmost-outermost
    position, then multiset decomposition order.
    """
    positions = _positions(p, t)
    floats = _float_shapes(p)
    active = [r for r in p.rules if rules is None or r.name in rules]
    for rule in active:
        lhs_group = _pattern_group(p, rule.lhs)
        if lhs_group is not None:
            pelems, pvars = _flatten_pattern(p, lhs_group, rule.lhs)
            extend = not pvars
            for path, node, node_group in positions:
                rest_var = REST_VAR if extend else None
                for b in _match_acu(p, lhs_group, rule.lhs, node, {}, rest_var=rest_var):
                    rest = b.pop(REST_VAR, None)
                    inst = instantiate(rule.rhs, b)
                    if rest is not None and rest != lhs_group.unit:
                        inst = Term(lhs_group.app, (Term(lhs_group.app, (lhs_group.operator, inst)), rest))
                    succ = canonicalize(p, replace_at(t, path, inst))
                    yield Redex(rule.name, path, b, peel=0, rest=rest), succ
        else:
            for path, node, node_group in positions:
                if node_group is not None:
                    continue  # group nodes only host ACU-shaped rules
                peel, u_ctor, target = _peel_candidate(floats, node, rule.lhs)
                for b in _match_gen(p, rule.lhs, target, {}):
                    inst = instantiate(rule.rhs, b)
                    for _ in range(peel):
                        inst = Term(u_ctor, (inst,))
                    succ = canonicalize(p, replace_at(t, path, inst))
                    yield Redex(rule.name, path, b, peel=peel, rest=None), succ


def find_redexes(p: Presentation, t: Term, rules: Optional[Sequence[str]] = None) -> list[Redex]:
    t = canonicalize(p, t)
    return [r for r, _ in _iter_redexes(p, t, rules)]


def apply_redex(p: Presentation, t: Term, r: Redex) -> Term:
    t = canonicalize(p, t)
    for cand, succ in _iter_redexes(p, t):
        if (
            cand.rule == r.rule
            and cand.position == tuple(r.position)
            and cand.binding == r.binding
            and cand.peel == r.peel
            and cand.rest == r.rest
        ):
            return succ
    raise InvalidRedex(f"redex {r.rule}@{tuple(r.position)} does not apply to this term")


def step(p: Presentation, t: Term, rules: Optional[Sequence[str]] = None) -> set[Term]:
    """Set of canonical one-step successors, deduplicated."""
    t = canonicalize(p, t)
    return {succ for _, succ in _iter_redexes(p, t, rules)}


def is_normal(p: Presentation, t: Term, rules: Optional[Sequence[str]] = None) -> bool:
    t = canonicalize(p, t)
    return next(_iter_redexes(p, t, rules), None) is None


def reduce(
    p: Presentation,
    t: Term,
    strategy: str = "first",
    fuel: int = 1000,
    *,
    seed: Optional[int] = None,
    rules: Optional[Sequence[str]] = None,
    target: Optional[Term] = None,
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> Trace:
    """Drive rewriting with one of the strategies first | all | random.

    ``first`` repeatedly applies the first redex in deterministic order,
    ``random`` draws uniformly using the seed, ``all`` explores breadth-first
    and returns a shortest trace to a normal form (or to ``target``) within
    ``fuel`` steps.  Running out of fuel is a status, not an error.
    """
    if fuel < 0:
        raise ValueError("fuel must be >= 0")
    t0 = canonicalize(p, t)
    goal = canonicalize(p, target) if target is not None else None

    if strategy == "all":
        return _reduce_bfs(p, t0, fuel, rules, goal, state_budget)
    if strategy not in ("first", "random"):
        raise ValueError(f"unknown strategy {strategy!r}")

    rng = _random.Random(seed)
    steps: list[tuple[Redex, Term]] = []
    cur = t0
    for _ in range(fuel):
        if goal is not None and cur == goal:
            return Trace(t0, steps, TARGET_REACHED)
        if strategy == "first":
            found = next(_iter_redexes(p, cur, rules), None)
            if found is None:
                return Trace(t0, steps, NORMAL_FORM)
        else:
            options = list(_iter_redexes(p, cur, rules))
            if not options:
                return Trace(t0, steps, NORMAL_FORM)
            found = options[rng.randrange(len(options))]
        redex, succ = found
        steps.append((redex, succ))
        cur = succ
    if goal is not None and cur == goal:
        return Trace(t0, steps, TARGET_REACHED)
    if next(_iter_redexes(p, cur, rules), None) is None:
        return Trace(t0, steps, NORMAL_FORM)
    return Trace(t0, steps, FUEL_EXHAUSTED)


def _reduce_bfs(
    p: Presentation,
    t0: Term,
    fuel: int,
    rules: Optional[Sequence[str]],
    goal: Optional[Term],
    state_budget: int,
) -> Trace:
    def rebuild(term: Term, parents: dict) -> list[tuple[Redex, Term]]:
        chain: list[tuple[Redex, Term]] = []
        while term != t0:
            prev, redex = parents[term]
            chain.append((redex, term))
            term = prev
        chain.reverse()
        return chain

    parents: dict[Term, tuple[Term, Redex]] = {}
    seen = {t0}
    queue: deque[tuple[Term, int]] = deque([(t0, 0)])
    states = 0
    while queue:
        cur, depth = queue.popleft()
        states += 1
        if states > state_budget:
            return Trace(t0, [], FUEL_EXHAUSTED)
        if goal is not None:
            if cur == goal:
                return Trace(t0, rebuild(cur, parents), TARGET_REACHED)
        elif next(_iter_redexes(p, cur, rules), None) is None:
            return Trace(t0, rebuild(cur, parents), NORMAL_FORM)
        if depth == fuel:
            continue
        for redex, succ in _iter_redexes(p, cur, rules):
            if succ not in seen:
                seen.add(succ)
                parents[succ] = (cur, redex)
                queue.append((succ, depth + 1))
    return Trace(t0, [], FUEL_EXHAUSTED)


# ---------------------------------------------------------------------------
# presentation validation


def check_term(p: Presentation, t: Term) -> list[str]:
    """Sort defects of a term against a presentation, empty when well-formed."""
    defects: list[str] = []

    def walk(u: Term) -> None:
        if u.head not in p.constructors:
            defects.append(f"unknown constructor {u.head.name}")
            return
        for child, want in zip(u.children, u.head.argument_sorts):
            if child.sort != want:
                defects.append(
                    f"child of {u.head.name} has sort {child.sort.name}, expected {want.name}"
                )
            walk(child)

    walk(t)
    return defects


def _check_pattern(p: Presentation, pat: Pattern, where: str, mvar_sorts: dict[str, Sort]) -> list[str]:
    defects: list[str] = []

    def walk(q: Pattern) -> None:
        if isinstance(q, MetaVar):
            seen = mvar_sorts.get(q.name)
            if seen is None:
                mvar_sorts[q.name] = q.sort
            elif seen != q.sort:
                defects.append(f"{where}: metavariable {q.name} used at two sorts")
            return
        if q.head not in p.constructors:
            defects.append(f"{where}: unknown constructor {q.head.name}")
            return
        if len(q.children) != q.head.arity:
            defects.append(f"{where}: constructor {q.head.name} arity mismatch")
            return
        for child, want in zip(q.children, q.head.argument_sorts):
            if pattern_sort(child) != want:
                defects.append(
                    f"{where}: child of {q.head.name} has sort "
                    f"{pattern_sort(child).name}, expected {want.name}"
                )
            walk(child)

    walk(pat)
    return defects


def validate_presentation(p: Presentation) -> ValidationReport:
    defects: list[str] = []

    names = [s.name for s in p.sorts]
    for name in sorted({n for n in names if names.count(n) > 1}):
        defects.append(f"duplicate sort name {name}")
    cnames = [c.name for c in p.constructors]
    for name in sorted({n for n in cnames if cnames.count(n) > 1}):
        defects.append(f"duplicate constructor name {name}")
    rnames = [r.name for r in p.rules]
    for name in sorted({n for n in rnames if rnames.count(n) > 1}):
        defects.append(f"duplicate rule name {name}")

    for ctor in p.constructors:
        for s in (*ctor.argument_sorts, ctor.result_sort):
            if s not in p.sorts:
                defects.append(f"constructor {ctor.name} mentions undeclared sort {s.name}")

    for rule in p.rules:
        mvar_sorts: dict[str, Sort] = {}
        defects += _check_pattern(p, rule.lhs, f"rule {rule.name} lhs", mvar_sorts)
        defects += _check_pattern(p, rule.rhs, f"rule {rule.name} rhs", mvar_sorts)
        lhs_vars = pattern_metavars(rule.lhs)
        for name in pattern_metavars(rule.rhs):
            if name not in lhs_vars:
                defects.append(f"rule {rule.name}: unbound metavariable {name} in rhs")
        if pattern_sort(rule.lhs) != pattern_sort(rule.rhs):
            defects.append(f"rule {rule.name}: lhs and rhs have different sorts")

    for i, eq in enumerate(p.congruence.oriented_equations):
        mvar_sorts = {}
        defects += _check_pattern(p, eq.lhs, f"equation {i} lhs", mvar_sorts)
        defects += _check_pattern(p, eq.rhs, f"equation {i} rhs", mvar_sorts)
        if pattern_sort(eq.lhs) != pattern_sort(eq.rhs):
            defects.append(f"equation {i}: non-sort-preserving equation")
        for name in pattern_metavars(eq.rhs):
            if name not in pattern_metavars(eq.lhs):
                defects.append(f"equation {i}: unbound metavariable {name} in rhs")

    for g in p.congruence.acu_groups:
        if g.app.arity != 2:
            defects.append(f"ACU group operator {g.app.name} is not binary")
        defects += [f"ACU group: {d}" for d in check_term(p, g.operator)]
        defects += [f"ACU group: {d}" for d in check_term(p, g.unit)]

    return ValidationReport(ok=not defects, defects=defects)
