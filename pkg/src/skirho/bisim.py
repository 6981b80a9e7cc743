"""Observation relations and bounded barbed bisimulation for both agent kinds.

An agent is either a process of the calculus or a combinator term; both
expose the same interface here: canonical forms, one-step successors, and
immediate barbs over a chosen name set.  Bisimilarity is only ever decided
up to a depth bound with an explicit state budget, since the full relation
is undecidable; a positive verdict is an approximant, a negative verdict
carries a replayable witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

from . import comb, rho
from .core import Term, step as core_step

Agent = Union[rho.Process, Term]

DEFAULT_PAIR_BUDGET = 50_000


class BudgetExhausted(Exception):
    """The pair budget ran out before the bound was decided."""


@dataclass(frozen=True)
class _System:
    canon: Callable[[Agent], Agent]
    successors: Callable[[Agent], tuple[Agent, ...]]
    immediate_barbs: Callable[[Agent, tuple], frozenset]
    canon_name: Callable[[object], object]
    pretty: Callable[[Agent], str]


def _rho_successors(p: rho.Process) -> tuple[rho.Process, ...]:
    return tuple(sorted(rho.comm_step(p), key=rho.process_key))


def _rho_barbs(p: rho.Process, names: tuple) -> frozenset:
    found = set()
    for component in rho.par_components(rho.canon_process(p)):
        if isinstance(component, rho.Output):
            subject = component.subject  # canonical already
            if any(subject == n for n in names):
                found.add(subject)
    return frozenset(found)


_RHO = _System(
    canon=rho.canon_process,
    successors=_rho_successors,
    immediate_barbs=_rho_barbs,
    canon_name=rho.canon_name,
    pretty=repr,
)


def _comb_successors(t: Term) -> tuple[Term, ...]:
    from .core import term_key

    return tuple(sorted(core_step(comb._PRESENTATION, t), key=term_key))


def _comb_barbs(t: Term, names: tuple) -> frozenset:
    found = set()
    for component in comb._par_components(comb.canon(t)):
        if (
            component.head == comb.APP_DECL
            and component.children[0].head == comb.APP_DECL
            and component.children[0].children[0].head == comb.BANG_DECL
        ):
            subject = component.children[0].children[1]
            if any(subject == n for n in names):
                found.add(subject)
    return frozenset(found)


_COMB = _System(
    canon=comb.canon,
    successors=_comb_successors,
    immediate_barbs=_comb_barbs,
    canon_name=comb.canon,
    pretty=repr,
)


def _system_for(agent: Agent) -> _System:
    return _COMB if isinstance(agent, Term) else _RHO


def barbs(agent: Agent, names) -> frozenset:
    """Immediate observable output subjects among the given names.

    An output component contributes its subject when it is name-equivalent
    to a member of the set; parallel components contribute by union.  The
    witness names are reported canonically.
    """
    system = _system_for(agent)
    canon_names = tuple(system.canon_name(n) for n in names)
    return system.immediate_barbs(agent, canon_names)


@dataclass
class WeakBarbs:
    names: frozenset
    truncated: bool

    def __contains__(self, item) -> bool:
        return item in self.names

    def __iter__(self):
        return iter(self.names)


def weak_barbs(agent: Agent, names, bound: int) -> WeakBarbs:
    """Union of barbs over every agent reachable within `bound` steps.

    Truncation (unexplored frontier at the bound) is reported on the result.
    """
    system = _system_for(agent)
    canon_names = tuple(system.canon_name(n) for n in names)
    start = system.canon(agent)
    seen = {start}
    frontier = [start]
    found: set = set()
    for layer in range(bound + 1):
        for a in frontier:
            found |= system.immediate_barbs(a, canon_names)
        nxt = []
        for a in frontier:
            for s in system.successors(a):
                if s not in seen:
                    seen.add(s)
                    nxt.append(s)
        if not nxt:
            return WeakBarbs(frozenset(found), False)
        if layer == bound:
            return WeakBarbs(frozenset(found), True)
        frontier = nxt
    return WeakBarbs(frozenset(found), False)


@dataclass
class Witness:
    """A replayable distinguishing certificate.

    ``kind`` is "barb" when an immediate barb of `agent` has no weak match
    in `partner` within `bound`, or "move" when a step of `agent` to
    `successor` cannot be answered; `inner` carries the sub-certificate for
    the best answering attempt.
    """

    kind: str
    side: str
    agent: Agent
    partner: Agent
    bound: int
    name: Optional[object] = None
    successor: Optional[Agent] = None
    inner: Optional["Witness"] = None

    def describe(self) -> str:
        if self.kind == "barb":
            return (f"{self.side} agent shows barb {self.name!r} that the other "
                    f"side never shows within {self.bound} steps")
        return (f"{self.side} agent steps to {self.successor!r}; no reply within "
                f"{self.bound} steps stays matched")


@dataclass
class BisimVerdict:
    bisimilar: bool
    depth: int
    witness: Optional[Witness] = None


def bounded_bisim(a: Agent, b: Agent, names, depth: int,
                  *, budget: int = DEFAULT_PAIR_BUDGET) -> BisimVerdict:
    """Decide the depth-bounded approximant of barbed bisimilarity.

    Each single step of one side must be matched by a multi-step of the
    other within the remaining depth, and every immediate barb by an
    eventual barb; the check is symmetric and memoized on canonical pairs.
    Exhausting the state budget raises BudgetExhausted.
    """
    system = _system_for(a)
    if _system_for(b) is not system:
        raise TypeError("agents must belong to the same calculus")
    canon_names = tuple(system.canon_name(n) for n in names)
    a0, b0 = system.canon(a), system.canon(b)
    memo: dict = {}
    spent = [0]

    def reachable(x: Agent, bound: int) -> list[Agent]:
        seen = {x}
        order = [x]
        frontier = [x]
        for _ in range(bound):
            nxt = []
            for cur in frontier:
                for s in system.successors(cur):
                    if s not in seen:
                        seen.add(s)
                        order.append(s)
                        nxt.append(s)
            if not nxt:
                break
            frontier = nxt
        return order

    def check(x: Agent, y: Agent, d: int) -> Optional[Witness]:
        key = (x, y, d)
        if key in memo:
            return memo[key]
        spent[0] += 1
        if spent[0] > budget:
            raise BudgetExhausted(f"pair budget {budget} exhausted")
        memo[key] = None  # assume matched while exploring this pair
        result: Optional[Witness] = None
        for p, q, side in ((x, y, "left"), (y, x, "right")):
            mine = system.immediate_barbs(p, canon_names)
            if mine:
                theirs = weak_barbs(q, canon_names, d)
                for name in sorted(mine, key=repr):
                    if name not in theirs.names:
                        result = Witness("barb", side, p, q, d, name=name)
                        break
            if result is not None:
                break
        if result is None and d > 0:
            for p, q, side in ((x, y, "left"), (y, x, "right")):
                for succ in system.successors(p):
                    answers = reachable(q, d)
                    inner_best: Optional[Witness] = None
                    matched = False
                    for q2 in answers:
                        w = check(succ, q2, d - 1) if side == "left" else check(q2, succ, d - 1)
                        if w is None:
                            matched = True
                            break
                        if inner_best is None:
                            inner_best = w
                    if not matched:
                        result = Witness("move", side, p, q, d,
                                         successor=succ, inner=inner_best)
                        break
                if result is not None:
                    break
        memo[key] = result
        return result

    witness = check(a0, b0, depth)
    if witness is None:
        return BisimVerdict(True, depth)
    return BisimVerdict(False, depth, witness)


@dataclass
class FaithfulnessReport:
    agree: bool
    inconclusive: bool
    calculus: Optional[BisimVerdict]
    combinator: Optional[BisimVerdict]


def faithfulness_check(p: rho.Process, q: rho.Process, names, depth: int,
                       *, budget: int = DEFAULT_PAIR_BUDGET) -> FaithfulnessReport:
    """Compare the bounded verdicts on the calculus side and on the
    context-wrapped translations, name set carried across the translation."""
    comb_names = [comb.ap(comb.atom(comb.AMP_DECL), comb.interp(n.process))
                  if isinstance(rho.resolve_name(n), rho.Quote)
                  else comb.name_token(n.ident)
                  for n in (rho.canon_name(m) for m in names)]
    try:
        calc = bounded_bisim(p, q, names, depth, budget=budget)
    except BudgetExhausted:
        return FaithfulnessReport(False, True, None, None)
    wrapped_p = comb.wrap_context(comb.interp(p))
    wrapped_q = comb.wrap_context(comb.interp(q))
    try:
        comb_verdict = bounded_bisim(wrapped_p, wrapped_q, comb_names, depth, budget=budget)
    except BudgetExhausted:
        return FaithfulnessReport(False, True, calc, None)
    return FaithfulnessReport(
        agree=calc.bisimilar == comb_verdict.bisimilar,
        inconclusive=False,
        calculus=calc,
        combinator=comb_verdict,
    )


def names_occurring(agent: Agent) -> list:
    """All names occurring in an agent, canonical and deduplicated."""
    if isinstance(agent, Term):
        quotes = comb._quote_subterms(comb.canon(agent))
        out = []
        for qt in quotes:
            name = comb.canon(comb.ap(comb.atom(comb.AMP_DECL), qt))
            if name not in out:
                out.append(name)
        return out
    out = []
    for n in rho.all_names(agent):
        c = rho.canon_name(n)
        if c not in out:
            out.append(c)
    return out
