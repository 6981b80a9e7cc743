"""A reflective higher-order process calculus with quotation as names.

Processes are the stopped process, input-guarded continuations, asynchronous
outputs, parallel composition, and dereference of a name; a name is the
quotation of a process (plus bare identifiers for binder occurrences, which
only ever sit at name positions).  Structural congruence makes parallel
composition a commutative monoid with the stopped process as unit and
includes alpha-equivalence; name equivalence additionally collapses
quote-of-dereference.

Names are quasi-atomic: substitution and binding act on whole names at name
positions of the process tree and never reach inside the contents of a quote
that does not collapse to a dereferenced name.  A binder occurrence is
therefore either a bare identifier or a quote-of-dereference chain that
resolves to one.
"""

from __future__ import annotations

import random as _random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Union


@dataclass(frozen=True)
class Zero:
    def __repr__(self) -> str:
        return "0"


@dataclass(frozen=True)
class Input:
    subject: "Name"
    binder: str
    body: "Process"

    def __repr__(self) -> str:
        return f"for({self.binder} <- {self.subject!r}){self.body!r}"


@dataclass(frozen=True)
class Output:
    subject: "Name"
    body: "Process"

    def __repr__(self) -> str:
        return f"{self.subject!r}!({self.body!r})"


@dataclass(frozen=True)
class Par:
    left: "Process"
    right: "Process"

    def __repr__(self) -> str:
        return f"({self.left!r} | {self.right!r})"


@dataclass(frozen=True)
class Deref:
    name: "Name"

    def __repr__(self) -> str:
        return f"*{self.name!r}"


@dataclass(frozen=True)
class Quote:
    process: "Process"

    def __repr__(self) -> str:
        return f"&({self.process!r})"


@dataclass(frozen=True)
class Var:
    ident: str

    def __repr__(self) -> str:
        return self.ident


Process = Union[Zero, Input, Output, Par, Deref]
Name = Union[Quote, Var]

ZERO = Zero()


# ---------------------------------------------------------------------------
# structure helpers


def process_key(p: Process):
    match p:
        case Zero():
            return (0,)
        case Deref(n):
            return (1, name_key(n))
        case Output(x, body):
            return (2, name_key(x), process_key(body))
        case Input(x, binder, body):
            return (3, name_key(x), binder, process_key(body))
        case Par(l, r):
            return (4, process_key(l), process_key(r))
    raise TypeError(f"not a process: {p!r}")


def name_key(n: Name):
    match n:
        case Var(v):
            return (0, v)
        case Quote(p):
            return (1, process_key(p))
    raise TypeError(f"not a name: {n!r}")


def par_components(p: Process) -> list[Process]:
    """Flatten nested parallel composition, dropping stopped components."""
    match p:
        case Zero():
            return []
        case Par(l, r):
            return par_components(l) + par_components(r)
        case _:
            return [p]


def par_of(components: Iterable[Process]) -> Process:
    items = list(components)
    if not items:
        return ZERO
    out = items[-1]
    for c in reversed(items[:-1]):
        out = Par(c, out)
    return out


def resolve_name(n: Name) -> Name:
    """Strip quote-of-dereference chains: the quote of a process whose only
    component is a dereference stands for the dereferenced name itself."""
    while isinstance(n, Quote):
        comps = par_components(n.process)
        if len(comps) == 1 and isinstance(comps[0], Deref):
            n = comps[0].name
        else:
            return n
    return n


def free_idents(p: Process) -> frozenset[str]:
    """Binder identifiers occurring free at reachable name positions."""

    def of_name(n: Name, bound: frozenset[str]) -> frozenset[str]:
        r = resolve_name(n)
        if isinstance(r, Var):
            return frozenset() if r.ident in bound else frozenset((r.ident,))
        return walk(r.process, frozenset())  # a quote opens a fresh scope

    def walk(q: Process, bound: frozenset[str]) -> frozenset[str]:
        match q:
            case Zero():
                return frozenset()
            case Par(l, r):
                return walk(l, bound) | walk(r, bound)
            case Output(x, body):
                return of_name(x, bound) | walk(body, bound)
            case Deref(x):
                return of_name(x, bound)
            case Input(x, binder, body):
                return of_name(x, bound) | walk(body, bound | {binder})
        raise TypeError(f"not a process: {q!r}")

    return walk(p, frozenset())


def is_closed(p: Process) -> bool:
    return not free_idents(p)


def all_names(p: Process) -> list[Name]:
    """Every name at a reachable name position, resolved; binders as idents."""
    out: list[Name] = []

    def of_name(n: Name) -> None:
        r = resolve_name(n)
        out.append(r)
        if isinstance(r, Quote):
            walk(r.process)

    def walk(q: Process) -> None:
        match q:
            case Zero():
                pass
            case Par(l, r):
                walk(l)
                walk(r)
            case Output(x, body):
                of_name(x)
                walk(body)
            case Deref(x):
                of_name(x)
            case Input(x, binder, body):
                of_name(x)
                out.append(Var(binder))
                walk(body)

    walk(p)
    return out


# ---------------------------------------------------------------------------
# canonical forms


def canon_process(p: Process) -> Process:
    """Canonical representative of p's structural congruence class.

    Parallel composition is flattened to an ordered unit-free multiset,
    binders are renamed to depth-indexed identifiers, quoted processes are
    canonicalized recursively (in their own scope), and quote-of-dereference
    collapses at name positions.  Idempotent; two processes are congruent iff
    their canonical forms are identical.
    """
    avoid = free_idents(p)

    def token(depth: int) -> str:
        i = depth
        while f"v{i}" in avoid:
            i += 1
        return f"v{i}"

    def go(q: Process, env: dict[str, str], depth: int) -> Process:
        match q:
            case Zero():
                return ZERO
            case Par():
                comps = [go(c, env, depth) for c in par_components(q)]
                comps = [c for comp in comps for c in par_components(comp)]
                comps.sort(key=process_key)
                return par_of(comps)
            case Output(x, body):
                return Output(go_name(x, env, depth), go(body, env, depth))
            case Deref(x):
                return Deref(go_name(x, env, depth))
            case Input(x, binder, body):
                tok = token(depth)
                inner = dict(env)
                inner[binder] = tok
                return Input(go_name(x, env, depth), tok, go(body, inner, depth + 1))
        raise TypeError(f"not a process: {q!r}")

    def go_name(n: Name, env: dict[str, str], depth: int) -> Name:
        r = resolve_name(n)
        if isinstance(r, Var):
            return Var(env.get(r.ident, r.ident))
        return Quote(go(r.process, {}, 0))

    return go(p, {}, 0)


def canon_name(n: Name) -> Name:
    r = resolve_name(n)
    if isinstance(r, Var):
        return r
    return Quote(canon_process(r.process))


def struct_congruent(p: Process, q: Process) -> bool:
    return canon_process(p) == canon_process(q)


def name_equiv(x: Name, y: Name) -> bool:
    return canon_name(x) == canon_name(y)


def free_names(p: Process) -> frozenset[Name]:
    """The free names of a process, as canonical names."""
    match p:
        case Zero():
            return frozenset()
        case Input(x, binder, body):
            return frozenset((canon_name(x),)) | (free_names(body) - {Var(binder)})
        case Output(x, body):
            return frozenset((canon_name(x),)) | free_names(body)
        case Par(l, r):
            return free_names(l) | free_names(r)
        case Deref(x):
            return frozenset((canon_name(x),))
    raise TypeError(f"not a process: {p!r}")


# ---------------------------------------------------------------------------
# substitution


def _fresh_binder(body: Process, new: Name, old: Name, quoted: Optional[Process]) -> str:
    """First z0, z1, ... distinct from both names, the free names of the
    substituted process, and everything named in the body."""
    taken = {n.ident for n in all_names(body) if isinstance(n, Var)}
    for n in (new, old):
        r = resolve_name(n)
        if isinstance(r, Var):
            taken.add(r.ident)
    if quoted is not None:
        for n in free_names(quoted):
            if isinstance(n, Var):
                taken.add(n.ident)
    i = 0
    while f"z{i}" in taken:
        i += 1
    return f"z{i}"


def _subst(p: Process, new: Name, old: Name, semantic: bool) -> Process:
    cold = canon_name(old)
    cnew = canon_name(new)
    resolved_new = resolve_name(new)
    quoted = resolved_new.process if isinstance(resolved_new, Quote) else None

    def sub_name(x: Name) -> Name:
        return new if canon_name(x) == cold else x

    def go(q: Process) -> Process:
        match q:
            case Zero():
                return ZERO
            case Par(l, r):
                return Par(go(l), go(r))
            case Output(x, body):
                return Output(sub_name(x), go(body))
            case Input(x, binder, body):
                z = _fresh_binder(body, new, old, quoted)
                renamed = _subst(body, Var(z), Var(binder), semantic=False)
                return Input(sub_name(x), z, go(renamed))
            case Deref(x):
                x1 = sub_name(x)
                if canon_name(x1) == cnew:
                    if semantic and quoted is not None:
                        return quoted
                    return Deref(new)
                return Deref(x)
        raise TypeError(f"not a process: {q!r}")

    return go(p)


def subst_syntactic(p: Process, new: Name, old: Name) -> Process:
    """Capture-avoiding substitution of `new` for `old` at name positions.

    A dereference whose (substituted) name is equivalent to the new name is
    rewritten to dereference the new name itself.
    """
    return _subst(p, new, old, semantic=False)


def subst_semantic(p: Process, new: Name, old: Name) -> Process:
    """Like the syntactic substitution, except a dereference of the new name
    unfolds to the quoted process itself."""
    return _subst(p, new, old, semantic=True)


# ---------------------------------------------------------------------------
# reduction


def comm_step(p: Process) -> set[Process]:
    """All single-step reducts of a closed process, as canonical forms.

    Scans unordered pairs of top-level parallel components for an input and
    an output whose subjects are name-equivalent; the pair is replaced by the
    continuation with the quoted output body substituted for the binder.
    """
    pc = canon_process(p)
    comps = par_components(pc)
    out: set[Process] = set()
    for i, ci in enumerate(comps):
        if not isinstance(ci, Input):
            continue
        for j, cj in enumerate(comps):
            if i == j or not isinstance(cj, Output):
                continue
            if ci.subject != cj.subject:  # components are canonical
                continue
            reduct = subst_syntactic(ci.body, Quote(cj.body), Var(ci.binder))
            rest = [c for k, c in enumerate(comps) if k not in (i, j)]
            out.add(canon_process(par_of(rest + par_components(reduct))))
    return out


@dataclass
class RhoTrace:
    initial: Process
    steps: list[tuple[str, Process]]
    status: str

    @property
    def final(self) -> Process:
        return self.steps[-1][1] if self.steps else self.initial

    def __len__(self) -> int:
        return len(self.steps)


def rho_reduce(p: Process, strategy: str = "first", fuel: int = 1000,
               *, seed: Optional[int] = None) -> RhoTrace:
    """Drive communication steps; mirrors the term rewriting strategies."""
    if fuel < 0:
        raise ValueError("fuel must be >= 0")
    p0 = canon_process(p)

    if strategy == "all":
        parents: dict[Process, Process] = {}
        seen = {p0}
        queue = deque([(p0, 0)])
        while queue:
            cur, depth = queue.popleft()
            succs = sorted(comm_step(cur), key=process_key)
            if not succs:
                chain = []
                node = cur
                while node != p0:
                    chain.append(("comm", node))
                    node = parents[node]
                chain.reverse()
                return RhoTrace(p0, chain, "normal_form")
            if depth == fuel:
                continue
            for s in succs:
                if s not in seen:
                    seen.add(s)
                    parents[s] = cur
                    queue.append((s, depth + 1))
        return RhoTrace(p0, [], "fuel_exhausted")

    if strategy not in ("first", "random"):
        raise ValueError(f"unknown strategy {strategy!r}")
    rng = _random.Random(seed)
    steps: list[tuple[str, Process]] = []
    cur = p0
    for _ in range(fuel):
        succs = sorted(comm_step(cur), key=process_key)
        if not succs:
            return RhoTrace(p0, steps, "normal_form")
        nxt = succs[0] if strategy == "first" else succs[rng.randrange(len(succs))]
        steps.append(("comm", nxt))
        cur = nxt
    if not comm_step(cur):
        return RhoTrace(p0, steps, "normal_form")
    return RhoTrace(p0, steps, "fuel_exhausted")


# ---------------------------------------------------------------------------
# random processes


def random_process(rng: _random.Random, depth: int, binders: tuple[str, ...] = ()) -> Process:
    """Seeded random closed process of bounded constructor depth."""
    if depth <= 0:
        choices = ["zero"] + (["deref"] if binders else [])
        kind = rng.choice(choices)
        if kind == "zero":
            return ZERO
        return Deref(Var(rng.choice(binders)))
    kind = rng.choice(["zero", "par", "input", "output", "deref"])
    if kind == "zero":
        return ZERO
    if kind == "par":
        return Par(random_process(rng, depth - 1, binders),
                   random_process(rng, depth - 1, binders))
    if kind == "input":
        binder = f"u{len(binders)}"
        return Input(random_name(rng, depth - 1, binders), binder,
                     random_process(rng, depth - 1, binders + (binder,)))
    if kind == "output":
        return Output(random_name(rng, depth - 1, binders),
                      random_process(rng, depth - 1, binders))
    return Deref(random_name(rng, depth - 1, binders))


def random_name(rng: _random.Random, depth: int, binders: tuple[str, ...]) -> Name:
    if binders and rng.random() < 0.4:
        if rng.random() < 0.25:
            # quote-of-dereference chain resolving to a binder occurrence
            return Quote(Deref(Var(rng.choice(binders))))
        return Var(rng.choice(binders))
    if depth > 0 and rng.random() < 0.15:
        return Quote(Deref(random_name(rng, depth - 1, ())))
    # quote contents live in their own scope: no outer binders inside
    return Quote(random_process(rng, max(depth - 1, 0), ()))


def random_comm_candidate(rng: _random.Random, depth: int = 3) -> Process:
    """Seeded process guaranteed to have at least one communication redex."""
    subject = Quote(random_process(rng, 1))
    binder = "u0"
    receiver = Input(subject, binder, random_process(rng, depth - 1, (binder,)))
    sender = Output(subject, random_process(rng, depth - 1))
    noise = random_process(rng, depth - 1)
    comps = [receiver, sender] + par_components(noise)
    rng.shuffle(comps)
    return par_of(comps)
