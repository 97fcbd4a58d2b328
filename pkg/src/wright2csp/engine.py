"""Desk-scale failures-divergences refinement engine.

Process terms (prefix, choices, synchronized parallel, renaming, hiding,
STOP/SKIP, named references) compile to finite labelled transition systems by
explicit-state exploration.  A subset construction over tau-closures turns an
LTS into a normalized failures-divergences machine, and refinement is decided
by exploring the product of the normalized specification with the raw
implementation.

Semantic conventions (the usual CSP ones):
  * references unfold through a tau step, so unguarded recursion shows up as
    a tau cycle, i.e. divergence;
  * termination is distributed: a parallel composition performs the success
    event only when both operands can;
  * a stable state that can terminate refuses any set of regular events but
    never the success event itself; a stable state that cannot terminate
    refuses exactly the sets disjoint from its ready set;
  * a divergent state absorbs all behaviour (chaotic closure).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

TAU = "τ"
TICK = "✓"

DEFAULT_MAX_STATES = 200_000


class EngineError(Exception):
    pass


class ResourceLimitError(EngineError):
    """State or node cap exceeded while exploring."""


class UnresolvedProcessError(EngineError):
    def __init__(self, name: str) -> None:
        super().__init__(f"process reference '{name}' has no definition")
        self.name = name


class AlphabetMismatchError(EngineError):
    pass


# --- process terms ----------------------------------------------------------


class Proc:
    __slots__ = ()


@dataclass(frozen=True)
class PStop(Proc):
    pass


@dataclass(frozen=True)
class PSkip(Proc):
    pass


@dataclass(frozen=True)
class PPrefix(Proc):
    event: str
    rest: Proc


@dataclass(frozen=True)
class PExtN(Proc):
    """External choice, kept flat and canonically ordered.

    External choice is associative, commutative and idempotent, so nested
    choices collapse into one branch tuple.  This keeps the state space
    finite when an unguarded reference unfolds inside a choice (the unfolding
    reproduces the same canonical term, closing a tau cycle).
    """

    branches: tuple[Proc, ...]


def PExt(left: Proc, right: Proc) -> Proc:
    branches: set[Proc] = set()
    for operand in (left, right):
        if isinstance(operand, PExtN):
            branches.update(operand.branches)
        else:
            branches.add(operand)
    if len(branches) == 1:
        return next(iter(branches))
    return PExtN(tuple(sorted(branches, key=repr)))


def _ext_of(branches: Iterable[Proc]) -> Proc:
    merged: set[Proc] = set()
    for b in branches:
        if isinstance(b, PExtN):
            merged.update(b.branches)
        else:
            merged.add(b)
    if len(merged) == 1:
        return next(iter(merged))
    return PExtN(tuple(sorted(merged, key=repr)))


@dataclass(frozen=True)
class PInt(Proc):
    left: Proc
    right: Proc


@dataclass(frozen=True)
class PRef(Proc):
    name: str


@dataclass(frozen=True)
class PPar(Proc):
    left: Proc
    sync: frozenset[str]
    right: Proc


@dataclass(frozen=True)
class PRename(Proc):
    inner: Proc
    mapping: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class PHide(Proc):
    inner: Proc
    hidden: frozenset[str]


def rename(p: Proc, mapping: Mapping[str, str]) -> PRename:
    return PRename(p, tuple(sorted(mapping.items())))


def dfa_definitions() -> dict[str, Proc]:
    """The canonical deadlock-freedom specification over one abstract event."""
    return {"DFA": PInt(PPrefix("abstractEvent", PRef("DFA")), PSkip())}


# --- compilation to a labelled transition system ----------------------------


@dataclass
class Lts:
    n_states: int
    transitions: list[tuple[int, str, int]]
    initial: int = 0
    adj: list[list[tuple[str, int]]] = field(default_factory=list, repr=False)
    labels: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.adj:
            self.adj = [[] for _ in range(self.n_states)]
            for s, a, t in self.transitions:
                self.adj[s].append((a, t))
        if not self.labels:
            self.labels = frozenset(a for _, a, _ in self.transitions if a not in (TAU, TICK))


def _step(term: Proc, env: Mapping[str, Proc], memo: dict) -> tuple[tuple[str, Proc], ...]:
    """Initial transitions of a term under the standard operational rules."""
    cached = memo.get(term)
    if cached is not None:
        return cached
    out: list[tuple[str, Proc]]
    if isinstance(term, PStop):
        out = []
    elif isinstance(term, PSkip):
        out = [(TICK, PStop())]
    elif isinstance(term, PPrefix):
        out = [(term.event, term.rest)]
    elif isinstance(term, PRef):
        if term.name not in env:
            raise UnresolvedProcessError(term.name)
        out = [(TAU, env[term.name])]
    elif isinstance(term, PInt):
        out = [(TAU, term.left), (TAU, term.right)]
    elif isinstance(term, PExtN):
        out = []
        for branch in term.branches:
            rest = [b for b in term.branches if b is not branch]
            for a, nxt in _step(branch, env, memo):
                if a == TAU:
                    out.append((TAU, _ext_of(rest + [nxt])))
                else:
                    out.append((a, nxt))
    elif isinstance(term, PPar):
        out = []
        lsteps = _step(term.left, env, memo)
        rsteps = _step(term.right, env, memo)
        for a, nxt in lsteps:
            if a == TICK or a in term.sync:
                continue
            out.append((a, PPar(nxt, term.sync, term.right)))
        for a, nxt in rsteps:
            if a == TICK or a in term.sync:
                continue
            out.append((a, PPar(term.left, term.sync, nxt)))
        for a, lnxt in lsteps:
            if a not in term.sync:
                continue
            for b, rnxt in rsteps:
                if b == a:
                    out.append((a, PPar(lnxt, term.sync, rnxt)))
        # distributed termination: both operands must succeed together
        for a, lnxt in lsteps:
            if a != TICK:
                continue
            for b, rnxt in rsteps:
                if b == TICK:
                    out.append((TICK, PPar(lnxt, term.sync, rnxt)))
    elif isinstance(term, PRename):
        mapping = dict(term.mapping)
        out = []
        for a, nxt in _step(term.inner, env, memo):
            label = a if a in (TAU, TICK) else mapping.get(a, a)
            out.append((label, PRename(nxt, term.mapping)))
    elif isinstance(term, PHide):
        out = []
        for a, nxt in _step(term.inner, env, memo):
            label = TAU if a in term.hidden else a
            out.append((label, PHide(nxt, term.hidden)))
    else:
        raise TypeError(f"unknown process term {term!r}")
    result = tuple(out)
    memo[term] = result
    return result


def compile_to_lts(
    term: Proc,
    env: Mapping[str, Proc] | None = None,
    max_states: int = DEFAULT_MAX_STATES,
) -> Lts:
    """Explore the reachable state space of ``term``."""
    env = env or {}
    memo: dict = {}
    index: dict[Proc, int] = {term: 0}
    transitions: list[tuple[int, str, int]] = []
    queue: deque[Proc] = deque([term])
    while queue:
        cur = queue.popleft()
        s = index[cur]
        for label, nxt in _step(cur, env, memo):
            t = index.get(nxt)
            if t is None:
                if len(index) >= max_states:
                    raise ResourceLimitError(f"state cap {max_states} exceeded")
                t = len(index)
                index[nxt] = t
                queue.append(nxt)
            transitions.append((s, label, t))
    return Lts(n_states=len(index), transitions=transitions)


# --- tau analysis -----------------------------------------------------------


def tau_closure(lts: Lts, states: Iterable[int]) -> frozenset[int]:
    seen = set(states)
    stack = list(seen)
    while stack:
        s = stack.pop()
        for a, t in lts.adj[s]:
            if a == TAU and t not in seen:
                seen.add(t)
                stack.append(t)
    return frozenset(seen)


def divergent_states(lts: Lts) -> list[bool]:
    """States from which an infinite tau path exists."""
    tau_adj: list[list[int]] = [[] for _ in range(lts.n_states)]
    for s, a, t in lts.transitions:
        if a == TAU:
            tau_adj[s].append(t)

    # Tarjan over the tau graph: a state is on a tau cycle if its SCC has more
    # than one member or a self loop.
    indexd = [-1] * lts.n_states
    low = [0] * lts.n_states
    on_stack = [False] * lts.n_states
    stack: list[int] = []
    comp = [-1] * lts.n_states
    comp_count = 0
    counter = 0
    cyclic: set[int] = set()

    for root in range(lts.n_states):
        if indexd[root] != -1:
            continue
        work: list[tuple[int, int]] = [(root, 0)]
        while work:
            node, pi = work[-1]
            if pi == 0:
                indexd[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack[node] = True
            advanced = False
            while pi < len(tau_adj[node]):
                succ = tau_adj[node][pi]
                pi += 1
                if indexd[succ] == -1:
                    work[-1] = (node, pi)
                    work.append((succ, 0))
                    advanced = True
                    break
                if on_stack[succ]:
                    low[node] = min(low[node], indexd[succ])
            if advanced:
                continue
            work[-1] = (node, pi)
            if low[node] == indexd[node]:
                members = []
                while True:
                    m = stack.pop()
                    on_stack[m] = False
                    comp[m] = comp_count
                    members.append(m)
                    if m == node:
                        break
                if len(members) > 1:
                    cyclic.update(members)
                else:
                    m = members[0]
                    if m in tau_adj[m]:
                        cyclic.add(m)
                comp_count += 1
            work.pop()
            if work:
                parent, _ = work[-1]
                low[parent] = min(low[parent], low[node])

    # backward reachability: anything that can tau-reach a cyclic state diverges
    rev: list[list[int]] = [[] for _ in range(lts.n_states)]
    for s in range(lts.n_states):
        for t in tau_adj[s]:
            rev[t].append(s)
    div = [False] * lts.n_states
    frontier = list(cyclic)
    for s in frontier:
        div[s] = True
    while frontier:
        t = frontier.pop()
        for s in rev[t]:
            if not div[s]:
                div[s] = True
                frontier.append(s)
    return div


def stable_ready(lts: Lts, state: int) -> Optional[frozenset[str]]:
    """Ready set of a stable state, or None if the state has a tau move."""
    ready = set()
    for a, _ in lts.adj[state]:
        if a == TAU:
            return None
        ready.add(a)
    return frozenset(ready)


# --- failures-divergences normalization -------------------------------------


@dataclass
class FdModel:
    """Normalized machine: tau-closed subsets with acceptance/divergence info."""

    alphabet: frozenset[str]
    initial: int
    divergent: list[bool]
    acceptances: list[tuple[frozenset[str], ...]]
    transitions: dict[tuple[int, str], int]
    labels: frozenset[str]

    @property
    def node_count(self) -> int:
        return len(self.divergent)

    def node_after(self, trace: Sequence[str]) -> Optional[int]:
        """Node reached by a visible trace; None if the trace is impossible.

        Walking stops at the first divergent node (which absorbs everything)
        and returns it.
        """
        node = self.initial
        for a in trace:
            if self.divergent[node]:
                return node
            nxt = self.transitions.get((node, a))
            if nxt is None:
                return None
            node = nxt
        return node

    def is_divergence(self, trace: Sequence[str]) -> bool:
        node = self.initial
        for a in trace:
            if self.divergent[node]:
                return True
            nxt = self.transitions.get((node, a))
            if nxt is None:
                return False
            node = nxt
        return self.divergent[node]

    def refuses(self, trace: Sequence[str], refusal: Iterable[str]) -> bool:
        """Is (trace, refusal) a failure of the normalized process?"""
        if trace and trace[-1] == TICK:
            prior = self.node_after(trace[:-1])
            if prior is None:
                return False
            return self.divergent[prior] or (prior, TICK) in self.transitions
        node = self.node_after(trace)
        if node is None:
            return False
        if self.divergent[node]:
            return True
        ref = frozenset(refusal)
        for acc in self.acceptances[node]:
            if TICK in acc:
                if TICK not in ref:
                    return True
            elif not (ref & acc):
                return True
        return False


def normalize_fd(lts: Lts, max_nodes: int = DEFAULT_MAX_STATES) -> FdModel:
    """Subset construction over tau-closures with divergence marking."""
    div = divergent_states(lts)
    initial = tau_closure(lts, [lts.initial])
    node_index: dict[frozenset[int], int] = {initial: 0}
    divergent: list[bool] = []
    acceptances: list[tuple[frozenset[str], ...]] = []
    transitions: dict[tuple[int, str], int] = {}
    queue: deque[frozenset[int]] = deque([initial])
    while queue:
        subset = queue.popleft()
        n = node_index[subset]
        while len(divergent) <= n:
            divergent.append(False)
            acceptances.append(())
        is_div = any(div[s] for s in subset)
        divergent[n] = is_div
        if is_div:
            continue  # divergence absorbs all behaviour
        accs: list[frozenset[str]] = []
        for s in subset:
            ready = stable_ready(lts, s)
            if ready is not None and ready not in accs:
                accs.append(ready)
        # A tick-free ready set refuses exactly the sets disjoint from it, so
        # only subset-minimal ones matter.  Every tick-capable ready set
        # refuses the same family (all sets without tick), so they collapse
        # into one marker; a deadlocked member (empty ready set) dominates it.
        tick_free = [a for a in accs if TICK not in a]
        minimal = [a for a in tick_free if not any(b < a for b in tick_free)]
        if any(TICK in a for a in accs) and frozenset() not in minimal:
            minimal.append(frozenset({TICK}))
        acceptances[n] = tuple(minimal)
        moves: dict[str, set[int]] = {}
        for s in subset:
            for a, t in lts.adj[s]:
                if a != TAU:
                    moves.setdefault(a, set()).add(t)
        for a, targets in sorted(moves.items()):
            nxt = tau_closure(lts, targets)
            t_idx = node_index.get(nxt)
            if t_idx is None:
                if len(node_index) >= max_nodes:
                    raise ResourceLimitError(f"normalization cap {max_nodes} exceeded")
                t_idx = len(node_index)
                node_index[nxt] = t_idx
                queue.append(nxt)
            transitions[(n, a)] = t_idx
    while len(divergent) < len(node_index):
        divergent.append(False)
        acceptances.append(())
    return FdModel(
        alphabet=lts.labels,
        initial=0,
        divergent=divergent,
        acceptances=acceptances,
        transitions=transitions,
        labels=lts.labels,
    )


# --- refinement -------------------------------------------------------------


@dataclass
class RefinementVerdict:
    holds: bool
    counterexample: Optional[tuple[tuple[str, ...], str]] = None  # (trace, kind)
    explored: int = 0

    def __bool__(self) -> bool:
        return self.holds


def _spec_accepts_refusal(accs: tuple[frozenset[str], ...], ready: frozenset[str]) -> bool:
    """Can the spec node refuse as much as a stable impl state with this ready set?"""
    if TICK in ready:
        return any(TICK in a or not a for a in accs)
    return any(TICK not in a and a <= ready for a in accs)


def check_refinement_fd(
    spec: FdModel,
    impl: Lts,
    max_pairs: int = DEFAULT_MAX_STATES,
) -> RefinementVerdict:
    """Failures-divergences refinement: does ``impl`` refine ``spec``?

    Product exploration ordered by trace length (tau edges are free), so a
    returned counterexample trace is shortest.
    """
    impl_div = divergent_states(impl)
    start = (spec.initial, impl.initial)
    # 0-1 BFS: tau edges cost nothing, visible edges cost one, so the first
    # violating pair finalized sits at minimal visible-trace distance.
    dist: dict[tuple[int, int], int] = {start: 0}
    parents: dict[tuple[int, int], tuple[Optional[tuple[int, int]], Optional[str]]] = {
        start: (None, None)
    }
    done: set[tuple[int, int]] = set()
    explored = 0

    def trace_of(pair: tuple[int, int], extra: Optional[str] = None) -> tuple[str, ...]:
        labels: list[str] = []
        cur: Optional[tuple[int, int]] = pair
        while cur is not None:
            prev, label = parents[cur]
            if label is not None and label != TAU:
                labels.append(label)
            cur = prev
        labels.reverse()
        if extra is not None:
            labels.append(extra)
        return tuple(labels)

    queue: deque[tuple[int, int]] = deque([start])
    while queue:
        pair = queue.popleft()
        if pair in done:
            continue
        done.add(pair)
        node, s = pair
        explored += 1
        if spec.divergent[node]:
            continue  # spec allows everything from here on
        if impl_div[s]:
            return RefinementVerdict(False, (trace_of(pair), "divergence"), explored)
        ready = stable_ready(impl, s)
        if ready is not None and not _spec_accepts_refusal(spec.acceptances[node], ready):
            return RefinementVerdict(False, (trace_of(pair), "failure"), explored)
        for a, t in impl.adj[s]:
            if a == TAU:
                nxt = (node, t)
                cost = dist[pair]
            else:
                spec_next = spec.transitions.get((node, a))
                if spec_next is None:
                    return RefinementVerdict(False, (trace_of(pair, a), "failure"), explored)
                if a == TICK:
                    continue  # nothing observable after successful termination
                nxt = (spec_next, t)
                cost = dist[pair] + 1
            if nxt in done or (nxt in dist and dist[nxt] <= cost):
                continue
            if nxt not in dist and len(dist) >= max_pairs:
                raise ResourceLimitError(f"product cap {max_pairs} exceeded")
            dist[nxt] = cost
            parents[nxt] = (pair, a)
            if a == TAU:
                queue.appendleft(nxt)
            else:
                queue.append(nxt)
    return RefinementVerdict(True, None, explored)


def check_assertion(
    spec_term: Proc,
    impl_term: Proc,
    env: Mapping[str, Proc],
    alphabet: frozenset[str],
    max_states: int = DEFAULT_MAX_STATES,
) -> RefinementVerdict:
    """Compile both sides over the same alphabet and decide refinement."""
    spec_lts = compile_to_lts(spec_term, env, max_states)
    impl_lts = compile_to_lts(impl_term, env, max_states)
    for side, lts in (("specification", spec_lts), ("implementation", impl_lts)):
        extra = lts.labels - alphabet
        if extra:
            raise AlphabetMismatchError(
                f"{side} performs events outside the assertion alphabet: {sorted(extra)}"
            )
    spec_fd = normalize_fd(spec_lts, max_states)
    return check_refinement_fd(spec_fd, impl_lts, max_states)


def discharge_assertions(
    assertions: Sequence,
    env: Mapping[str, Proc],
    max_states: int = DEFAULT_MAX_STATES,
) -> list[tuple[str, RefinementVerdict]]:
    """One verdict per assertion, in emission order.

    Each assertion exposes ``label``, ``spec_term``, ``impl_term`` and
    ``alphabet``.
    """
    out = []
    for a in assertions:
        verdict = check_assertion(a.spec_term, a.impl_term, env, a.alphabet, max_states)
        out.append((a.label, verdict))
    return out


# --- trace enumeration (shared by checks and tests) --------------------------


def traces(lts: Lts, depth: int, include_tick: bool = True) -> set[tuple[str, ...]]:
    """All visible traces of length <= depth (tick-terminated ones included)."""
    memo: dict[tuple[frozenset[int], int], set[tuple[str, ...]]] = {}

    def explore(subset: frozenset[int], remaining: int) -> set[tuple[str, ...]]:
        key = (subset, remaining)
        got = memo.get(key)
        if got is not None:
            return got
        acc: set[tuple[str, ...]] = {()}
        if remaining > 0:
            moves: dict[str, set[int]] = {}
            for s in subset:
                for a, t in lts.adj[s]:
                    if a == TAU:
                        continue
                    if a == TICK and not include_tick:
                        continue
                    moves.setdefault(a, set()).add(t)
            for a, targets in moves.items():
                if a == TICK:
                    acc.add((TICK,))
                    continue
                for rest in explore(tau_closure(lts, targets), remaining - 1):
                    acc.add((a,) + rest)
        memo[key] = acc
        return acc

    return explore(tau_closure(lts, [lts.initial]), depth)
