"""Core stability verification: four interchangeable algorithms.

Each solver decides whether a partition admits a blocking coalition and, if
so, returns one.  Search is restricted to connected coalitions: a
disconnected blocking coalition always contains a blocking component.
"""

from dataclasses import dataclass, field
from itertools import combinations

from ashg.errors import PreconditionError, ResourceLimitError, WrongAlgorithmError
from ashg.instance import all_partition_utilities, is_blocking
from ashg.treedecomp import (NiceTreeDecomposition, TreeDecomposition,
                             heuristic_decompose, make_nice, validate_td)

STABLE = "Stable"
UNSTABLE = "Unstable"


@dataclass
class VerificationResult:
    verdict: str
    witness: frozenset = None
    stats: dict = field(default_factory=dict)

    @property
    def stable(self):
        return self.verdict == STABLE


def verify_bruteforce(inst, P, max_size=None, cap=1_000_000):
    """Enumerate connected coalitions by size, then lexicographically."""
    ut_p = all_partition_utilities(inst, P)
    limit = inst.n if max_size is None else min(max_size, inst.n)
    examined = 0
    for size in range(1, limit + 1):
        for combo in combinations(range(inst.n), size):
            examined += 1
            if cap is not None and examined > cap:
                raise ResourceLimitError("enumeration", cap)
            X = frozenset(combo)
            if not inst.is_connected_set(X):
                continue
            if all(sum(w for v, w in inst.neighbors(u).items() if v in X) > ut_p[u]
                   for u in combo):
                return VerificationResult(UNSTABLE, X, {"examined": examined})
    return VerificationResult(STABLE, stats={"examined": examined})


def _forest_rooted(inst):
    """Parent map and postorder for each component, roots at minimum ids."""
    parent = {}
    post = []
    visited = set()
    for start in inst.vertices():
        if start in visited:
            continue
        parent[start] = None
        visited.add(start)
        stack = [(start, False)]
        while stack:
            u, expanded = stack.pop()
            if expanded:
                post.append(u)
                continue
            stack.append((u, True))
            for v in sorted(inst.neighbors(u)):
                if v == parent[u]:
                    continue
                if v in visited:
                    raise WrongAlgorithmError("instance contains a cycle")
                visited.add(v)
                parent[v] = u
                stack.append((v, False))
    return parent, post


def verify_tree(inst, P):
    """Linear-time verification on forests.

    ut_below(u) is the best utility u can get from a coalition inside its
    subtree whose other members all strictly improve; a child v joins only
    when w(uv) >= 0 and ut_below(v) + w(uv) > ut_P(v).
    """
    parent, post = _forest_rooted(inst)
    ut_p = all_partition_utilities(inst, P)
    below = [0] * inst.n
    for u in post:
        total = 0
        for v, w in inst.neighbors(u).items():
            if parent.get(v) == u and w >= 0 and below[v] + w > ut_p[v]:
                total += w
        below[u] = total
    for u in inst.vertices():
        if below[u] > ut_p[u]:
            # expand the accepted subtrees into an explicit witness
            X = {u}
            stack = [u]
            while stack:
                a = stack.pop()
                for v, w in inst.neighbors(a).items():
                    if parent.get(v) == a and w >= 0 and below[v] + w > ut_p[v]:
                        X.add(v)
                        stack.append(v)
            return VerificationResult(UNSTABLE, frozenset(X), {"expanded": inst.n})
    return VerificationResult(STABLE, stats={"expanded": inst.n})


VALUE = "VALUE"
EDGESET = "EDGESET"


def _ensure_nice(inst, td):
    if td is None:
        td = heuristic_decompose(inst)
    if isinstance(td, TreeDecomposition):
        report = validate_td(inst, td)
        if report is not None:
            raise PreconditionError("invalid tree decomposition: %s" % report)
        td = make_nice(td)
    if not isinstance(td, NiceTreeDecomposition):
        raise PreconditionError("expected a (nice) tree decomposition")
    return td


def verify_treewidth(inst, P, td=None, mode=VALUE, max_states=5_000_000):
    """Signature DP over a nice tree decomposition.

    A state is (bag members chosen into X, per-member utility already gained
    from forgotten coalition members, whether X is nonempty so far).  VALUE
    keeps the gained amount as an integer, EDGESET as the set of edges to
    forgotten members.
    """
    if mode not in (VALUE, EDGESET):
        raise ValueError("unknown mode %r" % mode)
    nice = _ensure_nice(inst, td)
    ut_p = all_partition_utilities(inst, P)
    bound = inst.max_degree * inst.w_max

    empty_gain = 0 if mode == VALUE else frozenset()

    def gain_value(v, g):
        if mode == VALUE:
            return g
        return sum(inst.weight(v, x) for x in g)

    tables = {}
    total_states = 0
    for node in nice.postorder():
        kind = nice.kinds[node]
        table = {}

        def put(state, bp):
            if state not in table:
                table[state] = bp

        if kind == NiceTreeDecomposition.LEAF:
            put((frozenset(), (), False), ("leaf",))
        elif kind == NiceTreeDecomposition.INTRODUCE:
            v = nice.vertex[node]
            child = nice.children[node][0]
            for state, _ in tables[child].items():
                put(state, ("skip", state))
                in_x, gained, _ = state
                new_gained = tuple(sorted(gained + ((v, empty_gain),)))
                put((in_x | {v}, new_gained, True), ("take", state))
        elif kind == NiceTreeDecomposition.FORGET:
            v = nice.vertex[node]
            child = nice.children[node][0]
            for state, _ in tables[child].items():
                in_x, gained, touched = state
                if v not in in_x:
                    put(state, ("skip", state))
                    continue
                gmap = dict(gained)
                total = gain_value(v, gmap[v]) + sum(
                    inst.weight(v, u) for u in in_x if u != v and inst.has_edge(v, u))
                if total <= ut_p[v]:
                    continue
                del gmap[v]
                for u in in_x:
                    if u != v and inst.has_edge(v, u):
                        if mode == VALUE:
                            gmap[u] += inst.weight(v, u)
                            assert -bound <= gmap[u] <= bound
                        else:
                            gmap[u] |= {v}
                new_state = (in_x - {v}, tuple(sorted(gmap.items())), touched)
                put(new_state, ("forget", state))
        else:  # join
            left, right = nice.children[node]
            by_inx = {}
            for state in tables[right]:
                by_inx.setdefault(state[0], []).append(state)
            for ls, _ in tables[left].items():
                in_x, lg, lt = ls
                for rs in by_inx.get(in_x, ()):
                    _, rg, rt = rs
                    rmap = dict(rg)
                    merged = []
                    for v, g in lg:
                        if mode == VALUE:
                            mg = g + rmap[v]
                            assert -bound <= mg <= bound
                        else:
                            mg = g | rmap[v]
                        merged.append((v, mg))
                    put((in_x, tuple(sorted(merged)), lt or rt), ("join", ls, rs))

        total_states += len(table)
        if total_states > max_states:
            raise ResourceLimitError("dp_states", max_states)
        tables[node] = table

    for state, _ in tables[nice.root].items():
        if state[2]:
            witness = _reconstruct(nice, tables, state)
            assert is_blocking(inst, P, witness)
            return VerificationResult(UNSTABLE, witness, {"states": total_states})
    return VerificationResult(STABLE, stats={"states": total_states})


def _reconstruct(nice, tables, root_state):
    X = set()
    stack = [(nice.root, root_state)]
    while stack:
        node, state = stack.pop()
        bp = tables[node][state]
        kind = bp[0]
        if kind == "leaf":
            continue
        if kind == "take":
            X.add(nice.vertex[node])
            stack.append((nice.children[node][0], bp[1]))
        elif kind in ("skip", "forget"):
            stack.append((nice.children[node][0], bp[1]))
        else:  # join
            stack.append((nice.children[node][0], bp[1]))
            stack.append((nice.children[node][1], bp[2]))
    return frozenset(X)


def min_vertex_cover(inst):
    """Exact minimum vertex cover by branching on an uncovered edge."""
    edges = [(u, v) for u, v, _ in inst.edges]

    def best(cover):
        for u, v in edges:
            if u not in cover and v not in cover:
                a = best(cover | {u})
                b = best(cover | {v})
                return a if len(a) <= len(b) else b
        return cover

    return best(frozenset())


def verify_vertexcover(inst, P, S=None):
    """Guess X's intersection with a vertex cover, then decide whether
    independent vertices can be added so every guessed member improves.

    Feasibility of each guess is a reachability DP over clamped utility
    vectors, one coordinate per guessed member.
    """
    if S is None:
        S = min_vertex_cover(inst)
    else:
        S = frozenset(S)
        for u, v, _ in inst.edges:
            if u not in S and v not in S:
                raise PreconditionError("S is not a vertex cover: misses (%d,%d)" % (u, v))
    ut_p = all_partition_utilities(inst, P)
    S_sorted = sorted(S)
    outside = [v for v in inst.vertices() if v not in S]
    guesses = 0

    for size in range(0, len(S_sorted) + 1):
        for T in combinations(S_sorted, size):
            guesses += 1
            if not T:
                for v in outside:
                    if ut_p[v] < 0:
                        return VerificationResult(UNSTABLE, frozenset({v}),
                                                  {"guesses": guesses})
                continue
            T_set = frozenset(T)
            needed = []
            for u in T:
                inside = sum(w for v, w in inst.neighbors(u).items() if v in T_set)
                needed.append(ut_p[u] + 1 - inside)
            candidates = [v for v in outside
                          if sum(w for t, w in inst.neighbors(v).items() if t in T_set)
                          > ut_p[v]]
            chosen = _cover_dp(inst, T, tuple(needed), candidates)
            if chosen is not None:
                witness = T_set | chosen
                return VerificationResult(UNSTABLE, witness, {"guesses": guesses})
    return VerificationResult(STABLE, stats={"guesses": guesses})


def _cover_dp(inst, T, needed, candidates):
    """Subset of candidates giving every T-member at least its needed gain,
    or None.

    Reachability over utility vectors, one coordinate per T-member.  Each
    coordinate is clamped at its target plus the worst-case decrease the
    remaining candidates could still cause: overshoot beyond that can never
    matter for a >= constraint, and clamping at the bare target would be
    wrong when a later candidate carries a negative edge.
    """
    deltas = [tuple(inst.weight(u, v) for u in T) for v in candidates]
    # cap[i] = per-coordinate clamp after candidate i has been processed
    caps = []
    cap = list(needed)
    caps.append(tuple(cap))
    for d in reversed(deltas):
        cap = [c - min(0, x) for c, x in zip(cap, d)]
        caps.append(tuple(cap))
    caps.reverse()  # caps[i] applies after processing candidates[:i]

    def clamp(vec, cap):
        return tuple(min(c, x) for c, x in zip(vec, cap))

    def done(vec):
        return all(c >= nd for c, nd in zip(vec, needed))

    states = {clamp((0,) * len(T), caps[0]): frozenset()}
    for i, delta in enumerate(deltas):
        new_states = {}
        for vec, chosen in states.items():
            for nv, nc in ((clamp(vec, caps[i + 1]), chosen),
                           (clamp(tuple(c + d for c, d in zip(vec, delta)),
                                  caps[i + 1]), chosen | {candidates[i]})):
                if nv not in new_states:
                    new_states[nv] = nc
        states = new_states
    for vec, chosen in sorted(states.items()):
        if done(vec):
            return chosen
    return None
