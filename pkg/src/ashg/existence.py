"""Deciding whether a core stable partition exists.

The graph is completed so every bag of a tree decomposition is a clique
(the added edges get weight 0, which changes neither utilities nor
stability).  A quantified formula then asks for an edge set encoding a
partition (transitivity inside every bag) such that no non-empty vertex
set is blocking, and the formula is decided through the exists-forall
compilation in ashg.qbf.
"""

from dataclasses import dataclass, field
from itertools import combinations

from ashg.errors import PreconditionError, ResourceLimitError
from ashg.instance import Partition, iter_partitions
from ashg.qbf import (AnnotatedTd, E3CnfFDnf, e3cnffdnf_to_ea, fresh_primal_td,
                      incidence_td_for, qbf_to_cnf, sat_treewidth,
                      split_to_3dnf)
from ashg.treedecomp import (TreeDecomposition, heuristic_decompose,
                             validate_td)
from ashg.verify import verify_bruteforce

EXISTS = "Exists"
NOT_EXISTS = "NotExists"


@dataclass
class CsResult:
    verdict: str
    partition: Partition = None
    method: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def exists(self):
        return self.verdict == EXISTS


def solve_cs_bruteforce(inst, cap=10):
    """First core stable partition in restricted-growth order, if any."""
    if inst.n > cap:
        raise ResourceLimitError("partition_enumeration_n", cap)
    for P in iter_partitions(inst.n):
        if verify_bruteforce(inst, P, cap=None).stable:
            return CsResult(EXISTS, P, method="cs-brute")
    return CsResult(NOT_EXISTS, method="cs-brute")


@dataclass
class CsEncoding:
    formula: E3CnfFDnf
    edge_var: dict  # (u,v) with u<v -> existential variable id
    vertex_var: dict  # u -> universal variable id
    gprime_adj: dict  # u -> set of neighbors after bag completion
    td: TreeDecomposition  # decomposition of the input graph


def _complete_bags(inst, td):
    adj = {u: set(inst.neighbors(u)) for u in inst.vertices()}
    for b in td.bags:
        vs = sorted(b)
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                adj[vs[i]].add(vs[j])
                adj[vs[j]].add(vs[i])
    return adj


def encode_cs(inst, td=None, max_terms=2_000_000):
    """Build the exists-forall formula whose models are the core stable
    partitions of the game.

    Existential variables pick an edge set over the bag-completed graph;
    per-bag transitivity clauses make it a union of cliques, hence a
    partition.  Universal variables pick a candidate coalition X; per
    vertex u, one term per pair (N, N~) of neighbor sets with
    sum w(N) <= sum w(N~) states that u lies in X, sees exactly N of its
    neighbors in X, exactly N~ in its own part, and therefore does not
    strictly improve.
    """
    if td is None:
        td = heuristic_decompose(inst)
    report = validate_td(inst, td)
    if report is not None:
        raise PreconditionError("invalid tree decomposition: %s" % report)
    adj = _complete_bags(inst, td)

    edge_var = {}
    nxt = 1
    for u in inst.vertices():
        for v in sorted(adj[u]):
            if u < v:
                edge_var[(u, v)] = nxt
                nxt += 1
    vertex_var = {u: nxt + u for u in inst.vertices()}
    nxt += inst.n

    def xvar(u, v):
        return edge_var[(u, v) if u < v else (v, u)]

    # transitivity inside every bag, deduplicated across bags
    cnf = []
    seen = set()
    for b in td.bags:
        for trip in combinations(sorted(b), 3):
            if trip in seen:
                continue
            seen.add(trip)
            for mid in range(3):
                a, c = [trip[i] for i in range(3) if i != mid]
                m = trip[mid]
                cnf.append((-xvar(a, m), -xvar(m, c), xvar(a, c)))

    budget = max_terms
    dnf = []
    for u in inst.vertices():
        nb = sorted(adj[u])
        subsets = []
        for r in range(len(nb) + 1):
            for N in combinations(nb, r):
                subsets.append((N, sum(inst.weight(u, v) for v in N)))
        budget -= len(subsets) ** 2
        if budget < 0:
            raise ResourceLimitError("phi_u_terms", max_terms)
        for N, wn in subsets:
            n_set = set(N)
            y_part = tuple(vertex_var[v] if v in n_set else -vertex_var[v]
                           for v in nb)
            for Nt, wt in subsets:
                if wn > wt:
                    continue
                t_set = set(Nt)
                x_part = tuple(xvar(u, v) if v in t_set else -xvar(u, v)
                               for v in nb)
                dnf.append((vertex_var[u],) + y_part + x_part)
    # the all-out coalition is empty, hence never blocking
    dnf.append(tuple(-vertex_var[u] for u in inst.vertices()))

    phi = E3CnfFDnf(tuple(range(1, len(edge_var) + 1)),
                    tuple(vertex_var[u] for u in inst.vertices()),
                    tuple(cnf), tuple(dnf))
    return CsEncoding(phi, edge_var, vertex_var, adj, td)


def build_incidence_td(enc, inst=None):
    """Incidence decomposition of the encoding along the carried graph
    decomposition: each original bag is closed under incident edge
    variables and neighboring vertex variables, transitivity clauses hang
    below a bag containing their triple, and each vertex's terms hang
    below the highest bag containing that vertex."""
    td = enc.td
    adj = enc.gprime_adj
    vertex_var = enc.vertex_var

    def xvar(u, v):
        return enc.edge_var[(u, v) if u < v else (v, u)]

    # rooted view
    parent = {0: None}
    order = [0]
    for node in order:
        for nb in sorted(td.tree[node]):
            if nb not in parent:
                parent[nb] = node
                order.append(nb)

    base = []
    for b in td.bags:
        bag = set()
        for u in b:
            bag.add(vertex_var[u])
            for v in adj[u]:
                bag.add(vertex_var[v])
                bag.add(xvar(u, v))
        base.append(bag)

    clauses = {}
    counter = 0

    def new_label(lits):
        nonlocal counter
        label = ("c", counter)
        counter += 1
        clauses[label] = tuple(lits)
        return label

    # pending[t] = clause labels whose node subdivides the edge above t
    pending = {t: [] for t in range(len(td.bags))}
    cnf_labels = set()
    phi = enc.formula
    for cl in phi.cnf:
        vs = {abs(l) for l in cl}
        home = next(t for t, bag in enumerate(base) if vs <= bag)
        label = new_label(cl)
        cnf_labels.add(label)
        pending[home].append(label)
    # occurrence roots: topmost bag of the input td containing each vertex
    depth = {0: 0}
    for node in order[1:]:
        depth[node] = depth[parent[node]] + 1
    top_of = {}
    for t, b in enumerate(td.bags):
        for u in b:
            if u not in top_of or depth[t] < depth[top_of[u]]:
                top_of[u] = t
    for term in phi.dnf[:-1]:
        u = next(w for w, var in vertex_var.items() if var == term[0])
        pending[top_of.get(u, 0)].append(new_label(term))
    neg_label = new_label(phi.dnf[-1])

    bags = [set(b) | {neg_label} for b in base]
    edges = []
    for t in order:
        chain = [len(bags) + i for i in range(len(pending[t]))]
        for label in pending[t]:
            bags.append(set(base[t]) | {neg_label, label})
        nodes = [t] + chain
        for a, b in zip(nodes, nodes[1:]):
            edges.append((a, b))
        if parent[t] is not None:
            edges.append((nodes[-1], parent[t]))
    return AnnotatedTd(bags, edges, set(enc.formula.y_vars), clauses,
                       cnf_labels, kind="incidence")


def decode_partition(enc, inst, model):
    """Partition from a model's edge variables: connected components of
    the chosen edge set."""
    chosen = {u: set() for u in inst.vertices()}
    for (u, v), var in enc.edge_var.items():
        if model.get(var, False):
            chosen[u].add(v)
            chosen[v].add(u)
    blocks = []
    remaining = set(inst.vertices())
    while remaining:
        start = min(remaining)
        comp = {start}
        stack = [start]
        while stack:
            a = stack.pop()
            for b in chosen[a]:
                if b not in comp:
                    comp.add(b)
                    stack.append(b)
        blocks.append(comp)
        remaining -= comp
    return Partition(blocks, inst.n)


def solve_cs(inst, td=None, use_carried_td=False, max_terms=2_000_000,
             max_states=20_000_000, collect=None):
    """Decide core stable partition existence through the formula pipeline.

    With use_carried_td the incidence decomposition derived from the
    graph decomposition is carried through every transformation; the
    default rebuilds small decompositions per stage, which is faster.
    collect, when a dict, receives the intermediate artifacts.
    """
    if inst.n == 0:
        return CsResult(EXISTS, Partition([], 0), method="qbf")
    enc = encode_cs(inst, td, max_terms=max_terms)
    if use_carried_td:
        td0 = build_incidence_td(enc)
    else:
        td0 = incidence_td_for(enc.formula)
    q, td1 = e3cnffdnf_to_ea(enc.formula, td0)
    q3, td2 = split_to_3dnf(q, td1)
    if use_carried_td:
        from ashg.qbf import incidence_to_primal
        tdp = incidence_to_primal(td2)
    else:
        tdp = fresh_primal_td(q3)
    cnf, psitd = qbf_to_cnf(q3, tdp)
    if collect is not None:
        collect.update(encoding=enc, ea=q, dnf3=q3, cnf=cnf,
                       incidence_td=td0, cnf_td=psitd)
    sat, model = sat_treewidth(cnf, psitd, max_states=max_states)
    if not sat:
        return CsResult(NOT_EXISTS, method="qbf",
                        stats={"cnf_clauses": len(cnf.clauses)})
    P = decode_partition(enc, inst, model)
    return CsResult(EXISTS, P, method="qbf",
                    stats={"cnf_clauses": len(cnf.clauses)})
