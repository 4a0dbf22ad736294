"""Prenex exists-forall quantified Boolean formulas and their compilation
to plain CNF over a tree decomposition.

Variables are positive integers, literals are signed integers.  The
pipeline is: a two-level formula (existential 3-CNF over x, universal DNF
over x and y) is rewritten to pure exists-forall shape, its DNF terms are
split to width 3 along the decomposition, and the result is compiled to a
CNF whose satisfiability is decided by a tree decomposition DP.
"""

from dataclasses import dataclass, field

from ashg.errors import PreconditionError, ResourceLimitError
from ashg.treedecomp import (LabelGraph, TreeDecomposition,
                             NiceTreeDecomposition, heuristic_decompose,
                             make_nice, validate_td)


def _check_term(lits):
    lits = tuple(sorted(set(lits), key=lambda l: (abs(l), l < 0)))
    for l in lits:
        if -l in lits:
            return None  # contradictory term is never true
    return lits


@dataclass(frozen=True)
class E3CnfFDnf:
    """exists x: 3-CNF(x), forall y: DNF(x, y)."""
    x_vars: tuple
    y_vars: tuple
    cnf: tuple  # clauses (disjunctions), literals over x_vars only
    dnf: tuple  # terms (conjunctions), literals over x_vars + y_vars

    def __post_init__(self):
        xs, ys = set(self.x_vars), set(self.y_vars)
        if xs & ys:
            raise ValueError("quantifier blocks share variables")
        for cl in self.cnf:
            if len(cl) > 3:
                raise ValueError("CNF clause wider than 3")
            if any(abs(l) not in xs for l in cl):
                raise ValueError("CNF literal over a non-existential variable")
        allv = xs | ys
        for t in self.dnf:
            if any(abs(l) not in allv for l in t):
                raise ValueError("DNF literal over an unknown variable")


@dataclass(frozen=True)
class QbfEA:
    """exists x forall y: DNF(x, y)."""
    x_vars: tuple
    y_vars: tuple
    terms: tuple

    @property
    def is_3dnf(self):
        return all(len(t) <= 3 for t in self.terms)


@dataclass
class Cnf:
    clauses: list
    num_vars: int
    var_names: dict = field(default_factory=dict)

    def variables(self):
        seen = set()
        for cl in self.clauses:
            for l in cl:
                seen.add(abs(l))
        return seen


class AnnotatedTd:
    """Tree decomposition over formula labels.

    Labels are variable ids (ints) or clause labels ("c", k).  clauses maps
    each clause label to its literal tuple; cnf_labels marks which labels
    are CNF clauses (the rest are DNF terms).
    """

    def __init__(self, bags, tree_edges, universal, clauses=None,
                 cnf_labels=(), kind="incidence"):
        self.bags = [frozenset(b) for b in bags]
        self.tree = {i: set() for i in range(len(self.bags))}
        for i, j in tree_edges:
            self.tree[i].add(j)
            self.tree[j].add(i)
        self.universal = frozenset(universal)
        self.clauses = dict(clauses or {})
        self.cnf_labels = frozenset(cnf_labels)
        self.kind = kind

    def bag_vars(self, i):
        return {v for v in self.bags[i] if isinstance(v, int)}

    def bag_universal(self, i):
        return {v for v in self.bags[i] if isinstance(v, int) and v in self.universal}

    def bag_clauses(self, i):
        return {v for v in self.bags[i] if not isinstance(v, int)}

    @property
    def width(self):
        return max((len(b) for b in self.bags), default=0) - 1

    def max_universal_per_bag(self):
        return max((len(self.bag_universal(i)) for i in range(len(self.bags))),
                   default=0)

    def max_clauses_per_bag(self):
        return max((len(self.bag_clauses(i)) for i in range(len(self.bags))),
                   default=0)

    def tree_edges(self):
        return [(i, j) for i in self.tree for j in self.tree[i] if i < j]

    def validate(self):
        """None, or a violation report against the formula's graph."""
        if self.kind == "incidence":
            vertices = set()
            edges = []
            for b in self.bags:
                vertices |= b
            for label, lits in self.clauses.items():
                vertices.add(label)
                for l in lits:
                    vertices.add(abs(l))
                    edges.append((label, abs(l)))
            graph = LabelGraph(vertices, edges)
        else:
            vertices = set()
            for b in self.bags:
                vertices |= b
            edges = []
            for lits in self.clauses.values():
                vs = sorted({abs(l) for l in lits})
                for a in range(len(vs)):
                    for b2 in range(a + 1, len(vs)):
                        edges.append((vs[a], vs[b2]))
            graph = LabelGraph(vertices, edges)
        shim = TreeDecomposition.__new__(TreeDecomposition)
        shim.bags = self.bags
        shim.tree = self.tree
        return validate_td(graph, shim)


def _next_var(*var_groups):
    mx = 0
    for g in var_groups:
        for v in g:
            mx = max(mx, v)
    return mx + 1


def eval_bruteforce(q, cap=24):
    """Exact semantics by double enumeration.

    Returns (satisfiable, witness) where witness maps each existential
    variable to a bool when satisfiable.
    """
    if isinstance(q, E3CnfFDnf):
        xs, ys, cnf, terms = q.x_vars, q.y_vars, q.cnf, q.dnf
    else:
        xs, ys, cnf, terms = q.x_vars, q.y_vars, (), q.terms
    if len(xs) + len(ys) > cap:
        raise ResourceLimitError("qbf_bruteforce_vars", cap)

    pos = {v: i for i, v in enumerate(xs)}
    pos.update({v: len(xs) + i for i, v in enumerate(ys)})

    def masks(group):
        out = []
        for lits in group:
            p = n = 0
            for l in lits:
                if l > 0:
                    p |= 1 << pos[l]
                else:
                    n |= 1 << pos[-l]
            out.append((p, n))
        return out

    cnf_masks = masks(cnf)
    term_masks = masks(terms)
    for xbits in range(1 << len(xs)):
        if any(not (xbits & p) and not (n & ~xbits) for p, n in cnf_masks):
            continue
        ok = True
        for ybits in range(1 << len(ys)):
            bits = xbits | ybits << len(xs)
            if not any((bits & p) == p and not (bits & n) for p, n in term_masks):
                ok = False
                break
        if ok:
            return True, {v: bool(xbits >> i & 1) for i, v in enumerate(xs)}
    return False, None


def incidence_td_for(phi):
    """An incidence decomposition of phi with every clause placed in one
    bag together with all its variables (built over the primal graph)."""
    variables = sorted(set(phi.x_vars) | set(phi.y_vars))
    edges = []
    for group in (phi.cnf, phi.dnf):
        for lits in group:
            vs = sorted({abs(l) for l in lits})
            for a in range(len(vs)):
                for b in range(a + 1, len(vs)):
                    edges.append((vs[a], vs[b]))
    graph = LabelGraph(variables, edges)
    td = heuristic_decompose(graph)
    bags = [set(b) for b in td.bags]
    clauses = {}
    cnf_labels = set()
    counter = 0
    for group, is_cnf in ((phi.cnf, True), (phi.dnf, False)):
        for lits in group:
            label = ("c", counter)
            counter += 1
            clauses[label] = tuple(lits)
            vs = {abs(l) for l in lits}
            home = next(i for i, b in enumerate(bags) if vs <= b)
            bags[home].add(label)
            if is_cnf:
                cnf_labels.add(label)
    return AnnotatedTd(bags, td.tree_edges(), set(phi.y_vars), clauses,
                       cnf_labels, kind="incidence")


def e3cnffdnf_to_ea(phi, td=None):
    """Push the existential CNF into the universal matrix.

    One new universal variable per CNF clause plus one (y_C) guarding the
    original DNF terms; a final all-negative term covers the case where no
    new variable is raised.  Equisatisfiable with the input.
    """
    nxt = _next_var(phi.x_vars, phi.y_vars)
    clause_var = {}
    for i in range(len(phi.cnf)):
        clause_var[i] = nxt
        nxt += 1
    y_c = nxt
    nxt += 1

    new_terms = []
    for i, cl in enumerate(phi.cnf):
        for l in cl:
            t = _check_term((clause_var[i], l))
            if t is not None:
                new_terms.append(t)
    guarded = {}
    for t in phi.dnf:
        g = _check_term(t + (y_c,))
        guarded[t] = g
        if g is not None:
            new_terms.append(g)
    chi = tuple(sorted(-v for v in clause_var.values())) + (-y_c,)
    new_terms.append(chi)

    y_vars = tuple(phi.y_vars) + tuple(clause_var[i] for i in range(len(phi.cnf))) + (y_c,)
    q = QbfEA(tuple(phi.x_vars), y_vars, tuple(new_terms))
    if td is None:
        return q, None

    counter = 1 + max((k for _, k in td.clauses), default=-1)
    bags = [set(b) for b in td.bags]
    clauses = {}
    cnf_literals = {label: td.clauses[label] for label in td.cnf_labels}
    dnf_labels = [l for l in td.clauses if l not in td.cnf_labels]

    # replace each DNF term label by its y_C-guarded version in place
    relabel = {}
    for label in dnf_labels:
        g = guarded.get(td.clauses[label])
        if g is None:
            relabel[label] = None
        else:
            relabel[label] = label
            clauses[label] = g
    for i, b in enumerate(bags):
        for label in list(b):
            if not isinstance(label, int) and label in relabel and relabel[label] is None:
                b.discard(label)

    # each CNF clause d becomes <=3 terms (y_d and one literal), living in
    # the bags that held d together with the new universal variable y_d
    chi_label = ("c", counter)
    counter += 1
    clauses[chi_label] = chi
    label_to_index = {}
    for i, cl in enumerate(phi.cnf):
        for label in td.cnf_labels:
            if td.clauses[label] == cl and label not in label_to_index.values():
                label_to_index[i] = label
                break
    for i, cl in enumerate(phi.cnf):
        d_label = label_to_index[i]
        holders = [j for j, b in enumerate(bags) if d_label in b]
        new_labels = []
        for l in cl:
            t = _check_term((clause_var[i], l))
            if t is None:
                continue
            nl = ("c", counter)
            counter += 1
            clauses[nl] = t
            new_labels.append(nl)
        for j in holders:
            bags[j].discard(d_label)
            bags[j].add(clause_var[i])
            bags[j].update(new_labels)
    for b in bags:
        b.add(y_c)
        b.add(chi_label)

    new_td = AnnotatedTd(bags, td.tree_edges(), set(y_vars), clauses,
                         (), kind="incidence")
    return q, new_td


def split_to_3dnf(q, td):
    """Split every DNF term wider than 3 into a chain of 3-literal terms,
    one fresh universal variable per split, placed along the decomposition
    so new material stays near the bags already holding the term."""
    nxt = _next_var(q.x_vars, q.y_vars)
    bags = [set(b) for b in td.bags]
    clauses = dict(td.clauses)
    counter = 1 + max((k for _, k in clauses), default=-1)

    # rooted view of the tree
    n_nodes = len(bags)
    parent = {0: None}
    order = [0]
    depth = {0: 0}
    for node in order:
        for nb in sorted(td.tree[node]):
            if nb not in parent:
                parent[nb] = node
                depth[nb] = depth[node] + 1
                order.append(nb)

    def tree_path(a, b):
        """Nodes on the unique tree path between a and b (inclusive)."""
        left, right = [a], [b]
        while a != b:
            if depth[a] >= depth[b]:
                a = parent[a]
                left.append(a)
            else:
                b = parent[b]
                right.append(b)
        return left + right[:-1]

    var_nodes = {}

    def nodes_with(item):
        if item not in var_nodes:
            var_nodes[item] = {i for i, b in enumerate(bags) if item in b}
        return var_nodes[item]

    queue = [label for label, lits in clauses.items() if len(lits) > 3]
    while queue:
        label = queue.pop(0)
        lits = clauses[label]
        if len(lits) <= 3:
            continue
        home = sorted(i for i, b in enumerate(bags) if label in b)
        home_set = set(home)
        # pick one co-location node per literal, deepest first
        anchor = {}
        for l in lits:
            cands = nodes_with(abs(l)) & home_set
            if not cands:
                raise PreconditionError(
                    "decomposition does not cover clause %r" % (label,))
            anchor[l] = max(cands, key=lambda i: (depth[i], -i))
        # lowest home node whose subtree holds at least two anchors
        best = None
        for i in home:
            cover = [l for l in lits
                     if _is_ancestor(anchor[l], i, parent, depth)]
            if len(cover) >= 2:
                if best is None or depth[i] > depth[best[0]]:
                    best = (i, cover)
        B, cover = best
        cover.sort(key=lambda l: (depth[anchor[l]], -abs(l)), reverse=True)
        l1, l2 = cover[0], cover[1]
        z = nxt
        nxt += 1
        bags[B].add(z)
        var_nodes[z] = {B}

        first = _check_term((l1, l2, z))
        rest = _check_term(tuple(l for l in lits if l not in (l1, l2)) + (-z,))
        for i, b in enumerate(bags):
            b.discard(label)
        del clauses[label]
        if first is not None:
            nl = ("c", counter)
            counter += 1
            clauses[nl] = first
            spots = set(tree_path(anchor[l1], B)) | set(tree_path(anchor[l2], B))
            for i in spots:
                bags[i].add(nl)
        if rest is not None:
            nl = ("c", counter)
            counter += 1
            clauses[nl] = rest
            spots = {B}
            for l in lits:
                if l not in (l1, l2):
                    spots |= set(tree_path(anchor[l], B))
            for i in spots:
                bags[i].add(nl)
            if len(rest) > 3:
                queue.append(nl)

    y_vars = tuple(q.y_vars) + tuple(range(_next_var(q.x_vars, q.y_vars), nxt))
    terms = tuple(clauses[label] for label in sorted(clauses))
    q3 = QbfEA(tuple(q.x_vars), y_vars, terms)
    new_td = AnnotatedTd(bags, td.tree_edges(), set(y_vars), clauses,
                         (), kind="incidence")
    return q3, new_td


def _is_ancestor(node, anc, parent, depth):
    while depth[node] > depth[anc]:
        node = parent[node]
    return node == anc


def incidence_to_primal(td):
    """Replace each clause label by the variables it contains."""
    bags = []
    for b in td.bags:
        nb = set()
        for item in b:
            if isinstance(item, int):
                nb.add(item)
            else:
                nb.update(abs(l) for l in td.clauses[item])
        bags.append(nb)
    return AnnotatedTd(bags, td.tree_edges(), td.universal, td.clauses,
                       (), kind="primal")


def fresh_primal_td(q, heuristic="min-degree"):
    """Elimination-order decomposition of the primal graph of a 3-DNF
    matrix (min-degree by default; these graphs are large but sparse)."""
    variables = sorted(set(q.x_vars) | set(q.y_vars))
    edges = []
    for t in q.terms:
        vs = sorted({abs(l) for l in t})
        for a in range(len(vs)):
            for b in range(a + 1, len(vs)):
                edges.append((vs[a], vs[b]))
    graph = LabelGraph(variables, edges)
    td = heuristic_decompose(graph, heuristic=heuristic)
    clauses = {("c", i): t for i, t in enumerate(q.terms)}
    return AnnotatedTd(td.bags, td.tree_edges(), set(q.y_vars), clauses,
                       (), kind="primal")


def qbf_to_cnf(q, td):
    """Compile exists-forall 3-DNF into an equisatisfiable CNF.

    td must describe the primal graph of q's matrix; it is made nice here
    (rejecting inputs that cannot be).  Per nice bag B and per assignment
    sigma to B's universal variables, variable z_(B,sigma) says that sigma
    extends to an assignment of the universal variables of B's subtree
    falsifying every term contained in the subtree, and w_(B,sigma) says
    every term fully inside B is false under sigma and the existential
    assignment.  The formula is satisfiable iff no such falsifying
    extension exists at the root.
    """
    if not q.is_3dnf:
        raise PreconditionError("matrix is not in 3-DNF")
    if td.kind != "primal":
        raise PreconditionError("qbf_to_cnf needs a primal-graph decomposition")
    base = TreeDecomposition(td.bags, td.tree_edges())
    nice = make_nice(base)
    universal = td.universal
    nxt = _next_var(q.x_vars, q.y_vars)

    # occurrence nodes per variable, then terms fully contained per node
    occ = {}
    for i, b in enumerate(nice.bags):
        for v in b:
            occ.setdefault(v, set()).add(i)
    terms = [tuple(t) for t in q.terms]
    node_terms = {i: [] for i in range(len(nice.bags))}
    for t in terms:
        vs = {abs(l) for l in t}
        if not vs:
            continue
        homes = set.intersection(*(occ.get(v, set()) for v in vs))
        for i in homes:
            node_terms[i].append(t)

    clauses = []
    var_names = {}
    local_vars = {}
    zvar = {}  # (node, mask) -> var id, or None meaning constant true

    def new_var(name):
        nonlocal nxt
        v = nxt
        nxt += 1
        var_names[v] = name
        return v

    post = nice.postorder()
    for node in post:
        bag = nice.bags[node]
        u_b = sorted(v for v in bag if v in universal)
        e_b = sorted(v for v in bag if v not in universal)
        local = set(e_b)
        has_terms = bool(node_terms[node])

        for mask in range(1 << len(u_b)):
            sigma = {v: bool(mask >> i & 1) for i, v in enumerate(u_b)}
            bits = "".join("1" if sigma[v] else "0" for v in u_b)

            # w <-> no term inside this bag is true under (x, sigma);
            # skipped entirely (w constant true) when the bag holds no term
            w = None
            if has_terms:
                residuals = []
                truth_found = False
                for t in node_terms[node]:
                    res = []
                    dead = False
                    for l in t:
                        v = abs(l)
                        if v in sigma:
                            if sigma[v] != (l > 0):
                                dead = True
                                break
                        else:
                            res.append(l)
                    if dead:
                        continue
                    if not res:
                        truth_found = True
                        break
                    residuals.append(tuple(res))
                if truth_found or residuals:
                    w = new_var(("w", node, bits))
                    local.add(w)
                    if truth_found:
                        clauses.append((-w,))
                    else:
                        picks = []
                        for res in residuals:
                            clauses.append((-w,) + tuple(-l for l in res))
                            if len(res) == 1:
                                picks.append(res[0])
                            else:
                                a = new_var(("a", node, bits, res))
                                local.add(a)
                                for l in res:
                                    clauses.append((-a, l))
                                clauses.append((a,) + tuple(-l for l in res))
                                picks.append(a)
                        clauses.append((w,) + tuple(picks))

            # children's z values consistent with sigma
            kind = nice.kinds[node]
            if kind == NiceTreeDecomposition.LEAF:
                disjunction = None  # no subtree below: vacuously true
                conjuncts = []
            elif kind == NiceTreeDecomposition.JOIN:
                disjunction = None
                conjuncts = []
                for c in nice.children[node]:
                    zc = zvar[(c, mask)]
                    if zc is not None:
                        conjuncts.append(zc)
            else:  # introduce or forget (single child)
                child = nice.children[node][0]
                cu = sorted(v for v in nice.bags[child] if v in universal)
                kids = []
                for cmask in range(1 << len(cu)):
                    if all((cmask >> i & 1) == sigma[v]
                           for i, v in enumerate(cu) if v in sigma):
                        kids.append(zvar[(child, cmask)])
                if None in kids or not kids:
                    disjunction = None  # some extension below is already true
                else:
                    disjunction = kids
                conjuncts = []

            # z <-> w and (disjunction over child extensions) and conjuncts
            parts = conjuncts[:]
            if w is not None:
                parts.append(w)
            if disjunction is not None and len(disjunction) == 1:
                parts.append(disjunction[0])
                disjunction = None
            if disjunction is None and not parts:
                z = None
            elif disjunction is None and len(parts) == 1:
                z = parts[0]
            else:
                z = new_var(("z", node, bits))
                local.add(z)
                for p in parts:
                    clauses.append((-z, p))
                back = (z,) + tuple(-p for p in parts)
                if disjunction is not None:
                    clauses.append(tuple([-z] + disjunction))
                    for zc in disjunction:
                        clauses.append(back[:1] + tuple(-p for p in parts) + (-zc,))
                else:
                    clauses.append(back)
            zvar[(node, mask)] = z

        # aliased z ids must appear along the whole alias chain
        for mask in range(1 << len(u_b)):
            if zvar[(node, mask)] is not None:
                local.add(zvar[(node, mask)])
        local_vars[node] = local

    z_root = zvar[(nice.root, 0)]
    if z_root is None:
        # every universal assignment falsifies the (empty) matrix
        clauses.append(())
    else:
        clauses.append((-z_root,))

    cnf = Cnf(clauses, nxt - 1, var_names)
    edges = [(i, c) for i in range(len(nice.bags)) for c in nice.children[i]]
    out_bags = []
    for i in range(len(nice.bags)):
        bag = set(local_vars[i])
        for c in nice.children[i]:
            bag |= local_vars[c]
        out_bags.append(bag)
    clause_map = {("c", i): tuple(cl) for i, cl in enumerate(clauses)}
    out_td = AnnotatedTd(out_bags, edges, set(), clause_map, (), kind="primal")
    out_td.root = nice.root
    # stats for the size-bound property: bag count and per-bag var counts
    out_td.stats = {
        "bags": len(nice.bags),
        "sum_pow_univ": sum(1 << len([v for v in b if v in universal])
                            for b in nice.bags),
        "t_exists": max((len([v for v in b if v not in universal])
                         for b in nice.bags), default=0),
        "t_forall": max((len([v for v in b if v in universal])
                         for b in nice.bags), default=0),
    }
    return cnf, out_td


def _root_tree(tree, root):
    parent = {root: None}
    order = [root]
    for node in order:
        for nb in sorted(tree[node]):
            if nb not in parent:
                parent[nb] = node
                order.append(nb)
    return parent, order


def sat_treewidth(cnf, td, max_states=20_000_000):
    """CNF satisfiability by DP over a tree decomposition of the primal
    graph.  Every clause must fit in some bag.  Returns (True, model) or
    (False, None); models are checked against every clause before return.
    """
    bags = [frozenset(v for v in b if isinstance(v, int)) for b in td.bags]
    tree = td.tree
    root = getattr(td, "root", 0)
    parent, order = _root_tree(tree, root)
    children = {i: [] for i in range(len(bags))}
    for node in order[1:]:
        children[parent[node]].append(node)

    # assign each clause to one bag containing it
    occ = {}
    for i, b in enumerate(bags):
        for v in b:
            occ.setdefault(v, []).append(i)
    homed = {i: [] for i in range(len(bags))}
    for cl in cnf.clauses:
        vs = {abs(l) for l in cl}
        if not vs:
            return False, None
        cands = set(occ.get(next(iter(vs)), []))
        for v in vs:
            cands &= set(occ.get(v, []))
        if not cands:
            raise PreconditionError("clause %r not contained in any bag" % (cl,))
        homed[min(cands)].append(cl)

    tables = {}
    total = 0
    for node in reversed(order):
        bag = sorted(bags[node])
        bag_idx = {v: i for i, v in enumerate(bag)}
        kids = children[node]

        # project each child's states onto the shared variables
        merged = {(): ()}  # partial key over accumulated shared vars -> chosen child states
        acc_vars = []
        for c in kids:
            cbag = sorted(bags[c])
            shared = [v for v in cbag if v in bag_idx]
            spos = [cbag.index(v) for v in shared]
            proj = {}
            for state in tables[c]:
                key = tuple(state[p] for p in spos)
                if key not in proj:
                    proj[key] = state
            overlap = [v for v in shared if v in set(acc_vars)]
            opos_acc = [acc_vars.index(v) for v in overlap]
            opos_new = [shared.index(v) for v in overlap]
            addpos = [i for i, v in enumerate(shared) if v not in set(acc_vars)]
            new_merged = {}
            grouped = {}
            for key, state in proj.items():
                gk = tuple(key[p] for p in opos_new)
                grouped.setdefault(gk, []).append((key, state))
            for pkey, chosen in merged.items():
                gk = tuple(pkey[p] for p in opos_acc)
                for key, state in grouped.get(gk, ()):
                    nk = pkey + tuple(key[p] for p in addpos)
                    if nk not in new_merged:
                        new_merged[nk] = chosen + ((c, state),)
            merged = new_merged
            acc_vars = acc_vars + [v for v in shared if v not in set(acc_vars)]
            if not merged:
                break

        # extend to the full bag, pruning with clauses assigned here
        ext = [v for v in bag if v not in set(acc_vars)]
        var_order = acc_vars + ext
        pos = {v: i for i, v in enumerate(var_order)}
        trigger = {}
        immediate = []
        for cl in homed[node]:
            last = max(pos[abs(l)] for l in cl)
            if last < len(acc_vars):
                immediate.append(cl)
            else:
                trigger.setdefault(var_order[last], []).append(cl)

        def ok(assign_list, cl):
            return any((assign_list[pos[abs(l)]] == (l > 0)) for l in cl)

        states = {}
        for pkey, chosen in merged.items():
            al = list(pkey)
            if all(ok(al, cl) for cl in immediate):
                states[pkey] = chosen
        for v in ext:
            new_states = {}
            checks = trigger.get(v, ())
            for pkey, chosen in states.items():
                for val in (False, True):
                    al = list(pkey) + [val]
                    if all(ok(al, cl) for cl in checks):
                        new_states[tuple(al)] = chosen
            states = new_states
            total += len(states)
            if total > max_states:
                raise ResourceLimitError("sat_dp_states", max_states)
            if not states:
                break

        # reorder keys into sorted-bag order
        table = {}
        perm = [var_order.index(v) for v in bag]
        for key, chosen in states.items():
            table[tuple(key[p] for p in perm)] = (var_order, key, chosen)
        tables[node] = table
        if not table:
            return False, None

    # reconstruct a model
    model = {}
    pick = next(iter(sorted(tables[root])))
    stack = [(root, pick)]
    while stack:
        node, key = stack.pop()
        var_order, full_key, chosen = tables[node][key]
        bagv = sorted(bags[node])
        perm_key = dict(zip(bagv, key))
        model.update(perm_key)
        for c, cstate in chosen:
            cb = sorted(bags[c])
            stack.append((c, cstate))
    for v in cnf.variables():
        model.setdefault(v, False)
    for cl in cnf.clauses:
        assert any(model[abs(l)] == (l > 0) for l in cl), "model check failed"
    return True, model


def to_dimacs(cnf):
    lines = ["p cnf %d %d" % (cnf.num_vars, len(cnf.clauses))]
    for cl in cnf.clauses:
        lines.append(" ".join(str(l) for l in cl) + " 0")
    return "\n".join(lines) + "\n"


def to_qdimacs(q):
    """Prenex exists-forall DNF as QDIMACS (matrix listed as terms)."""
    nv = max([0] + [abs(l) for t in q.terms for l in t]
             + list(q.x_vars) + list(q.y_vars))
    lines = ["p cnf %d %d" % (nv, len(q.terms))]
    if q.x_vars:
        lines.append("e " + " ".join(str(v) for v in q.x_vars) + " 0")
    if q.y_vars:
        lines.append("a " + " ".join(str(v) for v in q.y_vars) + " 0")
    for t in q.terms:
        lines.append(" ".join(str(l) for l in t) + " 0")
    return "\n".join(lines) + "\n"
