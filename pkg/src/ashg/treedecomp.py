"""Tree decompositions: validation, elimination heuristics, nice form, PACE I/O.

PACE 2017 ``.td`` files are 1-based; everything internal is 0-based, with
conversion happening only in read_td/emit_td.
"""

from ashg.errors import ParseError


class TreeDecomposition:
    """Bags indexed 0..k-1 plus an undirected tree on the bag indices."""

    def __init__(self, bags, tree_edges):
        self.bags = [frozenset(b) for b in bags]
        self.tree = {i: set() for i in range(len(self.bags))}
        for i, j in tree_edges:
            self.tree[i].add(j)
            self.tree[j].add(i)

    @property
    def width(self):
        return max((len(b) for b in self.bags), default=0) - 1

    def tree_edges(self):
        return [(i, j) for i in self.tree for j in self.tree[i] if i < j]

    def __len__(self):
        return len(self.bags)


class NiceTreeDecomposition:
    """Rooted decomposition built from leaf/introduce/forget/join nodes.

    Leaves and the root have empty bags; introduce/forget nodes change the
    bag by exactly one vertex; join children repeat the parent bag.
    """

    LEAF = "leaf"
    INTRODUCE = "introduce"
    FORGET = "forget"
    JOIN = "join"

    def __init__(self):
        self.kinds = []
        self.vertex = []
        self.bags = []
        self.children = []
        self.root = None

    def _add(self, kind, vertex, bag, children):
        self.kinds.append(kind)
        self.vertex.append(vertex)
        self.bags.append(frozenset(bag))
        self.children.append(list(children))
        return len(self.kinds) - 1

    @property
    def width(self):
        return max((len(b) for b in self.bags), default=0) - 1

    def __len__(self):
        return len(self.kinds)

    def postorder(self):
        """Node ids, children before parents, without recursion."""
        out = []
        stack = [(self.root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                out.append(node)
            else:
                stack.append((node, True))
                for c in self.children[node]:
                    stack.append((c, False))
        return out

    def as_td(self):
        edges = [(i, c) for i in range(len(self)) for c in self.children[i]]
        return TreeDecomposition(self.bags, edges)


def validate_td(inst, td):
    """None when td is a valid decomposition of inst, else a violation report.

    inst may be any graph-like object exposing vertices(), edges, and
    neighbors(); vertex labels need not be 0..n-1.
    """
    k = len(td.bags)
    if k == 0:
        return "decomposition has no bags"
    vertex_set = set(inst.vertices())
    for i, b in enumerate(td.bags):
        for v in b:
            if v not in vertex_set:
                return "bag %d references unknown vertex %r" % (i, v)
    # tree shape: connected with k-1 edges
    edge_count = sum(len(nb) for nb in td.tree.values()) // 2
    if edge_count != k - 1:
        return "tree has %d edges, expected %d" % (edge_count, k - 1)
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in td.tree[i]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    if len(seen) != k:
        return "tree is disconnected"
    # every vertex occurs somewhere
    occ = {v: [] for v in inst.vertices()}
    for i, b in enumerate(td.bags):
        for v in b:
            occ[v].append(i)
    for v in inst.vertices():
        if not occ[v]:
            return "vertex %r occurs in no bag" % (v,)
    # every edge covered by a bag
    for u, v, _ in inst.edges:
        if not any(u in b and v in b for b in td.bags):
            return "edge (%r,%r) covered by no bag" % (u, v)
    # occurrences of each vertex induce a connected subtree
    for v in inst.vertices():
        nodes = set(occ[v])
        start = occ[v][0]
        comp = {start}
        stack = [start]
        while stack:
            i = stack.pop()
            for j in td.tree[i]:
                if j in nodes and j not in comp:
                    comp.add(j)
                    stack.append(j)
        if comp != nodes:
            return "occurrences of vertex %r are disconnected" % (v,)
    return None


class LabelGraph:
    """Minimal graph over arbitrary hashable labels, for the decomposition
    and validation helpers (formula primal/incidence graphs)."""

    def __init__(self, vertices, edge_pairs):
        self._vertices = list(vertices)
        self._adj = {v: {} for v in self._vertices}
        self.edges = []
        for u, v in edge_pairs:
            if u == v or v in self._adj[u]:
                continue
            self._adj[u][v] = 0
            self._adj[v][u] = 0
            self.edges.append((u, v, 0))

    def vertices(self):
        return self._vertices

    def neighbors(self, u):
        return self._adj[u]


def _min_degree_order(adj):
    import heapq

    order = []
    adj = {u: set(nb) for u, nb in adj.items()}
    heap = [(len(nb), u) for u, nb in adj.items()]
    heapq.heapify(heap)
    while heap:
        d, u = heapq.heappop(heap)
        if u not in adj or len(adj[u]) != d:
            continue  # stale entry
        order.append(u)
        nb = adj[u]
        for a in nb:
            adj[a].discard(u)
            adj[a].update(nb - {a})
        del adj[u]
        for a in nb:
            heapq.heappush(heap, (len(adj[a]), a))
    return order


def _fill_count(adj, u):
    nb = list(adj[u])
    count = 0
    for i in range(len(nb)):
        for j in range(i + 1, len(nb)):
            if nb[j] not in adj[nb[i]]:
                count += 1
    return count


def _min_fill_order(adj):
    order = []
    adj = {u: set(nb) for u, nb in adj.items()}
    while adj:
        u = min(adj, key=lambda x: (_fill_count(adj, x), x))
        order.append(u)
        nb = adj[u]
        for a in nb:
            adj[a].discard(u)
            adj[a].update(nb - {a})
        del adj[u]
    return order


def decompose_from_order(inst, order):
    """Tree decomposition induced by an elimination order."""
    adj = {u: set(inst.neighbors(u)) for u in inst.vertices()}
    cliques = []
    for v in order:
        nb = adj[v]
        cliques.append(frozenset(nb))
        for a in nb:
            adj[a].discard(v)
            adj[a].update(nb - {a})
        del adj[v]
    if not order:
        return TreeDecomposition([frozenset()], [])
    # bag of v is {v} + its neighbors at elimination time; it hangs below the
    # bag of the clique member eliminated next, whose bag contains the rest
    pos = {v: i for i, v in enumerate(order)}
    bags = [cliques[i] | {order[i]} for i in range(len(order))]
    edges = []
    for i in range(len(order)):
        if cliques[i]:
            parent = min(cliques[i], key=lambda v: pos[v])
            edges.append((i, pos[parent]))
        elif i + 1 < len(order):
            # disconnected remainder: chain to keep the bags a tree
            edges.append((i, i + 1))
    return TreeDecomposition(bags, edges)


def heuristic_decompose(inst, heuristic="min-fill"):
    adj = {u: set(inst.neighbors(u)) for u in inst.vertices()}
    if heuristic == "min-degree":
        order = _min_degree_order(adj)
    elif heuristic == "min-fill":
        order = _min_fill_order(adj)
    else:
        raise ValueError("unknown heuristic %r" % heuristic)
    return decompose_from_order(inst, order)


def make_nice(td, root=0):
    """Convert a valid decomposition to nice form of the same width."""
    nice = NiceTreeDecomposition()

    def chain_up(below, frm, to):
        """Forget frm-to, then introduce to-frm, returning the top node id."""
        node = below
        bag = set(frm)
        for v in sorted(frm - to):
            bag.discard(v)
            node = nice._add(NiceTreeDecomposition.FORGET, v, bag, [node])
        for v in sorted(to - frm):
            bag.add(v)
            node = nice._add(NiceTreeDecomposition.INTRODUCE, v, bag, [node])
        return node

    def leaf_chain(bag):
        node = nice._add(NiceTreeDecomposition.LEAF, None, frozenset(), [])
        return chain_up(node, frozenset(), bag)

    # iterative post-order over the rooted input tree
    parent = {root: None}
    post = []
    stack = [(root, False)]
    while stack:
        t, expanded = stack.pop()
        if expanded:
            post.append(t)
            continue
        stack.append((t, True))
        for s in sorted(td.tree[t]):
            if s != parent.get(t, None) and s not in parent:
                parent[s] = t
                stack.append((s, False))

    top = {}  # td node -> nice node with that bag on top
    for t in post:
        bag = td.bags[t]
        kids = [s for s in sorted(td.tree[t]) if parent.get(s) == t]
        if not kids:
            top[t] = leaf_chain(bag)
            continue
        converted = [chain_up(top[s], td.bags[s], bag) for s in kids]
        node = converted[0]
        for other in converted[1:]:
            node = nice._add(NiceTreeDecomposition.JOIN, None, bag, [node, other])
        top[t] = node

    nice.root = chain_up(top[root], td.bags[root], frozenset())
    return nice


def read_td(text, inst):
    header = None
    bags = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "s":
            if header is not None:
                raise ParseError("duplicate 's td' header", lineno)
            if len(parts) != 5 or parts[1] != "td":
                raise ParseError("expected 's td <#bags> <max-bag-size> <n>'", lineno)
            header = (int(parts[2]), int(parts[3]), int(parts[4]))
        elif parts[0] == "b":
            if header is None:
                raise ParseError("bag before header", lineno)
            bid = int(parts[1])
            if not 1 <= bid <= header[0]:
                raise ParseError("bag id %d out of range" % bid, lineno)
            if bid in bags:
                raise ParseError("duplicate bag %d" % bid, lineno)
            verts = [int(tok) - 1 for tok in parts[2:]]
            for v in verts:
                if not 0 <= v < inst.n:
                    raise ParseError("bag references unknown vertex %d" % (v + 1), lineno)
            bags[bid] = frozenset(verts)
        else:
            if header is None:
                raise ParseError("edge before header", lineno)
            if len(parts) != 2:
                raise ParseError("expected tree edge '<i> <j>'", lineno)
            i, j = int(parts[0]), int(parts[1])
            if not (1 <= i <= header[0] and 1 <= j <= header[0]):
                raise ParseError("tree edge references unknown bag", lineno)
            edges.append((i - 1, j - 1))
    if header is None:
        raise ParseError("missing 's td' header")
    nbags = header[0]
    if set(bags) != set(range(1, nbags + 1)):
        raise ParseError("header declares %d bags, found %d" % (nbags, len(bags)))
    if len(edges) != nbags - 1:
        raise ParseError("expected %d tree edges, found %d" % (nbags - 1, len(edges)))
    td = TreeDecomposition([bags[i] for i in range(1, nbags + 1)], edges)
    # reject non-tree edge sets (cycles disguised by correct edge count)
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in td.tree[i]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    if len(seen) != nbags:
        raise ParseError("tree edges do not form a tree")
    return td


def emit_td(td, n):
    max_bag = max((len(b) for b in td.bags), default=0)
    lines = ["s td %d %d %d" % (len(td.bags), max_bag, n)]
    for i, b in enumerate(td.bags):
        lines.append(("b %d %s" % (i + 1, " ".join(str(v + 1) for v in sorted(b)))).rstrip())
    for i, j in sorted(td.tree_edges()):
        lines.append("%d %d" % (i + 1, j + 1))
    return "\n".join(lines) + "\n"
