"""Tree decompositions: min-fill construction, validation and nice form."""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Callable, Iterable

LEAF, INTRODUCE, FORGET, JOIN = "leaf", "introduce", "forget", "join"


@dataclass
class TreeDecomposition:
    """Bags joined by tree edges over bag indices.

    ``kinds``/``vertex`` are filled in for nice decompositions: node ``t`` is a
    leaf, introduces or forgets ``vertex[t]``, or joins two children.
    """

    bags: list
    edges: list
    root: int = 0
    kinds: list | None = None
    vertex: list | None = None
    _children: dict | None = field(default=None, repr=False, compare=False)

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    @property
    def is_nice(self) -> bool:
        return self.kinds is not None

    def neighbors(self) -> dict[int, list[int]]:
        nb: dict[int, list[int]] = defaultdict(list)
        for a, b in self.edges:
            nb[a].append(b)
            nb[b].append(a)
        return nb

    def children(self) -> dict[int, list[int]]:
        """Children of each node when the tree hangs from ``root``."""
        if self._children is None:
            nb = self.neighbors()
            kids: dict[int, list[int]] = {t: [] for t in range(len(self.bags))}
            seen = {self.root}
            queue = deque([self.root])
            while queue:
                t = queue.popleft()
                for s in sorted(nb[t]):
                    if s not in seen:
                        seen.add(s)
                        kids[t].append(s)
                        queue.append(s)
            self._children = kids
        return self._children

    def postorder(self) -> list[int]:
        kids = self.children()
        out, stack = [], [(self.root, False)]
        while stack:
            t, done = stack.pop()
            if done:
                out.append(t)
                continue
            stack.append((t, True))
            for c in reversed(kids[t]):
                stack.append((c, False))
        return out


def _pairs(edges) -> list[tuple[int, int]]:
    return [(e[0], e[1]) for e in edges if e[0] != e[1]]


def elimination_order(vertices: Iterable[int], edges) -> list[int]:
    """Greedy min-fill order; ties go to smaller degree, then smaller id."""
    adj: dict[int, set[int]] = {v: set() for v in vertices}
    for u, v in _pairs(edges):
        adj[u].add(v)
        adj[v].add(u)
    order = []
    while adj:
        def key(v):
            nb = list(adj[v])
            fill = sum(1 for i, a in enumerate(nb) for b in nb[i + 1:] if b not in adj[a])
            return (fill, len(nb), v)
        v = min(adj, key=key)
        nb = adj.pop(v)
        for a in nb:
            adj[a].discard(v)
            adj[a].update(nb - {a})
        order.append(v)
    return order


def decompose(vertices: Iterable[int], edges, root_vertex: int | None = None) -> TreeDecomposition:
    """Tree decomposition from the min-fill elimination order.

    Bags that are subsets of a neighbouring bag are merged away. The root is
    a bag containing ``root_vertex`` when given.
    """
    vertices = sorted(set(vertices))
    if not vertices:
        return TreeDecomposition([frozenset()], [], 0)
    order = elimination_order(vertices, edges)
    pos = {v: i for i, v in enumerate(order)}
    adj: dict[int, set[int]] = {v: set() for v in vertices}
    for u, v in _pairs(edges):
        adj[u].add(v)
        adj[v].add(u)
    bag_of: dict[int, frozenset] = {}
    parent_of: dict[int, int | None] = {}
    for v in order:
        later = {u for u in adj[v] if pos[u] > pos[v]}
        bag_of[v] = frozenset(later | {v})
        parent_of[v] = min(later, key=pos.__getitem__) if later else None
        for a in later:
            adj[a].update(later - {a})
    # disconnected pieces hang off the last eliminated vertex
    last = order[-1]
    for v in order:
        if parent_of[v] is None and v != last:
            parent_of[v] = last

    # merge each bag into a neighbour that contains it
    alive = {v: set(bag_of[v]) for v in order}
    parent = dict(parent_of)
    kids: dict[int, set[int]] = defaultdict(set)
    for v, p in parent.items():
        if p is not None:
            kids[p].add(v)
    changed = True
    while changed:
        changed = False
        for v in list(order):
            if v not in alive:
                continue
            p = parent[v]
            if p is not None and alive[v] <= alive[p]:
                target = p
            else:
                target = next((c for c in sorted(kids[v]) if alive[v] <= alive[c]), None)
            if target is None:
                continue
            # fold v into target: v's other neighbours attach to target
            alive[target] |= alive[v]
            for c in kids[v] - {target}:
                parent[c] = target
                kids[target].add(c)
            if p is not None:
                kids[p].discard(v)
                if target != p:
                    parent[target] = p
                    kids[p].add(target)
            else:
                parent[target] = None
            kids[target].discard(v)
            del alive[v], parent[v], kids[v]
            changed = True
    ids = {v: i for i, v in enumerate(v for v in order if v in alive)}
    bags = [frozenset(alive[v]) for v in ids]
    tree_edges = [(ids[v], ids[p]) for v, p in parent.items() if p is not None]
    root = 0
    if root_vertex is not None:
        root = next((i for i, b in enumerate(bags) if root_vertex in b), 0)
    else:
        root = ids[next(v for v in reversed(order) if v in alive)]
    return TreeDecomposition(bags, sorted(tree_edges), root)


@dataclass(frozen=True)
class TDViolation:
    prop: int
    message: str
    witness: object

    def __str__(self):
        return f"property {self.prop}: {self.message} (witness {self.witness!r})"


def validate(td: TreeDecomposition, vertices: Iterable[int], edges) -> list[TDViolation]:
    """Check the tree shape and the three decomposition properties exhaustively.

    Property 0 stands for "the bags do not form a tree".
    """
    out: list[TDViolation] = []
    k = len(td.bags)
    nb = td.neighbors()
    if len(td.edges) != k - 1:
        out.append(TDViolation(0, f"{len(td.edges)} tree edges for {k} bags", td.edges))
    seen = {0} if k else set()
    queue = deque(seen)
    while queue:
        t = queue.popleft()
        for s in nb[t]:
            if s not in seen:
                seen.add(s)
                queue.append(s)
    if len(seen) != k:
        out.append(TDViolation(0, "bags are not connected", sorted(set(range(k)) - seen)))
    holders: dict[int, list[int]] = defaultdict(list)
    for t, bag in enumerate(td.bags):
        for v in bag:
            holders[v].append(t)
    for v in sorted(set(vertices)):
        if v not in holders:
            out.append(TDViolation(1, f"vertex {v} is in no bag", v))
    for u, v in _pairs(edges):
        if not any(v in td.bags[t] for t in holders.get(u, ())):
            out.append(TDViolation(2, f"edge ({u}, {v}) is in no bag", (u, v)))
    for v, ts in sorted(holders.items()):
        tset = set(ts)
        reach = {ts[0]}
        queue = deque(reach)
        while queue:
            t = queue.popleft()
            for s in nb[t]:
                if s in tset and s not in reach:
                    reach.add(s)
                    queue.append(s)
        if reach != tset:
            out.append(TDViolation(3, f"bags holding {v} are disconnected", sorted(tset - reach)))
    return out


def with_vertex_in_all_bags(td: TreeDecomposition, v: int) -> TreeDecomposition:
    return TreeDecomposition([b | {v} for b in td.bags], list(td.edges), td.root)


def to_nice_form(td: TreeDecomposition, pinned: int | None = None,
                 forget_key: Callable[[int], object] | None = None,
                 empty_root: bool = False) -> TreeDecomposition:
    """Rooted binary nice decomposition with the same width.

    Leaves have empty bags. ``pinned`` is introduced before and forgotten after
    every other vertex of a chain; among the rest, forgets follow
    ``forget_key`` (default: vertex id). With ``empty_root`` the root bag is
    forgotten down to the empty set.
    """
    kids = td.children()
    bags: list[frozenset] = []
    kinds: list[str] = []
    verts: list[int | None] = []
    edges: list[tuple[int, int]] = []

    def node(bag, kind, v=None, below=()):
        bags.append(frozenset(bag))
        kinds.append(kind)
        verts.append(v)
        t = len(bags) - 1
        edges.extend((c, t) for c in below)
        return t

    def intro_order(vs):
        return sorted(vs, key=lambda v: (v != pinned, v))

    def forget_order(vs):
        base = forget_key or (lambda v: v)
        return sorted(vs, key=lambda v: (v == pinned, base(v), v))

    def morph(t, cur, target):
        for v in forget_order(cur - target):
            cur = cur - {v}
            t = node(cur, FORGET, v, (t,))
        for v in intro_order(target - cur):
            cur = cur | {v}
            t = node(cur, INTRODUCE, v, (t,))
        return t

    top: dict[int, int] = {}
    for t in td.postorder():
        bag = frozenset(td.bags[t])
        if not kids[t]:
            top[t] = morph(node(frozenset(), LEAF), frozenset(), bag)
            continue
        branches = [morph(top[c], frozenset(td.bags[c]), bag) for c in kids[t]]
        cur = branches[0]
        for b in branches[1:]:
            cur = node(bag, JOIN, None, (cur, b))
        top[t] = cur
    root = top[td.root]
    if empty_root:
        root = morph(root, frozenset(td.bags[td.root]), frozenset())
    return TreeDecomposition(bags, edges, root, kinds, verts)
