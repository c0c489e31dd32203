"""Exact CVRP by dynamic programming over a nice tree decomposition.

The depot is added to every bag. A tour is treated as a sequence of hops
between vertices that share a bag, each hop costing the shortest-path
distance; since every graph edge lies in some bag this loses nothing, and it
frees the table from parity bookkeeping. WLOG a tour meets the depot only at
its two ends (otherwise split it).

At a node ``t`` the hops with an endpoint already forgotten form vertex-disjoint
*segments*: paths whose interior vertices are forgotten and whose two ends lie
in the bag. A table entry is the multiset of open segments, each reduced to
``(end, end, clients served)``; segments with both ends at the depot are
finished tours and leave the state. Forgotten clients are always served.

* introduce: the table is unchanged.
* join: the children's segment multisets are disjoint, so take their unions.
* forget ``a``: every segment end at ``a`` is either spliced to another end at
  ``a`` or extended by a hop to a bag vertex. If ``a`` is a client, exactly one
  of these visits serves it, or else a fresh segment ``b -> a -> c`` is created
  for it. Other visits to ``a`` can be shortcut and are not generated.

A segment that already serves Q clients is routed straight home: nothing can
be spliced onto it, and the depot shares every bag.
"""
from __future__ import annotations

from .errors import CapacityPlanningError
from .graph import Instance, Metric, shortest_paths
from .solution import Solution, walk_through
from .treedecomp import (FORGET, INTRODUCE, JOIN, LEAF, TreeDecomposition, decompose,
                         to_nice_form, validate, with_vertex_in_all_bags)

# a segment is (path, clients_served_count, served_clients_in_path_order)


def _normalize(seg):
    p, k, sv = seg
    if p[0] > p[-1] or (p[0] == p[-1] and p[::-1] < p):
        return (p[::-1], k, sv[::-1])
    return seg


def _pack(segs):
    segs = sorted((_normalize(s) for s in segs), key=lambda s: (s[0][0], s[0][-1], s[1], s[0]))
    key = tuple((s[0][0], s[0][-1], s[1]) for s in segs)
    return key, tuple(segs)


def _forget_moves(segs, a, others, is_client, cap, dist, r, pass_to=None, plain_splice=True):
    """All ``(added_cost, open_segments, closed_tours)`` results of forgetting ``a``.

    ``pass_to`` limits where an end may continue when ``a`` is merely passed
    through (None: anywhere); ``plain_splice`` allows joining two ends at ``a``
    without serving it.
    """
    pending, untouched = [], []
    for s in segs:
        (pending if s[0][0] == a or s[0][-1] == a else untouched).append(s)
    da = dist[a]
    out = []

    def place(seg, pend, done, closed, cost):
        p, k, sv = seg
        if k == cap and (p[0] != r or p[-1] != r):
            # a full segment can never be spliced again: route both ends home
            cost += dist[p[0]][r] + dist[p[-1]][r]
            seg = (((r,) if p[0] != r else ()) + p + ((r,) if p[-1] != r else ()), k, sv)
            p = seg[0]
        if p[0] == a or p[-1] == a:
            return [seg] + pend, done, closed, cost
        if p[0] == r and p[-1] == r:
            return pend, done, closed + [seg], cost
        return pend, done + [seg], closed, cost

    def resolve(pend, done, closed, cost, served):
        if not pend:
            if is_client and not served:
                for i, b in enumerate(others):
                    for c in others[i:]:
                        seg = ((b, a, c), 1, (a,))
                        _, d2, z2, c2 = place(seg, [], done, closed, cost + da[b] + da[c])
                        out.append((c2, d2, z2))
            else:
                out.append((cost, done, closed))
            return
        p, k, sv = pend[0]
        rest = pend[1:]
        if p[-1] != a:
            p, sv = p[::-1], sv[::-1]
        serve_opts = (False, True) if is_client and not served else (False,)
        tried = set()
        for j, (q, k2, sv2) in enumerate(rest):
            if q[0] != a:
                q, sv2 = q[::-1], sv2[::-1]
            sig = (q[-1], k2)
            if sig in tried:
                continue
            tried.add(sig)
            remaining = rest[:j] + rest[j + 1:]
            for serve in serve_opts:
                kk = k + k2 + serve
                if kk > cap or not (serve or plain_splice):
                    continue
                merged = (p + q[1:], kk, sv + ((a,) if serve else ()) + sv2)
                resolve(*place(merged, remaining, done, closed, cost), served or serve)
        for t in others:
            for serve in serve_opts:
                kk = k + serve
                if kk > cap or not (serve or pass_to is None or t in pass_to):
                    continue
                ext = (p + (t,), kk, sv + ((a,) if serve else ()))
                resolve(*place(ext, rest, done, closed, cost + da[t]), served or serve)

    resolve(pending, list(untouched), [], 0, False)
    return out


def _offer(table, key, cost, segs, closed):
    old = table.get(key)
    if old is None or cost < old[0]:
        table[key] = (cost, segs, closed)


def _cobagged(td: TreeDecomposition) -> dict[int, set[int]]:
    out: dict[int, set[int]] = {}
    for bag in td.bags:
        for v in bag:
            out.setdefault(v, set()).update(bag)
    return out


def _shortcut_rules(a, forgotten, others, cobag):
    """Which non-serving visits to ``a`` survive the shortcut argument.

    A segment end at ``a`` arrives from some forgotten vertex sharing a bag
    with ``a``. Passing through ``a`` to ``u`` is pointless when every such
    predecessor shares a bag with ``u`` (hop there directly instead), and so
    is joining two ends at ``a`` when those predecessors pairwise share bags.
    The test ranges over all possible predecessors, so it depends only on the
    node and never on which partial solution a table entry happens to store.
    """
    preds = [p for p in forgotten if p in cobag[a]]
    if not preds:
        return None, True
    pass_to = {u for u in others if not all(u in cobag[p] for p in preds)}
    plain_splice = not all(q in cobag[p] for p in preds for q in preds)
    return pass_to, plain_splice


def nice_decomposition_for(inst: Instance, decomposition: TreeDecomposition | None = None) -> TreeDecomposition:
    """Validated nice form with the depot in every bag, non-clients forgotten first."""
    edges = [(u, v) for u, v, _ in inst.edges]
    if decomposition is None:
        decomposition = decompose(range(inst.n), edges, root_vertex=inst.depot)
    problems = validate(decomposition, range(inst.n), edges)
    if problems:
        raise ValueError(f"invalid tree decomposition: {problems[0]}")
    clients = set(inst.client_vertices)
    td = with_vertex_in_all_bags(decomposition, inst.depot)
    return to_nice_form(td, pinned=inst.depot, forget_key=lambda v: v in clients, empty_root=True)


def solve_dp(inst: Instance, decomposition: TreeDecomposition | None = None,
             metric: Metric | None = None, max_states: int | None = None) -> Solution:
    """Minimum-cost solution of a unit-demand instance.

    ``decomposition`` may be any valid tree decomposition of the instance graph
    (min-fill by default). ``max_states`` caps the size of any one table; going
    over raises CapacityPlanningError.
    """
    if not inst.unit_demand:
        raise ValueError("solve_dp needs unit demands; apply reduce_demands first")
    r, cap = inst.depot, inst.capacity
    if metric is None:
        metric = shortest_paths(inst)
    dist = metric.matrix()
    clients = set(inst.client_vertices)
    nice = nice_decomposition_for(inst, decomposition)
    kids = nice.children()
    cobag = _cobagged(nice)
    forgotten: dict[int, frozenset] = {}
    tables: dict[int, dict] = {}
    for t in nice.postorder():
        below = frozenset().union(*(forgotten[c] for c in kids[t]))
        forgotten[t] = below | {nice.vertex[t]} if nice.kinds[t] == FORGET else below
        kind = nice.kinds[t]
        if kind == LEAF:
            tables[t] = {(): (0, (), ())}
        elif kind == INTRODUCE:
            tables[t] = tables.pop(kids[t][0])
        elif kind == JOIN:
            left, right = (tables.pop(c) for c in kids[t])
            table: dict = {}
            for c1, s1, z1 in left.values():
                for c2, s2, z2 in right.values():
                    key, segs = _pack(s1 + s2)
                    _offer(table, key, c1 + c2, segs, z1 + z2)
            tables[t] = table
        else:
            assert kind == FORGET
            child = tables.pop(kids[t][0])
            a = nice.vertex[t]
            if a == r:
                tables[t] = {k: v for k, v in child.items() if k == ()}
            else:
                others = sorted(nice.bags[t])
                is_client = a in clients and a != r
                pass_to, plain_splice = _shortcut_rules(a, forgotten[kids[t][0]], others, cobag)
                table = {}
                for cost, segs, closed in child.values():
                    moves = _forget_moves(segs, a, others, is_client, cap, dist, r, pass_to, plain_splice)
                    for add, open_segs, new_closed in moves:
                        key, packed = _pack(open_segs)
                        _offer(table, key, cost + add, packed, closed + tuple(new_closed))
                tables[t] = table
        if max_states is not None and len(tables[t]) > max_states:
            raise CapacityPlanningError(f"DP table with {len(tables[t])} states exceeds limit {max_states}")
    final = tables[nice.root]
    if () not in final:
        raise RuntimeError("no feasible solution found")
    cost, _, closed = final[()]
    tours, served = [], []
    for path, _, sv in closed:
        tours.append(walk_through(metric, r, path[1:-1]))
        served.append(sv)
    at_depot = [c for c in inst.client_vertices if c == r]
    for i in range(0, len(at_depot), cap):
        tours.append([r])
        served.append(tuple(at_depot[i:i + cap]))
    sol = Solution.build(tours, served, inst)
    assert sol.cost == cost, (sol.cost, cost)
    return sol
