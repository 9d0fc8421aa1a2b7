"""Connected multigraphs with self-loops: canonical forms, automorphism
counts, Feynman symmetry factors, and enumeration bounded by the loop count
#(1-valent) + #(2-valent) + cycle rank <= n.

Graphs are symmetric integer matrices; adj[i][j] is the number of edges
between i and j, adj[i][i] the number of self-loops at i (each contributing
2 to the degree).  The canonical key is the lexicographically largest
row-by-row reading of the matrix over degree-respecting relabelings.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

__all__ = ["Diagram", "canonical_key_and_aut", "enumerate_diagrams",
           "symmetry_factor", "loop_number"]


def _degrees(adj):
    V = len(adj)
    return [sum(adj[i][j] for j in range(V) if j != i) + 2 * adj[i][i]
            for i in range(V)]


def _refine_colors(adj):
    """Iterated neighborhood refinement; returns per-vertex color keys."""
    V = len(adj)
    deg = _degrees(adj)
    colors = [(deg[i], adj[i][i]) for i in range(V)]
    for _ in range(V):
        new = []
        for i in range(V):
            nb = sorted((adj[i][j], colors[j]) for j in range(V) if j != i and adj[i][j])
            new.append((colors[i], tuple(nb)))
        # compress
        table = {c: rank for rank, c in enumerate(sorted(set(new)))}
        compressed = [(table[c],) for c in new]
        if compressed == colors:
            break
        colors = compressed
    return colors


def canonical_key_and_aut(adj):
    """Canonical key (flattened max matrix) and the number of adjacency
    automorphisms (vertex permutations fixing the matrix)."""
    V = len(adj)
    if V == 0:
        return (), 1
    colors = _refine_colors(adj)
    order_colors = sorted(set(colors), reverse=True)
    cells = {c: [v for v in range(V) if colors[v] == c] for c in order_colors}
    # positions take colors in the fixed cell order
    pos_color = []
    for c in order_colors:
        pos_color.extend([c] * len(cells[c]))

    # phase 1: find the maximal key
    best = None
    placed = [None] * V
    used = [False] * V

    def row_key(v, depth):
        return tuple(adj[v][placed[t]] for t in range(depth)) + (adj[v][v],)

    def search_max(depth, prefix):
        nonlocal best
        if depth == V:
            key = tuple(prefix)
            if best is None or key > best:
                best = key
            return
        cands = [v for v in cells[pos_color[depth]] if not used[v]]
        rows = sorted({row_key(v, depth) for v in cands}, reverse=True)
        for rk in rows:
            new_prefix = prefix + list(rk)
            if best is not None:
                cut = tuple(new_prefix)
                if cut < best[:len(cut)]:
                    continue
            for v in cands:
                if row_key(v, depth) == rk:
                    used[v] = True
                    placed[depth] = v
                    search_max(depth + 1, new_prefix)
                    used[v] = False
                    placed[depth] = None
        return

    search_max(0, [])

    # phase 2: count labelings achieving the maximal key
    count = 0

    def search_count(depth, idx):
        nonlocal count
        if depth == V:
            count += 1
            return
        cands = [v for v in cells[pos_color[depth]] if not used[v]]
        need = best[idx:idx + depth + 1]
        for v in cands:
            if row_key(v, depth) == need:
                used[v] = True
                placed[depth] = v
                search_count(depth + 1, idx + depth + 1)
                used[v] = False
                placed[depth] = None

    search_count(0, 0)
    return best, count


@dataclass(frozen=True)
class Diagram:
    """Connected multigraph with its Feynman bookkeeping."""

    adj: tuple           # tuple of tuples, symmetric, loops on the diagonal
    key: tuple
    aut: int

    @property
    def vertices(self) -> int:
        return len(self.adj)

    @property
    def edges(self) -> int:
        V = len(self.adj)
        return sum(self.adj[i][j] for i in range(V) for j in range(i, V)
                   if j > i) + sum(self.adj[i][i] for i in range(V))

    @property
    def degrees(self):
        return _degrees(self.adj)

    @property
    def cycle_rank(self) -> int:
        return self.edges - self.vertices + 1

    @property
    def loop_number(self) -> int:
        deg = self.degrees
        return self.cycle_rank + sum(1 for d in deg if d in (1, 2))

    @property
    def symmetry_factor(self) -> int:
        """|sigma(D)| = #automorphisms x prod m_uv! x prod 2^l_v l_v!."""
        V = len(self.adj)
        s = self.aut
        for i in range(V):
            for j in range(i + 1, V):
                s *= factorial(self.adj[i][j])
            s *= 2 ** self.adj[i][i] * factorial(self.adj[i][i])
        return s


def symmetry_factor(D: Diagram) -> int:
    return D.symmetry_factor


def loop_number(D: Diagram) -> int:
    return D.loop_number


def _connected(adj) -> bool:
    V = len(adj)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in range(V):
            if v not in seen and (adj[u][v] or (u == v and adj[u][u])):
                seen.add(v)
                stack.append(v)
    return len(seen) == V


def _degree_sequences(V, E, d12_budget):
    """Non-increasing sequences of V degrees >= 1 summing to 2E with
    #(deg 1) + #(deg 2) <= d12_budget."""
    out = []

    def rec(prefix, remaining, slots, maxdeg):
        if slots == 0:
            if remaining == 0:
                d12 = sum(1 for d in prefix if d in (1, 2))
                if d12 <= d12_budget:
                    out.append(tuple(prefix))
            return
        lo = max(1, remaining - (slots - 1) * maxdeg)
        hi = min(maxdeg, remaining - (slots - 1))
        for d in range(hi, lo - 1, -1):
            prefix.append(d)
            rec(prefix, remaining - d, slots - 1, d)
            prefix.pop()

    rec([], 2 * E, V, 2 * E)
    return out


def _graphs_with_degrees(degs):
    """All labeled multigraphs (loops allowed) with the given non-increasing
    degree sequence, as adjacency matrices; symmetry partially broken by
    first-use ordering inside equal-degree groups."""
    V = len(degs)
    group_of = {}
    start = 0
    for i in range(V):
        if i and degs[i] == degs[i - 1]:
            group_of[i] = group_of[i - 1]
        else:
            group_of[i] = i
        start += 1
    results = []
    adj = [[0] * V for _ in range(V)]
    residual = list(degs)

    def rec(min_v_for_u):
        u = next((w for w in range(V) if residual[w] > 0), None)
        if u is None:
            results.append(tuple(tuple(row) for row in adj))
            return
        start_v = min_v_for_u if min_v_for_u and min_v_for_u[0] == u else u
        vstart = start_v if isinstance(start_v, int) else u
        lo = min_v_for_u[1] if (min_v_for_u and min_v_for_u[0] == u) else u
        for v in range(lo, V):
            if v == u:
                if residual[u] < 2:
                    continue
            else:
                if residual[v] < 1:
                    continue
                # first-use order inside equal-degree group (v-1 = u is the
                # vertex being wired right now, so it does not count)
                g = group_of[v]
                if v > g and v - 1 != u:
                    prev_untouched = all(adj[v - 1][t] == 0 for t in range(V)) \
                        and adj[v - 1][v - 1] == 0 and group_of[v - 1] == g
                    if prev_untouched and residual[v - 1] == degs[v - 1]:
                        continue
            adj[u][v] += 1
            if u != v:
                adj[v][u] += 1
                residual[u] -= 1
                residual[v] -= 1
            else:
                residual[u] -= 2
            rec((u, v))
            adj[u][v] -= 1
            if u != v:
                adj[v][u] -= 1
                residual[u] += 1
                residual[v] += 1
            else:
                residual[u] += 2

    rec(None)
    return results


@lru_cache(maxsize=None)
def enumerate_diagrams(n: int) -> tuple:
    """All connected multigraphs (up to isomorphism, min degree 1, excluding
    the trivial one-vertex diagram) with loop number b1 + d1 + d2 <= n.

    Deterministic order: by (vertices, edges, canonical key)."""
    if n < 2:
        return ()
    seen = {}
    V_max = max(1, 2 * n - 2)
    for V in range(1, V_max + 1):
        for E in range(max(1, V - 1), V + n):
            b1 = E - V + 1
            if b1 > n:
                continue
            for degs in _degree_sequences(V, E, n - b1):
                for adj in _graphs_with_degrees(degs):
                    if not _connected(adj):
                        continue
                    key, aut = canonical_key_and_aut([list(r) for r in adj])
                    full_key = (V, E, key)
                    if full_key in seen:
                        continue
                    D = Diagram(adj=adj, key=key, aut=aut)
                    if D.loop_number <= n:
                        seen[full_key] = D
    return tuple(seen[k] for k in sorted(seen))
