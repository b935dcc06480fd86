"""Oriented link diagrams from PD codes and braid words, their colorings,
shadow colorings and fundamental classes.

PD conventions: a crossing [i, j, k, l] lists its four edge labels
counterclockwise starting from the incoming under-edge, so the under strand
runs i -> k.  Orientation of the over strand is recovered by walking the
components.  A crossing is positive when the over strand enters at slot 3.

Corner s of a crossing is the region between slots s and s+1.  Every strand
has its co-orientation normal pointing to its left, so

* across an arc: lambda(right region) < C(arc) = lambda(left region);
* at a crossing the source region (right of both strands) is corner 0 for a
  positive crossing and corner 1 for a negative one, and the source under-arc
  is slot 0 (positive) or slot 2 (negative);
* coloring rule: C(source under-arc) < C(over) = C(other under-arc);
* weight: sign * (lambda(source region), C(source under-arc), C(over)).
"""

from __future__ import annotations

import json
import os
from collections import deque
from dataclasses import dataclass, field as dc_field
from importlib import resources

import numpy as np

from .chain import FormalChain
from .linalg import field_nullspace
from .quandle import Quandle


class DiagramError(ValueError):
    pass


class MalformedPD(DiagramError):
    pass


class InconsistentPropagation(DiagramError):
    pass


class TooLarge(DiagramError):
    pass


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: tuple

    def __post_init__(self):
        if self.strands < 1:
            raise DiagramError("a braid needs at least one strand")
        for g in self.letters:
            if g == 0 or abs(g) > self.strands - 1:
                raise DiagramError(f"generator {g} out of range for B_{self.strands}")


@dataclass
class Crossing:
    slots: tuple          # edge indices, counterclockwise from the incoming under-edge
    sign: int
    over: int             # arc indices
    src: int
    dst: int
    weight_region: int
    corners: tuple        # region index of corners 0..3


@dataclass
class Diagram:
    n_edges: int
    edge_arc: list
    n_arcs: int
    crossings: list
    n_regions: int
    adjacency: list       # (right region, arc, left region) per edge
    components: int
    source: dict = dc_field(default_factory=dict)

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    def signs(self) -> np.ndarray:
        return np.array([c.sign for c in self.crossings], dtype=np.int64)

    def mirror(self) -> "Diagram":
        """The mirror image (all crossings switched), rebuilt from its PD code."""
        code = self.source.get("pd")
        if code is None:
            raise DiagramError("mirror needs a PD-built diagram")
        return from_pd(mirror_pd(code))


# ---------------------------------------------------------------------------
# construction

def mirror_pd(code):
    """Switch every crossing: [i, j, k, l] -> [l, i, j, k] or [j, k, l, i]
    depending on the over strand direction, keeping i -> k's partner rules.

    Switching a crossing makes the over strand the under strand.  The new
    incoming under-edge is the incoming edge of the old over strand.
    """
    D = from_pd(code)
    out = []
    for c, row in zip(D.crossings, code):
        i, j, k, l = row
        if c.sign > 0:          # over enters at slot 3 (label l)
            out.append([l, i, j, k])
        else:                   # over enters at slot 1 (label j)
            out.append([j, k, l, i])
    return out


def _validate_pd(code):
    code = [list(map(int, row)) for row in code]
    for row in code:
        if len(row) != 4:
            raise MalformedPD(f"crossing {row} does not have four labels")
    counts = {}
    for row in code:
        for lab in row:
            counts[lab] = counts.get(lab, 0) + 1
    bad = sorted(lab for lab, k in counts.items() if k != 2)
    if bad:
        raise MalformedPD(f"labels {bad} do not appear exactly twice")
    return code


def from_pd(code) -> Diagram:
    """Build a diagram from a PD code (list of 4-tuples)."""
    code = _validate_pd(code)
    if not code:
        return _unknot(source={"pd": []})
    nc = len(code)
    labels = sorted({lab for row in code for lab in row})
    eidx = {lab: n for n, lab in enumerate(labels)}
    slots = [[eidx[lab] for lab in row] for row in code]
    occ = {}
    for c in range(nc):
        for s in range(4):
            occ.setdefault(slots[c][s], []).append((c, s))

    def opp(c, s):
        a, b = occ[slots[c][s]]
        if a == (c, s):
            return b
        return a

    # orientation: mark each half-edge as entering (+1) or leaving (-1)
    direction = {}

    def walk(c, s):
        comp = []
        while (c, s) not in direction:
            if direction.get((c, (s + 2) % 4)) is not None:
                raise MalformedPD("inconsistent strand orientation")
            direction[(c, s)] = 1
            direction[(c, (s + 2) % 4)] = -1
            comp.append(c)
            c, s = opp(c, (s + 2) % 4)
        if direction[(c, s)] != 1:
            raise MalformedPD("inconsistent strand orientation")

    components = 0
    for c in range(nc):
        if (c, 0) not in direction:
            if (c, 2) in direction:
                raise MalformedPD("under strand runs against the PD convention")
            walk(c, 0)
            components += 1
    for c in range(nc):
        if (c, 1) not in direction:
            j, l = code[c][1], code[c][3]
            start = 3 if (j - l == 1 or l - j > 1) else 1
            walk(c, start)
            components += 1
    for c in range(nc):
        if direction[(c, 0)] != 1 or direction[(c, 2)] != -1:
            raise MalformedPD("under strand runs against the PD convention")

    signs = [1 if direction[(c, 3)] == 1 else -1 for c in range(nc)]

    # arcs: edges joined through over-passes
    parent = list(range(len(labels)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for c in range(nc):
        a, b = find(slots[c][1]), find(slots[c][3])
        if a != b:
            parent[max(a, b)] = min(a, b)
    roots = sorted({find(e) for e in range(len(labels))})
    rindex = {r: n for n, r in enumerate(roots)}
    edge_arc = [rindex[find(e)] for e in range(len(labels))]

    # faces: sigma(c, s) = opp(c, s + 1), corner (c, s) lies in the face
    corner_face = {}
    faces = []
    for c in range(nc):
        for s in range(4):
            if (c, s) in corner_face:
                continue
            cyc = []
            h = (c, s)
            while h not in corner_face:
                corner_face[h] = len(faces)
                cyc.append(h)
                h = opp(h[0], (h[1] + 1) % 4)
            faces.append(cyc)
    if len(faces) != nc + 2:
        raise DiagramError(f"diagram is not connected ({len(faces)} faces for {nc} crossings)")
    # region 0: longest boundary, ties by the smallest edge on it
    def face_key(cyc):
        edges = [slots[c][s] for c, s in cyc] + [slots[c][(s + 1) % 4] for c, s in cyc]
        return (-len(cyc), min(edges), min(cyc))
    order = sorted(range(len(faces)), key=lambda f: face_key(faces[f]))
    outer = order[0]
    rest = sorted((f for f in range(len(faces)) if f != outer), key=lambda f: min(faces[f]))
    renum = {outer: 0}
    for n, f in enumerate(rest):
        renum[f] = n + 1
    corner_region = {h: renum[f] for h, f in corner_face.items()}

    crossings = []
    for c in range(nc):
        corners = tuple(corner_region[(c, s)] for s in range(4))
        over = edge_arc[slots[c][1]]
        if signs[c] > 0:
            src, dst, wr = edge_arc[slots[c][0]], edge_arc[slots[c][2]], corners[0]
        else:
            src, dst, wr = edge_arc[slots[c][2]], edge_arc[slots[c][0]], corners[1]
        crossings.append(Crossing(tuple(slots[c]), signs[c], over, src, dst, wr, corners))

    adjacency = []
    for e in range(len(labels)):
        c, s = next(h for h in occ[e] if direction[h] == -1)
        right = corner_region[(c, (s - 1) % 4)]
        left = corner_region[(c, s)]
        adjacency.append((right, edge_arc[e], left))

    return Diagram(n_edges=len(labels), edge_arc=edge_arc, n_arcs=len(roots),
                   crossings=crossings, n_regions=len(faces), adjacency=adjacency,
                   components=components, source={"pd": code})


def _unknot(source):
    return Diagram(n_edges=1, edge_arc=[0], n_arcs=1, crossings=[], n_regions=2,
                   adjacency=[(0, 0, 1)], components=1, source=source)


def braid_to_pd(b: BraidWord):
    """PD code of the braid closure.

    Strands run upward, positions left to right.  sigma_i crosses positions
    i and i+1; for a positive letter the strand moving right passes over.
    """
    n = b.strands
    pos = list(range(n))           # current edge at each position
    nxt = n
    rows = []
    for g in b.letters:
        i = abs(g) - 1
        left_in, right_in = pos[i], pos[i + 1]
        left_out, right_out = nxt, nxt + 1   # strand from the left ends at i+1
        nxt += 2
        if g > 0:
            # under: right strand SE -> NW; ccw from SE: SE, NE, NW, SW
            rows.append([right_in, left_out, right_out, left_in])
        else:
            # under: left strand SW -> NE; ccw from SW: SW, SE, NE, NW
            rows.append([left_in, right_in, left_out, right_out])
        pos[i], pos[i + 1] = right_out, left_out
    # closure: the final edge at each position is the initial one
    alias = {pos[k]: k for k in range(n)}
    rows = [[alias.get(e, e) for e in row] for row in rows]
    # relabel 1..2c in order of first appearance
    names = {}
    for row in rows:
        for e in row:
            names.setdefault(e, len(names) + 1)
    return [[names[e] for e in row] for row in rows], [alias.get(e, e) for e in range(n)]


def from_braid(b: BraidWord) -> Diagram:
    if not b.letters:
        if b.strands != 1:
            raise DiagramError("the closure of the empty braid on several strands is split")
        return _unknot(source={"braid": [1, []]})
    code, _ = braid_to_pd(b)
    D = from_pd(code)
    D.source = {"braid": [b.strands, list(b.letters)], "pd": code}
    return D


def torus_braid(m: int, n: int, sign: int = -1) -> BraidWord:
    """Delta^m with Delta = sigma_{n-1} ... sigma_1 in B_n; its closure is T(m, n).

    With the default ``sign=-1`` every letter is inverted.  Under the crossing
    conventions of this module that is the diagram on which the top-arc colors
    a satisfy a = a P^m for the companion matrix P of the torus-knot formulas,
    with the top arcs read right to left.  ``sign=+1`` gives the mirror image.
    """
    delta = [sign * k for k in range(n - 1, 0, -1)]
    return BraidWord(n, tuple(delta * m))


def parse_braid(s: str) -> BraidWord:
    """"braid:n=2:1,1,1" (the prefix is optional)."""
    s = s.strip()
    if s.startswith("braid:"):
        s = s[len("braid:"):]
    head, _, word = s.partition(":")
    if not head.startswith("n="):
        raise DiagramError("braid spec must look like braid:n=<strands>:<letters>")
    letters = tuple(int(x) for x in word.split(",") if x.strip())
    return BraidWord(int(head[2:]), letters)


def parse_link(s: str) -> Diagram:
    """Parse "braid:n=..:..", "pd:[[..],..]", "pd:@file.json" or "torus:m,n"."""
    s = s.strip()
    if s.startswith("braid:"):
        return from_braid(parse_braid(s))
    if s.startswith("pd:"):
        body = s[3:]
        if body.startswith("@"):
            with open(body[1:]) as fh:
                data = json.load(fh)
            if isinstance(data, dict):
                data = data["pd"]
        else:
            data = json.loads(body)
        return from_pd(data)
    if s.startswith("torus:"):
        m, n = (int(x) for x in s[6:].split(","))
        return from_braid(torus_braid(m, n))
    if s.startswith("knot:"):
        rec = knot_record(s[5:])
        return from_pd(rec["pd"])
    if s == "unknot":
        return _unknot(source={"pd": []})
    raise DiagramError(f"cannot parse link spec {s!r}")


def load_knot_table(path=None) -> dict:
    """Knot records keyed by name; QINV_KNOT_TABLE overrides the bundled file."""
    path = path or os.environ.get("QINV_KNOT_TABLE")
    if path:
        with open(path) as fh:
            data = json.load(fh)
    else:
        data = json.loads(resources.files("qinv").joinpath("data/knot_table.json").read_text())
    if isinstance(data, list):
        # plain array of {name, pd, ...} records
        return {rec["name"]: rec for rec in data}
    return data.get("knots", data)


def knot_record(name: str, path=None) -> dict:
    table = load_knot_table(path)
    if name not in table:
        raise DiagramError(f"knot {name!r} is not in the knot table")
    return table[name]


# ---------------------------------------------------------------------------
# colorings

def coloring_system(D: Diagram, X: Quandle):
    """Rows of the Alexander linear system w C(src) + (1-w) C(over) - C(dst) = 0."""
    F = X.field
    w = X.omega
    M = np.zeros((D.n_crossings, D.n_arcs), dtype=np.int64)
    om = int(F.sub(1, w))
    for r, c in enumerate(D.crossings):
        M[r, c.src] = F.add(M[r, c.src], w)
        M[r, c.over] = F.add(M[r, c.over], om)
        M[r, c.dst] = F.sub(M[r, c.dst], 1)
    return M


def coloring_basis(D: Diagram, X: Quandle):
    """F_q-basis of the coloring space of an Alexander quandle."""
    if X.kind != "alexander":
        raise DiagramError("linear coloring space needs an Alexander quandle")
    M = coloring_system(D, X)
    return field_nullspace(X.field, M)


def count_colorings(D: Diagram, X: Quandle) -> int:
    if X.kind == "alexander":
        return X.field.q ** len(coloring_basis(D, X))
    return len(enumerate_colorings(D, X))


def enumerate_colorings(D: Diagram, X: Quandle, limit: int = 5 * 10 ** 6) -> np.ndarray:
    """All X-colorings as an (N, arcs) array, rows in lexicographic order."""
    if X.kind == "alexander":
        F = X.field
        basis = coloring_basis(D, X)
        k = len(basis)
        if F.q ** k > limit:
            raise TooLarge(f"{F.q ** k} colorings exceed the limit {limit}")
        coeffs = np.indices((F.q,) * k).reshape(k, -1).T if k else np.zeros((1, 0), dtype=np.int64)
        out = np.zeros((len(coeffs), D.n_arcs), dtype=np.int64)
        for j, v in enumerate(basis):
            out = F.add(out, F.mul(coeffs[:, j:j + 1], v[None, :]))
        out = np.unique(out, axis=0)
        return out
    return _dfs_colorings(D, X, limit)


def _dfs_colorings(D: Diagram, X: Quandle, limit: int) -> np.ndarray:
    """Backtracking over arcs with propagation through crossings."""
    n = D.n_arcs
    op, opinv = X.op, X.opinv
    by_arc = [[] for _ in range(n)]
    for c in D.crossings:
        for a in (c.src, c.over, c.dst):
            by_arc[a].append(c)
    results = []

    def propagate(col, queue):
        while queue:
            a = queue.popleft()
            for c in by_arc[a]:
                s, o, d = col[c.src], col[c.over], col[c.dst]
                if o < 0:
                    continue
                if s >= 0:
                    v = op[s, o]
                    if d >= 0:
                        if d != v:
                            return False
                    else:
                        col[c.dst] = v
                        queue.append(c.dst)
                elif d >= 0:
                    col[c.src] = opinv[d, o]
                    queue.append(c.src)
        return True

    def rec(col):
        if len(results) > limit:
            raise TooLarge(f"more than {limit} colorings")
        free = [a for a in range(n) if col[a] < 0]
        if not free:
            results.append(list(col))
            return
        a = free[0]
        for v in range(X.size):
            nc = list(col)
            nc[a] = v
            if propagate(nc, deque([a])):
                rec(nc)

    rec([-1] * n)
    out = np.array(sorted(results), dtype=np.int64).reshape(-1, n)
    return out


def is_coloring(D: Diagram, X: Quandle, col) -> bool:
    col = np.asarray(col)
    return all(X.op[col[c.src], col[c.over]] == col[c.dst] for c in D.crossings)


# ---------------------------------------------------------------------------
# shadow colorings

@dataclass
class ShadowColoring:
    coloring: np.ndarray
    regions: np.ndarray


def _region_order(D: Diagram, order: str = "bfs", root: int = 0):
    """Spanning-tree edges (known region, arc, new region, forward?) from ``root``."""
    nbrs = [[] for _ in range(D.n_regions)]
    for r, a, l in D.adjacency:
        nbrs[r].append((l, a, True))
        nbrs[l].append((r, a, False))
    seen = [False] * D.n_regions
    seen[root] = True
    tree = []
    frontier = deque([root])
    while frontier:
        u = frontier.popleft() if order == "bfs" else frontier.pop()
        items = nbrs[u] if order == "bfs" else list(reversed(nbrs[u]))
        for v, a, fwd in items:
            if not seen[v]:
                seen[v] = True
                tree.append((u, a, v, fwd))
                frontier.append(v)
    if not all(seen):
        raise DiagramError("region adjacency graph is not connected")
    return tree


def shadow_regions(D: Diagram, X: Quandle, colorings, x0, order: str = "bfs",
                   root: int = 0) -> np.ndarray:
    """Region colors of (C; x0) for a batch of colorings, x0 placed on region
    ``root`` (the unbounded region by default).  ``x0`` may be a scalar or an
    array broadcast against the batch."""
    cols = np.atleast_2d(np.asarray(colorings, dtype=np.int64))
    N = cols.shape[0]
    lam = np.zeros((N, D.n_regions), dtype=np.int64)
    lam[:, root] = np.broadcast_to(np.asarray(x0, dtype=np.int64), (N,))
    for u, a, v, fwd in _region_order(D, order, root):
        if fwd:
            lam[:, v] = X.op[lam[:, u], cols[:, a]]
        else:
            lam[:, v] = X.opinv[lam[:, u], cols[:, a]]
    for r, a, l in D.adjacency:
        if np.any(X.op[lam[:, r], cols[:, a]] != lam[:, l]):
            raise InconsistentPropagation("region colors disagree across an arc")
    return lam


def shadow_complete(D: Diagram, X: Quandle, C, x0: int, order: str = "bfs") -> ShadowColoring:
    C = np.asarray(C, dtype=np.int64)
    if not is_coloring(D, X, C):
        raise DiagramError("not an X-coloring")
    return ShadowColoring(C, shadow_regions(D, X, C[None, :], x0, order)[0])


def weights(D: Diagram, colorings, regions):
    """Weight triples (N, crossings, 3) and signs (crossings,)."""
    cols = np.atleast_2d(colorings)
    lam = np.atleast_2d(regions)
    if not D.crossings:
        return np.zeros((cols.shape[0], 0, 3), dtype=np.int64), np.zeros(0, dtype=np.int64)
    wr = np.array([c.weight_region for c in D.crossings])
    src = np.array([c.src for c in D.crossings])
    over = np.array([c.over for c in D.crossings])
    W = np.stack([lam[:, wr], cols[:, src], cols[:, over]], axis=2)
    return W, D.signs()


def fundamental_class(D: Diagram, S: ShadowColoring) -> FormalChain:
    """[S] = sum over crossings of sign * (x, y, z) in the quandle chain group
    (degenerate triples with y = z dropped)."""
    W, sg = weights(D, S.coloring[None, :], S.regions[None, :])
    out = FormalChain(3)
    for (x, y, z), e in zip(W[0], sg):
        if y != z:
            out.add_term((x, y, z), int(e))
    return out
