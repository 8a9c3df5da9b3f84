"""Planar networks built from Le-tableaux.

The raw network has one vertex per nonzero box, horizontal edges oriented
right-to-left carrying the box weight and vertical edges oriented downward with
unit weight.  ``make_trivalent`` removes bivalent vertices, colors trivalent
ones (one incoming -> white, one outgoing -> black) and splits four-valent ones
into a black/white pair joined by a unit edge, the black collecting both
incoming edges and the white both outgoing ones.

All geometry uses grid coordinates with y pointing down; rotation systems are
stored as compass directions per edge end, which survive edge merging.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations

WHITE = "white"
BLACK = "black"
BOUNDARY = "boundary"
RAW = "raw"

# visual angle (counterclockwise on screen, y down) per compass direction
_ANGLES = {
    "E": 0.0, "NE": 45.0, "N": 90.0, "NW": 135.0,
    "W": 180.0, "SW": 225.0, "S": 270.0, "SE": 315.0,
}


class NetworkError(RuntimeError):
    pass


@dataclass
class Vertex:
    vid: object
    kind: str
    pos: tuple
    label: int = None  # boundary label 1..n, else None


@dataclass
class Edge:
    eid: int
    tail: object
    head: object
    weight: Fraction
    tdir: str  # direction in which the edge leaves the tail
    hdir: str  # direction pointing away from the head along the edge

    def other(self, vid):
        return self.head if vid == self.tail else self.tail

    def dir_at(self, vid):
        return self.tdir if vid == self.tail else self.hdir


class PlabicNetwork:
    def __init__(self, tableau):
        self.tableau = tableau
        self.diagram = tableau.diagram
        self.vertices = {}
        self.edges = {}
        self._next_eid = 0

    # -- construction helpers -------------------------------------------------

    def add_vertex(self, vid, kind, pos, label=None):
        self.vertices[vid] = Vertex(vid, kind, pos, label)

    def add_edge(self, tail, head, weight, tdir, hdir):
        eid = self._next_eid
        self._next_eid += 1
        self.edges[eid] = Edge(eid, tail, head, Fraction(weight), tdir, hdir)
        return eid

    # -- basic queries --------------------------------------------------------

    def boundary_vertices(self):
        vs = [v for v in self.vertices.values() if v.kind == BOUNDARY]
        return sorted(vs, key=lambda v: v.label)

    def internal_vertices(self):
        return [v for v in self.vertices.values() if v.kind != BOUNDARY]

    def out_edges(self, vid):
        return [e for e in self.edges.values() if e.tail == vid]

    def in_edges(self, vid):
        return [e for e in self.edges.values() if e.head == vid]

    def incident(self, vid):
        return [e for e in self.edges.values() if vid in (e.tail, e.head)]

    def source_labels(self):
        return self.diagram.pivots().pivots

    def is_source(self, label):
        return label in self.source_labels()

    def topological_order(self):
        """Kahn order over all vertices; raises on a cycle."""
        indeg = {vid: 0 for vid in self.vertices}
        for e in self.edges.values():
            indeg[e.head] += 1
        queue = sorted((vid for vid, d in indeg.items() if d == 0), key=str)
        order = []
        while queue:
            vid = queue.pop()
            order.append(vid)
            for e in self.out_edges(vid):
                indeg[e.head] -= 1
                if indeg[e.head] == 0:
                    queue.append(e.head)
        if len(order) != len(self.vertices):
            raise NetworkError("cycle detected in network orientation")
        return order

    def rotation(self, vid):
        """Incident edges in counterclockwise visual order around the vertex."""
        edges = self.incident(vid)
        return sorted(edges, key=lambda e: _ANGLES[e.dir_at(vid)])

    def to_json_dict(self, faces=None):
        d = {
            "vertices": [
                {
                    "id": str(v.vid),
                    "kind": v.kind,
                    "pos": list(v.pos),
                    "label": v.label,
                }
                for v in sorted(self.vertices.values(), key=lambda v: str(v.vid))
            ],
            "edges": [
                {
                    "id": e.eid,
                    "tail": str(e.tail),
                    "head": str(e.head),
                    "weight": str(e.weight),
                }
                for e in sorted(self.edges.values(), key=lambda e: e.eid)
            ],
            "boundary": [v.label for v in self.boundary_vertices()],
        }
        if faces is not None:
            d["faces"] = [
                {"id": f.fid, "finite": f.finite, "size": len(f.items)}
                for f in faces.faces
            ]
        return d


def build_le_network(t):
    """Raw acyclic network of a Le-tableau (one vertex per nonzero box)."""
    d = t.diagram
    g = PlabicNetwork(t)
    lam = d.row_lengths

    for lab, kind, pos in d.boundary_steps():
        if kind == "v":
            xy = (float(lam[pos - 1]), pos - 0.5)
        else:
            xy = (pos - 0.5, float(d.column_height(pos)))
        g.add_vertex(("b", lab), BOUNDARY, xy, label=lab)

    nonzero = {(i, j) for i, j, w in t.nonzero_boxes()}
    for i, j, w in t.nonzero_boxes():
        g.add_vertex(("v", i, j), RAW, (j - 0.5, i - 0.5))

    for i, j, w in t.nonzero_boxes():
        # edge from the next vertex to the right, oriented right-to-left,
        # carrying this box's weight
        right = next(
            (("v", i, jj) for jj in range(j + 1, lam[i - 1] + 1) if (i, jj) in nonzero),
            ("b", d.source_label(i)),
        )
        g.add_edge(right, ("v", i, j), w, "W", "E")
        # downward unit edge to the next vertex below
        below = next(
            (
                ("v", ii, j)
                for ii in range(i + 1, d.k + 1)
                if lam[ii - 1] >= j and (ii, j) in nonzero
            ),
            ("b", d.sink_label(j)),
        )
        g.add_edge(("v", i, j), below, 1, "S", "N")
    return g


def make_trivalent(g):
    """Reduce a raw network to a perfectly oriented trivalent plabic network."""
    out = PlabicNetwork(g.tableau)
    for v in g.vertices.values():
        out.add_vertex(v.vid, v.kind, v.pos, v.label)
    for e in g.edges.values():
        out.add_edge(e.tail, e.head, e.weight, e.tdir, e.hdir)

    # eliminate bivalent internal vertices, multiplying weights
    for v in list(out.internal_vertices()):
        ins = out.in_edges(v.vid)
        outs = out.out_edges(v.vid)
        if len(ins) + len(outs) == 2:
            if len(ins) != 1 or len(outs) != 1:
                raise NetworkError("bivalent vertex %r is not a pass-through" % (v.vid,))
            ein, eout = ins[0], outs[0]
            out.add_edge(
                ein.tail, eout.head, ein.weight * eout.weight, ein.tdir, eout.hdir
            )
            del out.edges[ein.eid]
            del out.edges[eout.eid]
            del out.vertices[v.vid]

    # color trivalent vertices, split four-valent ones
    for v in list(out.internal_vertices()):
        ins = out.in_edges(v.vid)
        outs = out.out_edges(v.vid)
        deg = len(ins) + len(outs)
        if deg == 3:
            if len(ins) == 1:
                v.kind = WHITE
            elif len(outs) == 1:
                v.kind = BLACK
            else:
                raise NetworkError("trivalent vertex %r has bad degree split" % (v.vid,))
        elif deg == 4:
            if len(ins) != 2 or len(outs) != 2:
                raise NetworkError("four-valent vertex %r has bad degree split" % (v.vid,))
            x, y = v.pos
            bid = ("vb",) + tuple(v.vid[1:])
            wid = ("vw",) + tuple(v.vid[1:])
            out.add_vertex(bid, BLACK, (x + 0.15, y - 0.15))
            out.add_vertex(wid, WHITE, (x - 0.15, y + 0.15))
            for e in ins:
                e.head = bid
            for e in outs:
                e.tail = wid
            out.add_edge(bid, wid, 1, "SW", "NE")
            del out.vertices[v.vid]
        else:
            raise NetworkError("internal vertex %r has degree %d" % (v.vid, deg))
    out.topological_order()  # acyclicity guard
    return out


# -- faces --------------------------------------------------------------------


@dataclass
class Face:
    fid: int
    items: list  # traversal as list of (vertex, item_in, item_out)
    finite: bool
    arc_spans: list = field(default_factory=list)  # disk arcs (label_a, label_b)


@dataclass
class FaceSet:
    faces: list  # interior faces only; exactly one has finite=False
    sector_face: dict  # (vid, in_key, out_key) -> face id
    arc_face: dict  # (label_a, label_b) -> face id


def _arc_key(a):
    return ("arc",) + a


def enumerate_faces(g):
    """Interior faces of the disk network, via the rotation-system traversal.

    The disk boundary arcs between consecutive boundary vertices take part in
    the traversal; the all-arc outer region is discarded.  The face adjacent to
    the wrap arc (b_n -> b_1, through P_0) is the infinite face.
    """
    bvs = g.boundary_vertices()
    n = len(bvs)
    arcs = []  # (key, va, vb, dir_at_va, dir_at_vb, span)
    vkind = {}
    for v in bvs:
        step_kind = next(
            k for lab, k, _ in g.diagram.boundary_steps() if lab == v.label
        )
        vkind[v.vid] = step_kind
    for idx in range(n):
        va = bvs[idx]
        vb = bvs[(idx + 1) % n]
        span = (va.label, vb.label)
        key = _arc_key(span)
        # direction leaving va toward the next label; leaving vb toward previous
        da = "S" if vkind[va.vid] == "v" else "W"
        db = "N" if vkind[vb.vid] == "v" else "E"
        arcs.append((key, va.vid, vb.vid, da, db, span))

    # incidence: per vertex, list of (sort_angle, item_key, other_end)
    items = {}
    for e in g.edges.values():
        items[e.eid] = (e.tail, e.head, e.tdir, e.hdir)
    for key, va, vb, da, db, span in arcs:
        items[key] = (va, vb, da, db)

    rot = {vid: [] for vid in g.vertices}
    for key, (ta, he, td, hd) in items.items():
        rot[ta].append((_ANGLES[td], key))
        rot[he].append((_ANGLES[hd], key))
    for vid in rot:
        rot[vid].sort()

    def succ(vid, key, delta):
        lst = rot[vid]
        i = next(i for i, (_, k) in enumerate(lst) if k == key)
        return lst[(i + delta) % len(lst)][1]

    def other_end(key, vid):
        ta, he, _, _ = items[key]
        return he if vid == ta else ta

    # darts (key, endpoint-we-point-to); trace faces turning clockwise at each
    # vertex (previous item in ccw rotation), which keeps the face on one side
    visited = set()
    raw_faces = []
    for key in items:
        ta, he, _, _ = items[key]
        for dart in ((key, he), (key, ta)):
            if dart in visited:
                continue
            walk = []
            d = dart
            while d not in visited:
                visited.add(d)
                k, v = d
                nk = succ(v, k, -1)
                walk.append((v, k, nk))
                d = (nk, other_end(nk, v))
            raw_faces.append(walk)

    # drop the all-arcs outer region
    def is_outer(walk):
        return all(isinstance(k, tuple) and k[0] == "arc" for _, k, _ in walk)

    outer = [w for w in raw_faces if is_outer(w)]
    if len(outer) != 1:
        raise NetworkError(
            "expected exactly one outer region, found %d" % len(outer)
        )
    interior = [w for w in raw_faces if not is_outer(w)]

    wrap_span = (bvs[-1].label, bvs[0].label)
    arc_lookup = {kk: s for kk, _, _, _, _, s in arcs}
    faces = []
    sector_face = {}
    arc_face = {}
    infinite_count = 0
    for walk in interior:
        spans = [
            arc_lookup[k] for _, k, _ in walk if isinstance(k, tuple) and k[0] == "arc"
        ]
        finite = wrap_span not in spans
        if not finite:
            infinite_count += 1
        faces.append(Face(len(faces), walk, finite, spans))
    if infinite_count != 1:
        raise NetworkError("expected exactly one infinite face")

    # deterministic numbering: infinite face last, finite faces by geometric
    # position of their walk (min vertex position, lexicographic)
    faces.sort(
        key=lambda f: (
            0 if f.finite else 1,
            min(g.vertices[v].pos for v, _, _ in f.items),
            len(f.items),
        )
    )
    for i, f in enumerate(faces):
        f.fid = i
    for f in faces:
        for v, kin, kout in f.items:
            sector_face[(v, kin, kout)] = f.fid
        for s in f.arc_spans:
            arc_face[s] = f.fid

    # Euler check on the closed disk graph (interior + outer region)
    V = len(g.vertices)
    E = len(items)
    F = len(interior) + 1
    if V - E + F != 2:
        raise NetworkError("Euler check failed: V=%d E=%d F=%d" % (V, E, F))
    return FaceSet(faces, sector_face, arc_face)


# -- boundary measurement -----------------------------------------------------


def _path_sums(g):
    """For each vertex, exact sums of path weights to every sink label."""
    order = g.topological_order()
    sums = {}
    for vid in reversed(order):
        v = g.vertices[vid]
        if v.kind == BOUNDARY and not g.is_source(v.label) and not g.out_edges(vid):
            sums[vid] = {v.label: Fraction(1)}
            continue
        acc = {}
        for e in g.out_edges(vid):
            for lab, val in sums[e.head].items():
                acc[lab] = acc.get(lab, Fraction(0)) + e.weight * val
        sums[vid] = acc
    return sums


def enumerate_paths(g, source_label):
    """All directed paths from a source to any sink, as (sink, weight, vertices).

    Exponential; retained as the test oracle for the memoized sums.
    """
    start = ("b", source_label)
    results = []

    def dfs(vid, weight, trail):
        v = g.vertices[vid]
        if v.kind == BOUNDARY and v.label != source_label:
            results.append((v.label, weight, tuple(trail)))
            return
        for e in g.out_edges(vid):
            dfs(e.head, weight * e.weight, trail + [e.head])

    dfs(start, Fraction(1), [start])
    return results


def boundary_measurement(g):
    """The k x n matrix A of Eq-style signed path sums, exact over rationals."""
    d = g.diagram
    pivots = d.pivots().pivots
    k, n = d.k, d.n
    sums = _path_sums(g)
    A = [[Fraction(0)] * n for _ in range(k)]
    for l, il in enumerate(pivots):
        A[l][il - 1] = Fraction(1)
        for j, val in sums[("b", il)].items():
            sigma = sum(1 for p in pivots if il < p < j or j < p < il)
            A[l][j - 1] = (-1) ** sigma * val
    return A


def fraction_det(rows):
    """Exact determinant by fraction-free style Gaussian elimination."""
    m = [list(map(Fraction, r)) for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            if m[r][c] != 0:
                f = m[r][c] * inv
                for cc in range(c, n):
                    m[r][cc] -= f * m[c][cc]
    return det


def all_minors(A):
    """Map from k-subsets of columns (1-based tuples) to exact maximal minors."""
    k = len(A)
    n = len(A[0])
    out = {}
    for cols in combinations(range(1, n + 1), k):
        out[cols] = fraction_det([[A[r][c - 1] for c in cols] for r in range(k)])
    return out


def lgv_disjoint_family_count(g, sources, sinks):
    """Signed count of vertex-disjoint path families, by brute enumeration.

    Independent oracle for det of the unsigned path-sum matrix with unit
    weights (Lindstrom-Gessel-Viennot).  Only usable on small networks.
    """
    per_source = [enumerate_paths(g, s) for s in sources]
    total = 0
    for perm in permutations(range(len(sinks))):
        sign = _perm_sign(perm)
        for choice in _product_paths(per_source, [sinks[p] for p in perm]):
            vsets = [set(tr) for _, _, tr in choice]
            if _pairwise_disjoint(vsets):
                total += sign
    return total


def _product_paths(per_source, targets):
    if not per_source:
        yield ()
        return
    for p in per_source[0]:
        if p[0] == targets[0]:
            for rest in _product_paths(per_source[1:], targets[1:]):
                yield (p,) + rest


def _pairwise_disjoint(sets):
    seen = set()
    for s in sets:
        if seen & s:
            return False
        seen |= s
    return True


def _perm_sign(perm):
    sign = 1
    for i, j in combinations(range(len(perm)), 2):
        if perm[i] > perm[j]:
            sign = -sign
    return sign
