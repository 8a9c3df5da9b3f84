"""Dual curve of a trivalent plabic network: rational components glued at
double points, real ovals, cycle bases and normalized logarithmic differentials.

Coordinate convention on internal components: at a white vertex the incoming
edge maps to infinity and the outgoing edges, in counterclockwise planar order
starting from the incoming one, map to 0 and 1; at a black vertex the same with
the outgoing edge at infinity.  The backbone component (id 0) carries kappa_j
at boundary vertex j and the marked point P0 at infinity.
"""

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .network import BLACK, BOUNDARY, WHITE, NetworkError

INF = math.inf

GAMMA0 = 0


class CurveError(RuntimeError):
    pass


def circle_key(x):
    """Monotone embedding of the real projective line into an angle."""
    if x == INF:
        return math.pi / 2
    return math.atan(x)


def circ_contains(a, b, x):
    """True iff x lies strictly inside the circular interval a -> b (increasing
    direction, wrapping through infinity)."""
    ka, kb, kx = circle_key(a), circle_key(b), circle_key(x)
    if ka < kb:
        return ka < kx < kb
    return kx > ka or kx < kb


@dataclass
class Component:
    cid: int
    kind: str  # 'gamma0' | 'white' | 'black'
    vertex: object = None  # network vertex id for internal components


@dataclass
class DoublePoint:
    eid: object  # network edge id, or ('node', i, j) for a backbone self-node
    sides: tuple  # ((cid_a, coord_a), (cid_b, coord_b))

    def coord_on(self, cid):
        return [co for ci, co in self.sides if ci == cid]


class MMCurve:
    def __init__(self, network, faces, phases):
        self.network = network
        self.faces = faces
        self.phases = phases
        self.components = []
        self.double_points = []
        self._edge_dp = {}
        self._vertex_cid = {}
        self._edge_coord = {}  # (edge id, vertex id) -> coordinate on that side
        self._build()

    # -- construction ---------------------------------------------------------

    def _build(self):
        g = self.network
        self.components.append(Component(GAMMA0, "gamma0"))
        internals = sorted(g.internal_vertices(), key=lambda v: (v.pos, str(v.vid)))
        for i, v in enumerate(internals, start=1):
            if v.kind not in (WHITE, BLACK):
                raise CurveError("network is not trivalent: %r" % (v.vid,))
            self.components.append(Component(i, v.kind, v.vid))
            self._vertex_cid[v.vid] = i

        for v in internals:
            ins = g.in_edges(v.vid)
            outs = g.out_edges(v.vid)
            distinguished = ins[0] if v.kind == WHITE else outs[0]
            rot = g.rotation(v.vid)
            start = next(i for i, e in enumerate(rot) if e.eid == distinguished.eid)
            ordered = rot[start:] + rot[:start]
            for e, coord in zip(ordered, (INF, 0.0, 1.0)):
                self._edge_coord[(e.eid, v.vid)] = coord

        for e in g.edges.values():
            sides = []
            for vid in (e.tail, e.head):
                v = g.vertices[vid]
                if v.kind == BOUNDARY:
                    sides.append((GAMMA0, self.kappa(v.label)))
                else:
                    sides.append((self._vertex_cid[vid], self._edge_coord[(e.eid, vid)]))
            dp = DoublePoint(e.eid, tuple(sides))
            self.double_points.append(dp)
            self._edge_dp[e.eid] = dp

    # -- queries --------------------------------------------------------------

    def kappa(self, label):
        return self.phases.kappas[label - 1]

    @property
    def genus(self):
        return len(self.faces.faces) - 1

    @property
    def num_components(self):
        return len(self.components)

    def component(self, cid):
        return self.components[cid]

    def white_components(self):
        return [c for c in self.components if c.kind == "white"]

    def double_point_of_edge(self, eid):
        return self._edge_dp[eid]

    def side_coord(self, eid, vid):
        """Coordinate of edge eid's double point on the side of vertex vid."""
        v = self.network.vertices[vid]
        if v.kind == BOUNDARY:
            return GAMMA0, self.kappa(v.label)
        return self._vertex_cid[vid], self._edge_coord[(eid, vid)]

    def component_nodes(self, cid):
        """All double point coordinates lying on component cid (with edge ids)."""
        out = []
        for dp in self.double_points:
            for ci, co in dp.sides:
                if ci == cid:
                    out.append((co, dp))
        return out

    def nodal_pairs(self):
        """Backbone self-gluings: edges joining two boundary vertices."""
        out = []
        for dp in self.double_points:
            if all(ci == GAMMA0 for ci, _ in dp.sides):
                out.append(dp)
        return out

    def to_json_dict(self):
        return {
            "genus": self.genus,
            "components": [
                {"id": c.cid, "kind": c.kind, "vertex": str(c.vertex)}
                for c in self.components
            ],
            "double_points": [
                {
                    "edge": str(dp.eid),
                    "sides": [[ci, _coord_str(co)] for ci, co in dp.sides],
                }
                for dp in self.double_points
            ],
        }


def _coord_str(c):
    return "inf" if c == INF else repr(c)


def dualize(network, faces, phases):
    """Build the dual curve of a trivalent network with the given phases."""
    if phases.n != network.diagram.n:
        raise CurveError("phase count does not match boundary size")
    return MMCurve(network, faces, phases)


# -- ovals --------------------------------------------------------------------


@dataclass
class Arc:
    cid: int
    a: object  # circular interval a -> b in increasing direction
    b: object

    def contains(self, x):
        return circ_contains(self.a, self.b, x)

    @property
    def through_infinity(self):
        return circle_key(self.a) >= circle_key(self.b)


@dataclass
class Oval:
    oid: int  # face id; the infinite face's oval is Omega_0
    arcs: list
    infinite: bool

    def locate(self, cid, coord):
        return any(arc.cid == cid and arc.contains(coord) for arc in self.arcs)


def build_ovals(curve, faces=None):
    """One oval per face; arcs are pieces of the components' real circles."""
    faces = faces or curve.faces
    g = curve.network
    ovals = {f.fid: Oval(f.fid, [], not f.finite) for f in faces.faces}

    # backbone arcs come from the disk-boundary arcs
    for span, fid in faces.arc_face.items():
        la, lb = span
        ovals[fid].arcs.append(Arc(GAMMA0, curve.kappa(la), curve.kappa(lb)))

    # internal component arcs come from the traversal sectors
    for (vid, kin, kout), fid in faces.sector_face.items():
        v = g.vertices[vid]
        if v.kind == BOUNDARY:
            continue
        if not isinstance(kin, int) or not isinstance(kout, int):
            raise CurveError("arc item at internal vertex %r" % (vid,))
        cid, ca = curve.side_coord(kin, vid)
        _, cb = curve.side_coord(kout, vid)
        third = next(
            co
            for e in g.incident(vid)
            if e.eid not in (kin, kout)
            for ci, co in [curve.side_coord(e.eid, vid)]
        )
        if circ_contains(ca, cb, third):
            ca, cb = cb, ca
        ovals[fid].arcs.append(Arc(cid, ca, cb))

    out = [ovals[f.fid] for f in faces.faces]
    _check_oval_cover(curve, out)
    return out


def _check_oval_cover(curve, ovals):
    """Every real arc of every component must appear in exactly one oval."""
    for c in curve.components:
        coords = sorted({co for co, _ in curve.component_nodes(c.cid)}, key=circle_key)
        if not coords:
            continue
        arcs_here = [a for o in ovals for a in o.arcs if a.cid == c.cid]
        if len(arcs_here) != len(coords):
            raise CurveError(
                "component %d: %d real arcs but %d oval arcs"
                % (c.cid, len(coords), len(arcs_here))
            )
        for i, lo in enumerate(coords):
            hi = coords[(i + 1) % len(coords)]
            matches = [
                a
                for a in arcs_here
                if circle_key(a.a) == circle_key(lo) and circle_key(a.b) == circle_key(hi)
            ]
            if len(matches) != 1:
                raise CurveError(
                    "component %d: real arc (%r, %r) covered %d times"
                    % (c.cid, lo, hi, len(matches))
                )


def locate_point(ovals, cid, coord):
    """The oval whose arc contains (component, coordinate), or None."""
    hits = [o for o in ovals if o.locate(cid, coord)]
    if len(hits) > 1:
        raise CurveError("point (%d, %r) lies in %d ovals" % (cid, coord, len(hits)))
    return hits[0] if hits else None


# -- cycles and differentials -------------------------------------------------


@dataclass
class CCycle:
    eid: object
    face_pos: int  # face whose walk leaves the canonical side through the edge
    face_neg: int


@dataclass
class CycleBasis:
    genus: int
    c_cycles: dict  # eid -> CCycle
    tree_edges: list  # g edge ids forming the dual spanning tree
    transform: list  # M with a_j = sum_e M[j][e] c_e over tree_edges (exact ints)


# the rotation-system tracing rule orients every interior face the same way;
# set below so that finite-face walks run clockwise (b-cycle convention)
_FLIP_WALKS = True


def _oriented_face_walks(network, faces):
    """Face walks normalized so finite faces run clockwise."""
    walks = {}
    for f in faces.faces:
        walk = f.items
        if _FLIP_WALKS:
            walk = [(v, kout, kin) for v, kin, kout in reversed(walk)]
        walks[f.fid] = walk
    return walks


def build_cycles(curve):
    """c-cycles around edges, and a-cycles as their integer combinations."""
    g = curve.network
    faces = curve.faces
    walks = _oriented_face_walks(g, faces)
    finite_ids = [f.fid for f in faces.faces if f.finite]
    infinite_id = next(f.fid for f in faces.faces if not f.finite)
    genus = len(finite_ids)

    # for every edge, which face leaves which side: in a clockwise finite-face
    # walk the item (v, kin, kout) exits component(v) through edge kout
    exits = {}  # (eid, vid) -> fid
    for fid, walk in walks.items():
        if fid == infinite_id:
            continue
        for v, kin, kout in walk:
            if isinstance(kout, int):
                exits[(kout, v)] = fid

    c_cycles = {}
    for e in g.edges.values():
        fp = exits.get((e.eid, e.tail))
        fn = exits.get((e.eid, e.head))
        # canonical side: the tail side; the face leaving through the tail side
        # is positive, the face leaving through the head side is negative
        c_cycles[e.eid] = CCycle(e.eid, fp, fn)

    # dual spanning tree rooted at the infinite face
    adj = {}
    for cc in c_cycles.values():
        fp = cc.face_pos if cc.face_pos is not None else infinite_id
        fn = cc.face_neg if cc.face_neg is not None else infinite_id
        if fp == fn:
            continue
        adj.setdefault(fp, []).append((fn, cc.eid))
        adj.setdefault(fn, []).append((fp, cc.eid))
    tree_edges = []
    seen = {infinite_id}
    queue = [infinite_id]
    order = []
    while queue:
        f = queue.pop(0)
        for nb, eid in sorted(adj.get(f, []), key=lambda t: (str(t[0]), str(t[1]))):
            if nb not in seen:
                seen.add(nb)
                tree_edges.append(eid)
                order.append(nb)
                queue.append(nb)
    if len(tree_edges) != genus:
        raise CurveError(
            "dual graph not connected: spanned %d of %d faces"
            % (len(tree_edges), genus)
        )

    # solve M R = I where R[e][f] is the residue vector of c_e
    idx = {fid: i for i, fid in enumerate(finite_ids)}
    R = [[Fraction(0)] * genus for _ in range(genus)]
    for r, eid in enumerate(tree_edges):
        cc = c_cycles[eid]
        if cc.face_pos is not None:
            R[r][idx[cc.face_pos]] += 1
        if cc.face_neg is not None:
            R[r][idx[cc.face_neg]] -= 1
    M = _fraction_inverse(R)
    for row in M:
        for x in row:
            if x.denominator != 1:
                raise CurveError("cycle transform is not integer; face data broken")
    basis = CycleBasis(genus, c_cycles, tree_edges, [[int(x) for x in row] for row in M])
    basis.finite_ids = finite_ids
    basis.face_index = idx
    return basis


def _fraction_inverse(R):
    n = len(R)
    m = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(R)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise CurveError("singular cycle residue matrix")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    # R is indexed rows=edges, we need M with M R = I, i.e. M = R^{-1}
    return [row[n:] for row in m]


@dataclass
class Differential:
    """Logarithmic differential: per component a list of (pole, residue)."""

    fid: int  # the finite face / b-cycle it normalizes against
    poles: dict  # cid -> list of (coordinate, residue)

    def components(self):
        return [cid for cid, ps in self.poles.items() if ps]

    def residue_at(self, cid, coord):
        return sum(r for p, r in self.poles.get(cid, []) if circle_key(p) == circle_key(coord))

    def restriction_str(self, cid):
        """Human-readable restriction like 'dz/(z-1) - dz/z'."""
        ps = self.poles.get(cid, [])
        finite = [(p, r) for p, r in ps if p != INF]
        if not finite:
            return "0"
        parts = []
        for p, r in sorted(finite, key=lambda t: t[0]):
            if r == 0:
                continue
            mag = "" if abs(r) == 1 else "%d*" % abs(r)
            if p == 0:
                term = "%sdz/z" % mag
            else:
                term = "%sdz/(z%+g)" % (mag, -p)
            parts.append(("+" if r > 0 else "-", term))
        if not parts:
            return "0"
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, term in parts[1:]:
            s += " %s %s" % (sign, term)
        return s


def build_differentials(curve, basis=None):
    """One normalized differential per finite face, by the pole rules:
    +1 residue where the clockwise cycle leaves a component, -1 where it enters.
    """
    g = curve.network
    faces = curve.faces
    walks = _oriented_face_walks(g, faces)
    diffs = []
    for f in faces.faces:
        if not f.finite:
            continue
        poles = {}
        for v, kin, kout in walks[f.fid]:
            if isinstance(kin, int):
                cid_in, co_in = curve.side_coord(kin, v)
                poles.setdefault(cid_in, []).append((co_in, -1))
            if isinstance(kout, int):
                cid_out, co_out = curve.side_coord(kout, v)
                poles.setdefault(cid_out, []).append((co_out, 1))
        # merge poles at identical coordinates
        for cid in list(poles):
            merged = {}
            for p, r in poles[cid]:
                merged[p] = merged.get(p, 0) + r
            poles[cid] = [(p, r) for p, r in merged.items() if r != 0]
            if not poles[cid]:
                del poles[cid]
        for cid, ps in poles.items():
            if sum(r for _, r in ps) != 0:
                raise CurveError(
                    "residues on component %d of omega_%d do not cancel" % (cid, f.fid)
                )
        diffs.append(Differential(f.fid, poles))
    return diffs


def a_periods(diffs, basis, curve):
    """The g x g matrix of a-periods, in units of 2*pi*i (exact integers).

    Periods over c-cycles are residues of the constructed differentials at the
    corresponding double points; this cross-checks differentials against the
    cycle transform and must give the identity.
    """
    g = basis.genus
    by_fid = {d.fid: d for d in diffs}
    out = [[0] * g for _ in range(g)]
    for j in range(g):
        for col, fid in enumerate(basis.finite_ids):
            d = by_fid[fid]
            total = 0
            for e_i, eid in enumerate(basis.tree_edges):
                cc = basis.c_cycles[eid]
                e = curve.network.edges[eid]
                cid, co = curve.side_coord(eid, e.tail)
                res = d.residue_at(cid, co)
                total += basis.transform[j][e_i] * res
            out[j][col] = total
    return out
