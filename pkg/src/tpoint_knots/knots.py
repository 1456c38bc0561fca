"""Polygonal space curves -> planar diagrams -> Gauss codes -> Alexander polynomials.

Diagrams come from orthogonal projection of closed 3-d polygons; crossings keep
exact parametric positions along the traversal, so the combinatorial layer
(Gauss code, Wirtinger/Alexander matrix, Seifert circles, visual primality) is
separated from the floating-point geometry.

Conventions: the viewer sits at +infinity along the projection direction, the
strand with the larger depth passes over; a crossing is positive when the
under tangent is the over tangent rotated counter-clockwise by less than pi
(braid-theory convention, matching sigma_i with the left strand on top).
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np

from .laurent import LaurentPoly, ONE, det_laurent


class ProjectionError(RuntimeError):
    """No generic projection found within the retry budget."""


class DiagramError(ValueError):
    """Structurally invalid diagram for the requested operation."""


class _Degenerate(Exception):
    pass


# ---------------------------------------------------------------------------
# diagram data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Crossing:
    """One transversal double point of the projected curve.

    Positions are parametric: component index plus (segment index + fraction)
    along that component's closed polyline.
    """

    over_comp: int
    over_pos: float
    under_comp: int
    under_pos: float
    sign: int
    point: tuple


@dataclass
class PlanarDiagram:
    components: list            # list of (k, 2) float arrays, closed polylines
    crossings: list             # list of Crossing
    direction: np.ndarray = None

    @property
    def n_crossings(self):
        return len(self.crossings)

    @property
    def n_components(self):
        return len(self.components)

    def signs(self):
        return [c.sign for c in self.crossings]

    def writhe(self):
        return sum(c.sign for c in self.crossings)

    def is_single_component(self):
        return len(self.components) == 1

    def passages(self, comp):
        """Sorted (position, crossing index, 'o'|'u') along one component."""
        out = []
        for k, cr in enumerate(self.crossings):
            if cr.over_comp == comp:
                out.append((cr.over_pos, k, "o"))
            if cr.under_comp == comp:
                out.append((cr.under_pos, k, "u"))
        out.sort()
        return out

    def to_json_dict(self):
        arcs, refs = wirtinger_arcs(self)
        return {
            "arcs": [
                {"id": i, "component": a["component"],
                 "points": [[float(x), float(y)] for x, y in a["points"]]}
                for i, a in enumerate(arcs)
            ],
            "crossings": [
                {"over": refs[k]["over"], "under_in": refs[k]["under_in"],
                 "under_out": refs[k]["under_out"], "sign": cr.sign,
                 "x": float(cr.point[0]), "y": float(cr.point[1])}
                for k, cr in enumerate(self.crossings)
            ],
        }


# ---------------------------------------------------------------------------
# projection
# ---------------------------------------------------------------------------

def _as_component_arrays(curve):
    """Accepts an (n,3) array, an object with .vertices, or a list of those."""
    if hasattr(curve, "vertices"):
        curve = [np.asarray(curve.vertices, dtype=float)]
    elif isinstance(curve, np.ndarray) and curve.ndim == 2:
        curve = [np.asarray(curve, dtype=float)]
    else:
        curve = [np.asarray(getattr(c, "vertices", c), dtype=float) for c in curve]
    out = []
    for pts in curve:
        if pts.shape[0] < 3 or pts.shape[1] != 3:
            raise ValueError("each component needs at least 3 points in R^3")
        if np.linalg.norm(pts[0] - pts[-1]) == 0.0:
            pts = pts[:-1]
        keep = np.ones(len(pts), dtype=bool)
        keep[1:] = np.linalg.norm(np.diff(pts, axis=0), axis=1) > 0.0
        out.append(pts[keep])
    return out


def projection_frame(direction):
    """Right-handed orthonormal frame (u, v, d) with d the line of sight."""
    d = np.asarray(direction, dtype=float)
    n = np.linalg.norm(d)
    if n == 0:
        raise ValueError("projection direction must be nonzero")
    d = d / n
    axis = np.eye(3)[int(np.argmin(np.abs(d)))]
    u = np.cross(d, axis)
    u /= np.linalg.norm(u)
    v = np.cross(d, u)
    return u, v, d


def _rotate(vec, axis, angle):
    axis = axis / np.linalg.norm(axis)
    k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]],
                  [-axis[1], axis[0], 0]])
    r = np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * (k @ k)
    return r @ vec


def _crossings_of_projection(comps3, direction, scale):
    """All transversal double points, or raise _Degenerate."""
    u, v, d = projection_frame(direction)
    comps2, depths = [], []
    for pts in comps3:
        comps2.append(np.column_stack([pts @ u, pts @ v]))
        depths.append(pts @ d)

    # flat segment table across components
    seg_p0, seg_p1, seg_d0, seg_d1, seg_comp, seg_loc = [], [], [], [], [], []
    for ci, (P, dep) in enumerate(zip(comps2, depths)):
        m = len(P)
        nxt = np.roll(np.arange(m), -1)
        seg_p0.append(P)
        seg_p1.append(P[nxt])
        seg_d0.append(dep)
        seg_d1.append(dep[nxt])
        seg_comp.append(np.full(m, ci))
        seg_loc.append(np.arange(m))
    P0 = np.vstack(seg_p0)
    P1 = np.vstack(seg_p1)
    D0 = np.concatenate(seg_d0)
    D1 = np.concatenate(seg_d1)
    C = np.concatenate(seg_comp)
    L = np.concatenate(seg_loc)
    sizes = {ci: len(p) for ci, p in enumerate(comps2)}
    M = len(P0)
    seglen = np.linalg.norm(P1 - P0, axis=1)

    crossings = []
    for i in range(M):
        j = np.arange(i + 1, M)
        if j.size == 0:
            continue
        same = C[j] == C[i]
        mci = sizes[int(C[i])]
        adj = same & (
            (L[j] == (L[i] + 1) % mci) | (L[i] == (L[j] + 1) % mci)
        )
        j = j[~adj]
        if j.size == 0:
            continue
        a0, a1 = P0[i], P1[i]
        dv = a1 - a0
        b0 = P0[j]
        e = P1[j] - b0
        den = dv[0] * e[:, 1] - dv[1] * e[:, 0]
        ok = np.abs(den) > 1e-300
        w = b0 - a0
        dens = np.where(ok, den, 1.0)
        t = (w[:, 0] * e[:, 1] - w[:, 1] * e[:, 0]) / dens
        s = (w[:, 0] * dv[1] - w[:, 1] * dv[0]) / dens
        hit = ok & (t > 0) & (t < 1) & (s > 0) & (s < 1)
        for idx in np.nonzero(hit)[0]:
            jj = int(j[idx])
            ti, sj = float(t[idx]), float(s[idx])
            if min(ti, 1 - ti) * seglen[i] < 1e-9 * scale:
                raise _Degenerate("crossing at a vertex")
            if min(sj, 1 - sj) * seglen[jj] < 1e-9 * scale:
                raise _Degenerate("crossing at a vertex")
            di = D0[i] + ti * (D1[i] - D0[i])
            dj = D0[jj] + sj * (D1[jj] - D0[jj])
            if abs(di - dj) < 1e-7 * scale:
                raise _Degenerate("depth separation too small")
            ta = dv / np.linalg.norm(dv)
            eb = e[idx] / np.linalg.norm(e[idx])
            cross = ta[0] * eb[1] - ta[1] * eb[0]
            if abs(cross) < 1e-6:
                raise _Degenerate("tangential crossing")
            pt = a0 + ti * dv
            pos_i = (int(C[i]), float(L[i]) + ti)
            pos_j = (int(C[jj]), float(L[jj]) + sj)
            if di > dj:
                over, under, sign = pos_i, pos_j, (1 if cross > 0 else -1)
            else:
                over, under, sign = pos_j, pos_i, (1 if -cross > 0 else -1)
            crossings.append(Crossing(over_comp=over[0], over_pos=over[1],
                                      under_comp=under[0], under_pos=under[1],
                                      sign=sign, point=(float(pt[0]), float(pt[1]))))
    pts = np.array([c.point for c in crossings]) if crossings else np.zeros((0, 2))
    for a in range(len(pts)):
        dd = np.linalg.norm(pts[a + 1:] - pts[a], axis=1)
        if dd.size and dd.min() < 1e-7 * scale:
            raise _Degenerate("two crossings coincide")
    return comps2, crossings


def project(curve, direction, seed=0, max_retries=32):
    """Orthogonal projection of closed curve(s) along a line of sight.

    Degenerate views (tangencies, near-vertex or coincident crossings, depth
    ties) are retried with small seeded rotations of the direction, at most
    max_retries times.
    """
    comps3 = _as_component_arrays(curve)
    scale = max(float(np.ptp(np.vstack(comps3))), 1e-30)
    rng = np.random.default_rng(seed)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    last = None
    for attempt in range(max_retries + 1):
        try:
            comps2, crossings = _crossings_of_projection(comps3, d, scale)
            return PlanarDiagram(components=comps2, crossings=crossings,
                                 direction=d.copy())
        except _Degenerate as exc:
            last = exc
            axis = rng.normal(size=3)
            d = _rotate(d, axis, 1e-4 * (attempt + 1))
    raise ProjectionError(f"no generic projection after {max_retries} retries: {last}")


# ---------------------------------------------------------------------------
# Gauss code
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussCode:
    """Canonical cyclic sequence of (crossing id, 'o'|'u', sign).

    Canonical = lexicographically minimal over rotations, with crossing ids
    relabelled in order of first appearance; invariant under both rotation of
    the start point and relabelling of the input diagram.
    """

    entries: tuple

    def __len__(self):
        return len(self.entries)

    def __str__(self):
        return " ".join(f"{'O' if r == 'o' else 'U'}{k}{'+' if s > 0 else '-'}"
                        for k, r, s in self.entries)


def _canonical_cycle(entries):
    if not entries:
        return ()
    best = None
    m = len(entries)
    for start in range(m):
        rot = entries[start:] + entries[:start]
        relabel = {}
        norm = []
        for k, role, sign in rot:
            if k not in relabel:
                relabel[k] = len(relabel)
            norm.append((relabel[k], role, sign))
        cand = tuple(norm)
        if best is None or cand < best:
            best = cand
    return best


def gauss_code(diagram: PlanarDiagram):
    if not diagram.is_single_component():
        raise DiagramError("Gauss codes are defined here for single closed curves")
    seq = [(k, role, diagram.crossings[k].sign)
           for _, k, role in diagram.passages(0)]
    return GaussCode(entries=_canonical_cycle(seq))


# ---------------------------------------------------------------------------
# Alexander polynomial (crossing/arc matrix)
# ---------------------------------------------------------------------------

def _arc_structure(diagram):
    """Wirtinger arcs of a single-component diagram.

    Arc a ends at the a-th under-passage (sorted along the traversal) and the
    next arc starts there. Returns under positions, arc-ending map, and a
    locator for the arc containing any position.
    """
    passages = diagram.passages(0)
    unders = [(pos, k) for pos, k, role in passages if role == "u"]
    positions = [pos for pos, _ in unders]
    ends_at = {k: a for a, (_, k) in enumerate(unders)}

    def arc_containing(pos):
        return bisect.bisect_left(positions, pos) % len(positions)

    return positions, ends_at, arc_containing


def alexander(diagram: PlanarDiagram):
    """Normalized Alexander polynomial via the crossing/arc matrix.

    Rows come from the Wirtinger relations with generators abelianised to t;
    one row and one column are deleted before the exact determinant.
    """
    if not diagram.is_single_component():
        raise DiagramError("alexander() expects a knot diagram (one component)")
    c = diagram.n_crossings
    if c == 0:
        return ONE
    _, ends_at, arc_containing = _arc_structure(diagram)
    t = LaurentPoly.t()
    one = ONE
    rows = [[LaurentPoly() for _ in range(c)] for _ in range(c)]
    for k, cr in enumerate(diagram.crossings):
        a_in = ends_at[k]
        a_out = (a_in + 1) % c
        a_over = arc_containing(cr.over_pos)
        row = rows[k]
        if cr.sign > 0:
            row[a_over] = row[a_over] + (one - t)
            row[a_in] = row[a_in] + t
            row[a_out] = row[a_out] - one
        else:
            row[a_over] = row[a_over] + (t - one)
            row[a_in] = row[a_in] + one
            row[a_out] = row[a_out] - t
    minor = [row[: c - 1] for row in rows[: c - 1]]
    det = det_laurent(minor)
    if det.is_zero():
        raise DiagramError("Alexander matrix dropped rank; diagram data corrupt")
    return det.normalized()


IDENT_TABLE = {
    LaurentPoly((1,)): "unknot-candidate",
    LaurentPoly((1, -1, 1)): "trefoil",
    LaurentPoly((1, -3, 1)): "figure-eight",
    LaurentPoly((2, -5, 2)): "9_46",
}


def identify_polynomial(poly: LaurentPoly):
    return IDENT_TABLE.get(poly.normalized(), f"unidentified({poly.normalized()})")


def identify(diagram: PlanarDiagram):
    """Knot name consistent with the Alexander polynomial (table lookup)."""
    return identify_polynomial(alexander(diagram))


# ---------------------------------------------------------------------------
# positivity / primality
# ---------------------------------------------------------------------------

def is_positive(diagram: PlanarDiagram):
    return all(cr.sign == +1 for cr in diagram.crossings)


def _diagram_graph(diagram):
    """4-valent multigraph: vertices = crossings, edges = traversal pieces."""
    edges = []
    for ci in range(diagram.n_components):
        ps = diagram.passages(ci)
        if not ps:
            if diagram.n_crossings:
                raise DiagramError("diagram graph is disconnected (free circle)")
            continue
        ids = [k for _, k, _ in ps]
        for a in range(len(ids)):
            edges.append((ids[a], ids[(a + 1) % len(ids)]))
    return edges


def _connected(n_vertices, edges, skip=()):
    if n_vertices == 0:
        return True
    adj = {v: [] for v in range(n_vertices)}
    for ei, (a, b) in enumerate(edges):
        if ei in skip:
            continue
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n_vertices


def _bridges(n_vertices, edges, skip):
    """Bridge edges of the multigraph with edge `skip` removed (iterative DFS)."""
    adj = {v: [] for v in range(n_vertices)}
    for ei, (a, b) in enumerate(edges):
        if ei == skip:
            continue
        adj[a].append((b, ei))
        adj[b].append((a, ei))
    disc = {}
    low = {}
    out = []
    counter = [0]
    for root in range(n_vertices):
        if root in disc:
            continue
        stack = [(root, -1, iter(adj[root]))]
        disc[root] = low[root] = counter[0]
        counter[0] += 1
        while stack:
            v, pedge, it = stack[-1]
            advanced = False
            for w, ei in it:
                if ei == pedge:
                    continue
                if w not in disc:
                    disc[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append((w, ei, iter(adj[w])))
                    advanced = True
                    break
                low[v] = min(low[v], disc[w])
            if not advanced:
                stack.pop()
                if stack:
                    u = stack[-1][0]
                    low[u] = min(low[u], low[v])
                    if low[v] > disc[u]:
                        out.append(pedge)
    return out


def is_prime_diagram(diagram: PlanarDiagram):
    """Visual primality: no pair of edges disconnects the underlying 4-valent
    plane graph into two pieces that both contain a crossing.

    0- and 1-crossing diagrams are vacuously prime.
    """
    c = diagram.n_crossings
    if c <= 1:
        return True
    edges = _diagram_graph(diagram)
    if not _connected(c, edges):
        raise DiagramError("is_prime_diagram requires a connected diagram")
    for ei, (a, b) in enumerate(edges):
        if a == b:
            continue                      # loops never participate in a 2-cut
        for f in _bridges(c, edges, ei):
            if not _connected(c, edges, skip={ei, f}):
                return False
    return True


# ---------------------------------------------------------------------------
# Seifert algorithm (independent genus oracle)
# ---------------------------------------------------------------------------

def seifert_circles(diagram: PlanarDiagram):
    """Number of circles after orientation-respecting smoothing of every crossing."""
    edge_ids = {}
    edges_by_comp = {}
    for ci in range(diagram.n_components):
        ps = diagram.passages(ci)
        edges_by_comp[ci] = ps
        for slot in range(len(ps)):
            edge_ids[(ci, slot)] = len(edge_ids)
    if not edge_ids:
        return diagram.n_components
    # locate each (crossing, role) passage
    where = {}
    for ci, ps in edges_by_comp.items():
        for slot, (_, k, role) in enumerate(ps):
            where[(k, role)] = (ci, slot)

    def next_edge(ci, slot):
        ps = edges_by_comp[ci]
        arrive = (slot + 1) % len(ps)
        _, k, role = ps[arrive]
        partner = where[(k, "u" if role == "o" else "o")]
        return partner

    count = 0
    seen = set()
    for start in edge_ids:
        if start in seen:
            continue
        count += 1
        cur = start
        while cur not in seen:
            seen.add(cur)
            cur = next_edge(*cur)
    free = sum(1 for ci in range(diagram.n_components) if not edges_by_comp[ci])
    return count + free


def seifert_genus(diagram: PlanarDiagram):
    """Genus of the Seifert surface built from the diagram: (2 - mu - s + c)/2."""
    s = seifert_circles(diagram)
    c = diagram.n_crossings
    mu = diagram.n_components
    num = 2 - mu - s + c
    if num % 2:
        raise DiagramError("odd Euler bookkeeping; diagram data corrupt")
    return num // 2


# ---------------------------------------------------------------------------
# Wirtinger arcs + export
# ---------------------------------------------------------------------------

def _point_at(P, pos):
    m = len(P)
    i = int(pos) % m
    frac = pos - int(pos)
    return P[i] + frac * (P[(i + 1) % m] - P[i])


def wirtinger_arcs(diagram: PlanarDiagram):
    """Arcs obtained by cutting each component at its under-passages.

    Returns (arcs, refs): arcs as dicts with 'component' and 'points', refs
    maps crossing index -> {'over': arc, 'under_in': arc, 'under_out': arc}.
    """
    arcs = []
    arc_lookup = {}
    for ci in range(diagram.n_components):
        P = diagram.components[ci]
        m = len(P)
        unders = sorted((cr.under_pos, k) for k, cr in enumerate(diagram.crossings)
                        if cr.under_comp == ci)
        base = len(arcs)
        if not unders:
            pts = np.vstack([P, P[:1]])
            arcs.append({"component": ci, "points": pts})
            arc_lookup[ci] = ([], base)
            continue
        for a in range(len(unders)):
            p_start = unders[a][0]
            p_stop = unders[(a + 1) % len(unders)][0]
            pts = [_point_at(P, p_start)]
            pos = int(np.floor(p_start)) + 1
            span = (p_stop - p_start) % m
            steps = 0
            while steps < span:
                pts.append(P[pos % m])
                pos += 1
                steps = (pos - p_start) % m if (pos - p_start) % m else m
                if len(pts) > m + 2:
                    break
            pts.append(_point_at(P, p_stop))
            arcs.append({"component": ci, "points": np.array(pts)})
        arc_lookup[ci] = ([pos for pos, _ in unders], base)
    refs = {}
    for k, cr in enumerate(diagram.crossings):
        upos, ubase = arc_lookup[cr.under_comp]
        opos, obase = arc_lookup[cr.over_comp]
        if upos:
            idx = upos.index(cr.under_pos)
            under_out = ubase + (idx + 1) % len(upos)
            under_in = ubase + idx
        else:
            under_in = under_out = ubase
        if opos:
            over = obase + (bisect.bisect_left(opos, cr.over_pos) % len(opos) - 1) % len(opos)
        else:
            over = obase
        refs[k] = {"over": over, "under_in": under_in, "under_out": under_out}
    return arcs, refs


def diagram_to_svg(diagram: PlanarDiagram, path, size=640, margin=0.06):
    """Render polylines with over/under gaps: under-strands get a gap, the
    over strand is re-stroked on top near each crossing."""
    allpts = np.vstack(diagram.components)
    lo = allpts.min(axis=0)
    hi = allpts.max(axis=0)
    span = max(float((hi - lo).max()), 1e-12)
    pad = margin * span

    def sxy(p):
        q = (p - lo + pad) / (span + 2 * pad) * size
        return q[0], size - q[1]

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<rect width="{size}" height="{size}" fill="white"/>']
    for P in diagram.components:
        pts = " ".join("%.2f,%.2f" % sxy(p) for p in np.vstack([P, P[:1]]))
        lines.append(f'<polyline points="{pts}" fill="none" stroke="black" '
                     f'stroke-width="1.6"/>')
    for cr in diagram.crossings:
        P = diagram.components[cr.over_comp]
        m = len(P)
        i = int(cr.over_pos) % m
        frac = cr.over_pos - int(cr.over_pos)
        a = P[i] + max(frac - 0.35, 0.0) * (P[(i + 1) % m] - P[i])
        b = P[i] + min(frac + 0.35, 1.0) * (P[(i + 1) % m] - P[i])
        (x1, y1), (x2, y2) = sxy(a), sxy(b)
        lines.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                     f'stroke="white" stroke-width="6"/>')
        lines.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                     f'stroke="black" stroke-width="1.6"/>')
    lines.append("</svg>")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# curve-level classification helper
# ---------------------------------------------------------------------------

def classify_curve(curve, directions=10, seed=0, base_direction=(1.0, -1.0, 0.0)):
    """Alexander polynomial of a closed space curve over several projection
    directions: the base direction (default: onto the plane x = y) plus
    seeded random ones. Returns (polynomial, name, per-direction list)."""
    rng = np.random.default_rng(seed)
    dirs = [np.asarray(base_direction, dtype=float)]
    while len(dirs) < directions:
        v = rng.normal(size=3)
        if np.linalg.norm(v) > 1e-3:
            dirs.append(v)
    results = []
    for k, d in enumerate(dirs):
        diagram = project(curve, d, seed=seed + 1000 + k)
        results.append((d / np.linalg.norm(d), alexander(diagram), diagram.n_crossings))
    polys = {str(p) for _, p, _ in results}
    if len(polys) != 1:
        raise DiagramError(f"projection directions disagree: {sorted(polys)}")
    poly = results[0][1]
    return poly, identify_polynomial(poly), results
