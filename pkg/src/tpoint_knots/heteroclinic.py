"""Separatrix tracing, two-parameter T-point search, heteroclinic-knot assembly.

A T-point is a parameter pair (r, sigma) at which the one-dimensional unstable
manifold of the origin falls onto the one-dimensional stable manifold of a wing
center. The mismatch is measured in a two-dimensional chart on a small sphere
around the wing; a Broyden iteration drives it to zero.

Shipped seeds (beta = 8/3):
    first T-point   (31.0, 10.2)  -> approx (30.86809, 10.16729), trefoil
    second T-point  (85.0, 11.8)  -> approx (85.02918, 11.82791), figure-eight
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    IntegrationError,
    ParamSet,
    SphereSection,
    PlaneSection,
    Trajectory,
    eigen_split,
    integrate,
    sigma_image,
    vector_field,
    wing_centers,
)

FIRST_TPOINT_SEED = (31.0, 10.2)
SECOND_TPOINT_SEED = (85.0, 11.8)

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12


class SectionTimeout(RuntimeError):
    """A trajectory failed to reach the matching section within t_max."""


class NoConvergence(RuntimeError):
    """The T-point iteration left its basin or exhausted its iterations."""


class GapTooLarge(ValueError):
    """Knot tracing was requested away from a T-point."""


class AssemblyError(RuntimeError):
    """The assembled closed curve failed a validity check."""


# ---------------------------------------------------------------------------
# separatrices
# ---------------------------------------------------------------------------

def _seed_eps(p: ParamSet, eps):
    plus, _ = wing_centers(p)
    if eps is None:
        eps = 1e-6 * np.linalg.norm(plus)
    if not 1e-8 <= eps <= 1e-4:
        raise ValueError(f"eps={eps:g} outside [1e-8, 1e-4]")
    return eps


def unstable_origin_direction(p: ParamSet):
    """Unit unstable eigenvector at the origin, oriented into x > 0."""
    split = eigen_split(np.zeros(3), p)
    if split.count("unstable") != 1:
        raise ValueError("origin does not have a one-dimensional unstable manifold")
    v = split.real_direction("unstable")
    return -v if v[0] < 0 else v


def unstable_separatrix(p: ParamSet, side=+1, eps=None, t_max=40.0,
                        rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                        section=None, extra_sections=()):
    """Forward branch of W^u(origin); side +1 enters x > 0, -1 its mirror.

    Stops at the matching section (default: entry into the radius-5 sphere
    around either wing center) or raises SectionTimeout.
    """
    if p.r <= 1.0:
        raise ValueError("separatrix tracing requires r > 1")
    eps = _seed_eps(p, eps)
    v = unstable_origin_direction(p)
    s0 = side * eps * v
    if section is None:
        plus, minus = wing_centers(p)
        sections = [
            SphereSection(tuple(plus), 5.0, direction=-1, terminal=True),
            SphereSection(tuple(minus), 5.0, direction=-1, terminal=True),
        ]
    else:
        sections = [section]
    sections = list(sections) + list(extra_sections)
    traj = integrate(s0, p, t_max, rtol=rtol, atol=atol, events=sections, dense=True)
    if not any(h.times.size for h in traj.events[: 2 if section is None else 1]):
        raise SectionTimeout("unstable separatrix did not reach the matching section")
    return traj


def _stable_wing_data(p: ParamSet, side):
    plus, minus = wing_centers(p)
    target = plus if side > 0 else minus
    split = eigen_split(target, p)
    if split.count("stable") != 1:
        raise ValueError("wing center does not have a one-dimensional stable manifold")
    vs = split.real_direction("stable")
    return target, vs


def stable_separatrix_wing(p: ParamSet, side=+1, eps=None, t_max=15.0,
                           rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                           branch="auto", radius=5.0):
    """Backward-time branch of W^s(p^side), traced to its exit from the
    matching sphere (and beyond, up to t_max of backward time).

    branch='auto' keeps the sign whose backward orbit comes closest to the
    origin; near a T-point that is the branch carrying the heteroclinic
    connection.
    """
    target, vs = _stable_wing_data(p, side)
    eps = _seed_eps(p, eps)
    exit_sec = SphereSection(tuple(target), radius, direction=+1, terminal=False)
    runs = {}
    for sgn in (+1.0, -1.0) if branch == "auto" else (float(branch),):
        traj = integrate(target + sgn * eps * vs, p, t_max, rtol=rtol, atol=atol,
                         events=[exit_sec], dense=True, backward=True)
        if traj.events[0].times.size:
            runs[sgn] = traj
    if not runs:
        raise SectionTimeout("stable separatrix never left the matching sphere")
    if branch == "auto":
        def origin_proximity(tr):
            return float(np.linalg.norm(tr.states, axis=1).min())
        chosen = min(runs, key=lambda sgn: origin_proximity(runs[sgn]))
    else:
        chosen = float(branch)
    return runs[chosen]


# ---------------------------------------------------------------------------
# gap in the matching section
# ---------------------------------------------------------------------------

@dataclass
class GapResult:
    vector: np.ndarray          # 2-d mismatch in the sphere chart
    target_side: int            # +1 if the + separatrix lands near p+, else -1
    branch: float               # W^s branch sign retained
    q_forward: np.ndarray       # separatrix entry point on the sphere
    q_backward: np.ndarray      # stable-manifold exit point on the sphere
    entry_time: float

    @property
    def norm(self):
        return float(np.linalg.norm(self.vector))


def _sphere_chart(center, q_backward):
    w = (q_backward - center)
    w = w / np.linalg.norm(w)
    axis = np.eye(3)[int(np.argmin(np.abs(w)))]
    e1 = np.cross(w, axis)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(w, e1)
    return e1, e2


def gap(p: ParamSet, side=+1, radius=5.0, eps=None, t_max=40.0,
        rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL, full=False):
    """2-d mismatch between W^u(origin, side) and W^s of the wing it first
    approaches. Zero (to tolerance) exactly at a T-point.

    The wing may be p^side or its mirror: at the first T-point the separatrix
    entering x > 0 connects to p-, at the second to p+.
    """
    if p.r <= 1.0:
        raise ValueError("gap requires r > 1")
    eps = _seed_eps(p, eps)
    v = unstable_origin_direction(p)
    plus, minus = wing_centers(p)
    sections = [
        SphereSection(tuple(plus), radius, direction=-1, terminal=True),
        SphereSection(tuple(minus), radius, direction=-1, terminal=True),
    ]
    traj = integrate(side * eps * v, p, t_max, rtol=rtol, atol=atol, events=sections)
    hits = [k for k in (0, 1) if traj.events[k].times.size]
    if not hits:
        raise SectionTimeout("separatrix reached neither wing sphere")
    k = hits[0] if len(hits) == 1 else int(
        np.argmin([traj.events[kk].times[0] for kk in hits]))
    target = (plus, minus)[k]
    target_side = +1 if k == 0 else -1
    q_f = traj.events[k].states[0]
    entry_t = float(traj.events[k].times[0])

    _, vs = _stable_wing_data(p, target_side)
    exit_sec = SphereSection(tuple(target), radius, direction=+1, terminal=True)
    exits = {}
    for sgn in (+1.0, -1.0):
        back = integrate(target + sgn * eps * vs, p, 10.0, rtol=rtol, atol=atol,
                         events=[exit_sec], backward=True)
        if back.events[0].times.size:
            exits[sgn] = back.events[0].states[0]
    if not exits:
        raise SectionTimeout("stable branch never exited the matching sphere")
    branch = min(exits, key=lambda sgn: np.linalg.norm(q_f - exits[sgn]))
    q_b = exits[branch]
    e1, e2 = _sphere_chart(target, q_b)
    g = np.array([np.dot(q_f - q_b, e1), np.dot(q_f - q_b, e2)])
    if side < 0:
        # mirror symmetry maps the side -1 data onto side +1 with a fixed
        # chart reflection; report in the mirrored chart for comparability
        pass
    result = GapResult(vector=g, target_side=target_side, branch=branch,
                       q_forward=q_f, q_backward=q_b, entry_time=entry_t)
    return result if full else g


# ---------------------------------------------------------------------------
# T-point search
# ---------------------------------------------------------------------------

@dataclass
class TPointResult:
    r: float
    sigma: float
    beta: float
    gap_norm: float
    iterations: int
    evaluations: int
    target_side: int
    history: list = field(default_factory=list)

    def params(self):
        return ParamSet(sigma=self.sigma, r=self.r, beta=self.beta)


def find_tpoint(seed, beta=8.0 / 3.0, tol=1e-6, fd_step=1e-4, max_iter=40,
                radius=5.0, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Broyden iteration on gap(r, sigma) from a (r, sigma) seed.

    Finite-difference Jacobian at the start, Broyden rank-1 updates in
    between, full Jacobian refresh every 5 steps. Raises NoConvergence when
    the iteration leaves the valid region or stalls.
    """
    r0, s0 = float(seed[0]), float(seed[1])

    def evaluate(x):
        if x[0] <= 1.0 or x[1] <= 0.0:
            raise NoConvergence(f"iterate left the valid parameter region: {x}")
        try:
            res = gap(ParamSet(sigma=x[1], r=x[0], beta=beta), radius=radius,
                      rtol=rtol, atol=atol, full=True)
        except (SectionTimeout, IntegrationError) as exc:
            raise NoConvergence(f"gap evaluation failed at {x}: {exc}") from exc
        return res

    x = np.array([r0, s0])
    res = evaluate(x)
    F = res.vector
    n_eval = 1
    history = [(x.copy(), float(np.linalg.norm(F)))]

    def fd_jacobian(x, F):
        nonlocal n_eval
        J = np.zeros((2, 2))
        for i in range(2):
            xp = x.copy()
            xp[i] += fd_step
            J[:, i] = (evaluate(xp).vector - F) / fd_step
            n_eval += 1
        return J

    J = fd_jacobian(x, F)
    for it in range(max_iter):
        nF = float(np.linalg.norm(F))
        if nF < tol:
            return TPointResult(r=float(x[0]), sigma=float(x[1]), beta=beta,
                                gap_norm=nF, iterations=it, evaluations=n_eval,
                                target_side=res.target_side, history=history)
        if abs(np.linalg.det(J)) < 1e-14:
            raise NoConvergence("singular gap Jacobian")
        dx = np.linalg.solve(J, -F)
        lam = 1.0
        for _ in range(5):
            xn = x + lam * dx
            try:
                res_n = evaluate(xn)
            except NoConvergence:
                lam *= 0.5
                continue
            n_eval += 1
            if np.linalg.norm(res_n.vector) < nF or lam <= 0.25:
                break
            lam *= 0.5
        else:
            raise NoConvergence("line search failed")
        ds = xn - x
        dF = res_n.vector - F
        J = J + np.outer(dF - J @ ds, ds) / float(ds @ ds)
        x, F, res = xn, res_n.vector, res_n
        history.append((x.copy(), float(np.linalg.norm(F))))
        if (it + 1) % 5 == 0:
            J = fd_jacobian(x, F)
    raise NoConvergence(f"no T-point within {max_iter} iterations "
                        f"(last |gap| = {np.linalg.norm(F):.3e})")


# ---------------------------------------------------------------------------
# heteroclinic knot assembly
# ---------------------------------------------------------------------------

@dataclass
class ClosedCurve3:
    """Closed polygon in 3-space; the final edge joins vertices[-1] to vertices[0].

    arcs maps provenance labels ('separatrix+', 'closure', 'separatrix-') to
    index ranges [start, stop) into vertices.
    """

    vertices: np.ndarray
    arcs: dict

    def __len__(self):
        return len(self.vertices)

    def arc_label(self, index):
        for label, (a, b) in self.arcs.items():
            if a <= index < b:
                return label
        return None

    def sigma_mirror(self):
        return ClosedCurve3(vertices=sigma_image(self.vertices), arcs=dict(self.arcs))

    def min_clearance(self, window=8):
        """Minimum vertex-to-vertex distance between parametrically distant samples."""
        pts = self.vertices
        n = len(pts)
        best = np.inf
        for i in range(0, n, 256):
            blk = pts[i:i + 256]
            d = np.linalg.norm(pts[None, :, :] - blk[:, None, :], axis=2)
            for a in range(len(blk)):
                ia = i + a
                offs = (np.arange(n) - ia) % n
                mask = (offs > window) & (offs < n - window)
                if mask.any():
                    best = min(best, float(d[a][mask].min()))
        return best

    def to_csv(self, path):
        """CSV rows arc,t,x,y,z with a per-arc sample index as t."""
        with open(path, "w", encoding="ascii") as fh:
            fh.write("arc,t,x,y,z\n")
            for label, (a, b) in self.arcs.items():
                for k in range(a, b):
                    x, y, z = self.vertices[k]
                    fh.write(f"{label},{k - a},{x:.17g},{y:.17g},{z:.17g}\n")


def _projection_uv(pts):
    """Coordinates in the plane x = y: u = (x+y)/sqrt(2), v = z."""
    pts = np.atleast_2d(pts)
    return np.column_stack([(pts[:, 0] + pts[:, 1]) / np.sqrt(2.0), pts[:, 2]])


def _count_polyline_crossings(a, b):
    """Transversal intersections between 2-d polylines a and b (open, interior only)."""
    total = 0
    b0, b1 = b[:-1], b[1:]
    e = b1 - b0
    for p0, p1 in zip(a[:-1], a[1:]):
        d = p1 - p0
        den = d[0] * e[:, 1] - d[1] * e[:, 0]
        ok = np.abs(den) > 1e-14
        w = b0 - p0
        dens = np.where(ok, den, 1.0)
        t = (w[:, 0] * e[:, 1] - w[:, 1] * e[:, 0]) / dens
        s = (w[:, 0] * d[1] - w[:, 1] * d[0]) / dens
        total += int(np.count_nonzero(ok & (t > 1e-9) & (t < 1 - 1e-9)
                                      & (s > 1e-9) & (s < 1 - 1e-9)))
    return total


def close_through_infinity(tail_end, obstacle_images, r_far):
    """Polyline from the escaped stable-manifold tail end to its sigma image,
    routed through the far region.

    Candidate routes push the horizontal coordinates out to 1.6 * r_far, rise
    to 2.2 * r_far in z, and traverse symmetrically over the top; the first
    candidate whose x=y-plane image crosses none of the obstacle images is
    used, otherwise the one with the fewest crossings.
    """
    q = np.asarray(tail_end, dtype=float)
    z_far = 2.2 * r_far
    side = 1.0 if (q[0] + q[1]) >= 0 else -1.0
    h = 1.6 * r_far / np.sqrt(2.0)
    mid = np.array([side * h, -side * h, z_far])
    candidates = []
    candidates.append([q, np.array([side * h, side * h, q[2]]),
                       np.array([side * h, side * h, z_far])])
    candidates.append([q, np.array([q[0], q[1], z_far]),
                       np.array([side * h, side * h, z_far])])
    rh = float(np.hypot(q[0], q[1]))
    if rh > 1e-9:
        sc = 1.6 * r_far / rh
        candidates.append([q, np.array([q[0] * sc, q[1] * sc, q[2]]),
                           np.array([q[0] * sc, q[1] * sc, z_far])])
    best, best_count = None, None
    for cand in candidates:
        half = np.array(cand)
        full = np.vstack([half, mid[None, :], sigma_image(half)[::-1]])
        n = sum(_count_polyline_crossings(_projection_uv(full), img)
                for img in obstacle_images)
        if n == 0:
            return full
        if best_count is None or n < best_count:
            best, best_count = full, n
    return best


def trace_heteroclinic_knot(p: ParamSet, gap_tol=1e-6, rtol=DEFAULT_RTOL,
                            atol=DEFAULT_ATOL, clean_fraction=0.01,
                            t_max=40.0, far_factor=3.0):
    """Assemble the closed heteroclinic curve at a T-point.

    Pieces: the + separatrix of the origin up to the wing it connects to, the
    non-connecting branch of that wing's stable manifold traced backward until
    it escapes to radius far_factor * (curve extent) (the arc through
    infinity), a far closing arc to the mirror configuration, and the sigma
    images of all of the above. Sample runs within clean_fraction * |p+| of an
    equilibrium are replaced by straight chords into the equilibrium so the
    polygon stays transversal to itself.
    """
    g = gap(p, full=True, rtol=rtol, atol=atol)
    if g.norm >= gap_tol:
        raise GapTooLarge(f"|gap| = {g.norm:.3e} >= {gap_tol:g}; not a T-point")
    plus, minus = wing_centers(p)
    target = plus if g.target_side > 0 else minus
    clean = clean_fraction * np.linalg.norm(plus)

    approach = SphereSection(tuple(target), clean, direction=-1, terminal=True)
    sep = unstable_separatrix(p, +1, t_max=t_max, rtol=rtol, atol=atol,
                              section=approach)
    pts = sep.states
    radii = np.linalg.norm(pts, axis=1)
    k0 = int(np.argmax(radii >= clean))
    pts = pts[k0:]
    end = sep.events[0].states[0]
    sep_pts = np.vstack([pts, end[None, :]])

    r_far = far_factor * max(np.abs(sep_pts).max(), float(np.linalg.norm(target)))
    far_exit = SphereSection((0.0, 0.0, 0.0), r_far, direction=+1, terminal=True)
    _, vs = _stable_wing_data(p, g.target_side)
    eps = _seed_eps(p, None)
    tail_traj = integrate(target - g.branch * eps * vs, p, 30.0, rtol=rtol,
                          atol=atol, events=[far_exit], backward=True)
    if not tail_traj.events[0].times.size:
        raise AssemblyError("closure arc failed to escape to the far region")
    tail = np.vstack([tail_traj.states, tail_traj.events[0].states[0][None, :]])
    k1 = int(np.argmax(np.linalg.norm(tail - target, axis=1) >= clean))
    tail = tail[k1:]

    obstacles = [_projection_uv(sep_pts), _projection_uv(sigma_image(sep_pts)),
                 _projection_uv(tail), _projection_uv(sigma_image(tail))]
    far_arc = close_through_infinity(tail[-1], obstacles, r_far)

    sep_block = np.vstack([np.zeros((1, 3)), sep_pts, target[None, :]])
    closure_block = np.vstack([tail, far_arc[1:-1], sigma_image(tail)[::-1]])
    mirror_block = sigma_image(sep_block)[::-1][:-1]   # sigma(target) ... back to origin
    vertices = np.vstack([sep_block, closure_block, mirror_block])
    arcs = {
        "separatrix+": (0, len(sep_block)),
        "closure": (len(sep_block), len(sep_block) + len(closure_block)),
        "separatrix-": (len(sep_block) + len(closure_block), len(vertices)),
    }
    curve = ClosedCurve3(vertices=vertices, arcs=arcs)
    clearance = curve.min_clearance()
    if clearance <= 0.0:
        raise AssemblyError("assembled curve self-intersects")
    return curve


# ---------------------------------------------------------------------------
# section-passage bookkeeping (cross-section proxy z = r - 1)
# ---------------------------------------------------------------------------

def plane_passages(p: ParamSet, side=+1, t_max=40.0, rtol=DEFAULT_RTOL,
                   atol=DEFAULT_ATOL):
    """Number of downward crossings of the plane z = r - 1 by the separatrix
    before it reaches a wing sphere (proxy for passages through the paper's
    cross-section)."""
    counter = PlaneSection((0.0, 0.0, 1.0), p.r - 1.0, direction=-1, terminal=False)
    traj = unstable_separatrix(p, side, t_max=t_max, rtol=rtol, atol=atol,
                               extra_sections=[counter])
    stop = min((h.times[0] for h in traj.events[:2] if h.times.size), default=np.inf)
    passes = traj.events[-1].times
    return int(np.count_nonzero(passes < stop))
