"""Lorenz vector field, equilibria, linearisation, adaptive integration with events.

States are plain numpy arrays of shape (3,). The only symmetry of the system,
rotation by pi about the z axis, is exposed as ``sigma_image``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp


class IntegrationError(RuntimeError):
    """Solver could not continue (step-size underflow or non-finite state)."""


@dataclass(frozen=True)
class ParamSet:
    """The positive parameter triple (sigma, r, beta)."""

    sigma: float
    r: float
    beta: float

    def __post_init__(self):
        for name in ("sigma", "r", "beta"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise ValueError(f"{name} must be a positive real, got {v!r}")

    @classmethod
    def classical(cls):
        return cls(10.0, 28.0, 8.0 / 3.0)

    def as_tuple(self):
        return (self.sigma, self.r, self.beta)


SIGMA_FLIP = np.array([-1.0, -1.0, 1.0])


def sigma_image(s):
    """The symmetry (x, y, z) -> (-x, -y, z), applied to states or sample arrays."""
    return np.asarray(s, dtype=float) * SIGMA_FLIP


def vector_field(s, p: ParamSet):
    x, y, z = s
    return np.array([p.sigma * (y - x), p.r * x - y - x * z, x * y - p.beta * z])


def jacobian(s, p: ParamSet):
    x, y, z = s
    return np.array([
        [-p.sigma, p.sigma, 0.0],
        [p.r - z, -1.0, -x],
        [y, x, -p.beta],
    ])


def divergence(p: ParamSet):
    """trace of the Jacobian; constant in phase space."""
    return -(p.sigma + 1.0 + p.beta)


def equilibria(p: ParamSet):
    """[origin] for r <= 1, else [origin, p+, p-]."""
    out = [np.zeros(3)]
    if p.r > 1.0:
        a = np.sqrt(p.beta * (p.r - 1.0))
        out.append(np.array([a, a, p.r - 1.0]))
        out.append(np.array([-a, -a, p.r - 1.0]))
    return out


def wing_centers(p: ParamSet):
    """(p+, p-); raises for r <= 1 where the wings do not exist."""
    if p.r <= 1.0:
        raise ValueError("wing centers exist only for r > 1")
    a = np.sqrt(p.beta * (p.r - 1.0))
    pl = np.array([a, a, p.r - 1.0])
    return pl, pl * SIGMA_FLIP


@dataclass(frozen=True)
class EigenSplit:
    """Eigen-decomposition of the Jacobian at an equilibrium.

    values are sorted by increasing real part; vectors[:, k] belongs to
    values[k]; tags[k] is 'stable' or 'unstable' by the sign of Re(value).
    """

    values: np.ndarray
    vectors: np.ndarray
    tags: tuple

    def count(self, tag):
        return sum(1 for t in self.tags if t == tag)

    def real_direction(self, tag):
        """Unit real eigenvector for the unique real eigenvalue with this tag."""
        picks = [
            k for k, t in enumerate(self.tags)
            if t == tag and abs(self.values[k].imag) < 1e-9
        ]
        if len(picks) != 1:
            raise ValueError(f"no unique real {tag} eigendirection (found {len(picks)})")
        v = self.vectors[:, picks[0]].real
        return v / np.linalg.norm(v)


def eigen_split(s, p: ParamSet, tol=1e-9):
    """Eigen data at an equilibrium; rejects non-equilibrium input."""
    s = np.asarray(s, dtype=float)
    scale = 1.0 + np.linalg.norm(s)
    if np.linalg.norm(vector_field(s, p)) > tol * scale:
        raise ValueError("eigen_split requires an equilibrium state")
    w, v = np.linalg.eig(jacobian(s, p))
    order = np.argsort(w.real)
    w, v = w[order], v[:, order]
    resid = np.linalg.norm(jacobian(s, p) @ v - v * w, axis=0)
    if resid.max() > 1e-8 * (1 + np.abs(w).max()):
        raise ArithmeticError("eigenvector residual too large")
    tags = tuple("unstable" if val.real > 0 else "stable" for val in w)
    return EigenSplit(values=w, vectors=v, tags=tags)


# ---------------------------------------------------------------------------
# event sections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaneSection:
    """{s : normal . s = offset}; direction +1/-1 restricts the crossing sense."""

    normal: tuple
    offset: float
    direction: int = 0
    terminal: bool = False

    def value(self, s):
        return float(np.dot(self.normal, s) - self.offset)


@dataclass(frozen=True)
class SphereSection:
    """{s : |s - center| = radius}; direction -1 catches entries, +1 exits."""

    center: tuple
    radius: float
    direction: int = 0
    terminal: bool = False

    def value(self, s):
        return float(np.linalg.norm(np.asarray(s) - np.asarray(self.center)) - self.radius)


def _compile_event(section):
    def ev(t, s):
        return section.value(s)

    ev.direction = float(section.direction)
    ev.terminal = bool(section.terminal)
    return ev


@dataclass
class EventHits:
    section: object
    times: np.ndarray
    states: np.ndarray


@dataclass
class Trajectory:
    """Samples of one integration run; t strictly increasing.

    For backward runs the samples are of the time-reversed field, so t is the
    (positive) backward time elapsed.
    """

    t: np.ndarray
    states: np.ndarray
    params: ParamSet
    events: list = field(default_factory=list)
    dense: object = None
    backward: bool = False

    def __len__(self):
        return len(self.t)

    @property
    def start(self):
        return self.states[0]

    @property
    def end(self):
        return self.states[-1]

    def at(self, t):
        """Dense-output evaluation (requires dense=True at integration time)."""
        if self.dense is None:
            raise ValueError("trajectory was integrated without dense output")
        return np.asarray(self.dense(t)).T

    def to_csv(self, path):
        write_trajectory_csv(self, path)


def integrate(s0, p: ParamSet, t_end, rtol=1e-10, atol=1e-12, events=(),
              dense=False, t_eval=None, backward=False, max_step=np.inf):
    """Adaptive embedded Runge-Kutta 5(4) run from s0 over [0, t_end].

    Section crossings are located by root polishing on the dense interpolant.
    Raises IntegrationError on NaN states or step-size underflow.
    """
    if rtol <= 0 or atol <= 0:
        raise ValueError("tolerances must be positive")
    s0 = np.asarray(s0, dtype=float)
    if not np.all(np.isfinite(s0)):
        raise IntegrationError("initial state is not finite")
    sgn = -1.0 if backward else 1.0

    def rhs(t, s):
        return sgn * vector_field(s, p)

    evs = [_compile_event(sec) for sec in events]
    try:
        sol = solve_ivp(rhs, (0.0, float(t_end)), s0, method="RK45", rtol=rtol,
                        atol=atol, events=evs or None, dense_output=dense,
                        t_eval=t_eval, max_step=max_step)
    except (ValueError, FloatingPointError) as exc:
        raise IntegrationError(str(exc)) from exc
    if not sol.success and sol.status == -1:
        raise IntegrationError(sol.message)
    if not np.all(np.isfinite(sol.y)):
        raise IntegrationError("non-finite state encountered")
    hits = []
    for sec, te, ye in zip(events, sol.t_events or [], sol.y_events or []):
        hits.append(EventHits(section=sec, times=np.asarray(te),
                              states=np.asarray(ye).reshape(-1, 3)))
    return Trajectory(t=sol.t, states=sol.y.T, params=p, events=hits,
                      dense=sol.sol if dense else None, backward=backward)


# ---------------------------------------------------------------------------
# trapping region
# ---------------------------------------------------------------------------

def trapping_function(s, p: ParamSet):
    """Quadratic V = r x^2 + sigma y^2 + sigma (z - 2r)^2, decreasing far out."""
    x, y, z = np.asarray(s, dtype=float).T
    return p.r * x**2 + p.sigma * y**2 + p.sigma * (z - 2 * p.r) ** 2


def trapping_derivative(s, p: ParamSet):
    """dV/dt along the flow: -2 sigma (r x^2 + y^2 + beta (z-r)^2 - beta r^2)."""
    x, y, z = np.asarray(s, dtype=float).T
    return -2.0 * p.sigma * (p.r * x**2 + y**2 + p.beta * (z - p.r) ** 2 - p.beta * p.r**2)


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def write_trajectory_csv(traj: Trajectory, path):
    """CSV with header t,x,y,z at 17 significant digits."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("t,x,y,z\n")
        for t, (x, y, z) in zip(traj.t, traj.states):
            fh.write(f"{t:.17g},{x:.17g},{y:.17g},{z:.17g}\n")
