"""Numerical integration of the normal form and first-integral drift checks.

Fixed-step classical RK4 on the first-order system (q, qdot)' = (qdot, Lam).
The acceleration is obtained per stage by a numeric linear solve of
g * Lam = rhs rather than by evaluating the symbolic Lam, which keeps the
compiled expressions small; the two routes are cross-checked at the initial
state.  A trajectory is truncated with a flag when it approaches a declared
singular set.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import sympy as sp

from .expressions import compile_fn, draw_points
from .mechanics import LagrangianSystem
from .noether import FirstIntegral, _as_expr

__all__ = [
    "Trajectory",
    "DriftReport",
    "integrate",
    "monitor_drift",
    "functional_independence_rank",
    "write_trajectory_csv",
]

SINGULAR_ABORT = 1e-3


@dataclass(frozen=True)
class Trajectory:
    """Uniform-step trajectory of a Lagrangian system."""

    system: str
    t: np.ndarray
    q: np.ndarray  # shape (m, n)
    qdot: np.ndarray  # shape (m, n)
    dt: float
    method: str = "rk4"
    truncated: bool = False


@dataclass(frozen=True)
class DriftReport:
    """Empirical drift of a first integral along a trajectory."""

    name: str
    initial: float
    max_abs_drift: float
    max_rel_drift: float
    nodes: int
    truncated: bool

    def to_dict(self) -> dict:
        return {
            "integral": self.name,
            "initial_value": self.initial,
            "max_abs_drift": self.max_abs_drift,
            "max_rel_drift": self.max_rel_drift,
            "nodes": self.nodes,
            "truncated": self.truncated,
        }


def _acceleration_solver(sys: LagrangianSystem):
    ab = sys.alphabet
    n = sys.n
    rhs = [
        sp.diff(sys.L, q)
        - sp.diff(sys.p[i], ab.t)
        - sum(sp.diff(sys.p[i], qj) * vj
              for qj, vj in zip(ab.coord_symbols, ab.velocity_symbols))
        for i, q in enumerate(ab.coord_symbols)
    ]
    g_entries = [sys.g[i, j] for i in range(n) for j in range(n)]
    fn = compile_fn(g_entries + rhs, ab, sys.bindings)
    names = [s.name for s in ab.variables()]

    def accel(t: float, q: np.ndarray, qdot: np.ndarray) -> np.ndarray:
        point = dict(zip(names, [t, *q, *qdot]))
        point.update(sys.param_values)
        vals = np.asarray(fn(point), dtype=float)
        g = vals[: n * n].reshape(n, n)
        b = vals[n * n:]
        return np.linalg.solve(g, b)

    return accel


def _singular_guard(sys: LagrangianSystem):
    if not sys.exclusions:
        return lambda t, q, qdot: False
    fn = compile_fn([ex.expr for ex in sys.exclusions], sys.alphabet, sys.bindings)
    names = [s.name for s in sys.alphabet.variables()]
    # steep singular sets can be crossed within a single step, so the abort
    # distance follows each declared exclusion margin, never less than the
    # baseline
    thresholds = np.array(
        [max(ex.threshold, SINGULAR_ABORT) for ex in sys.exclusions]
    )

    def near_singular(t: float, q: np.ndarray, qdot: np.ndarray) -> bool:
        point = dict(zip(names, [t, *q, *qdot]))
        point.update(sys.param_values)
        vals = np.atleast_1d(np.asarray(fn(point), dtype=float))
        return bool(np.any(~np.isfinite(vals)) or np.any(np.abs(vals) < thresholds))

    return near_singular


def integrate(
    sys: LagrangianSystem,
    initial: tuple[float, Sequence[float], Sequence[float]],
    t1: float,
    dt: float = 1e-3,
    method: str = "rk4",
) -> Trajectory:
    """Integrate qddot = Lam(t, q, qdot) from (t0, q0, qdot0) up to t1."""
    if method != "rk4":
        raise ValueError(f"unknown method {method!r}")
    if dt <= 0:
        raise ValueError("dt must be positive")
    t0, q0, qd0 = initial
    q0 = np.asarray(q0, dtype=float)
    qd0 = np.asarray(qd0, dtype=float)
    if q0.shape != (sys.n,) or qd0.shape != (sys.n,):
        raise ValueError(f"initial state must have dimension {sys.n}")

    accel = _acceleration_solver(sys)
    near_singular = _singular_guard(sys)
    if near_singular(t0, q0, qd0):
        raise ValueError("initial state is inside the singular exclusion zone")

    # cross-check the per-point solve against the symbolic normal form
    lam_fn = compile_fn(list(sys.lam), sys.alphabet, sys.bindings)
    names = [s.name for s in sys.alphabet.variables()]
    point = dict(zip(names, [t0, *q0, *qd0]))
    point.update(sys.param_values)
    lam_sym = np.asarray(lam_fn(point), dtype=float)
    lam_num = accel(t0, q0, qd0)
    if not np.allclose(lam_sym, lam_num, rtol=1e-9, atol=1e-9):
        raise RuntimeError(
            f"symbolic and numeric accelerations disagree at t0: {lam_sym} vs {lam_num}"
        )

    steps = int(round((t1 - t0) / dt))
    ts = [t0]
    qs = [q0]
    qds = [qd0]
    truncated = False

    def rhs(t, y):
        q, qd = y[: sys.n], y[sys.n:]
        return np.concatenate([qd, accel(t, q, qd)])

    y = np.concatenate([q0, qd0])
    t = t0
    for _ in range(steps):
        k1 = rhs(t, y)
        k2 = rhs(t + dt / 2, y + dt / 2 * k1)
        k3 = rhs(t + dt / 2, y + dt / 2 * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t + dt
        q, qd = y[: sys.n], y[sys.n:]
        if near_singular(t, q, qd):
            truncated = True
            break
        ts.append(t)
        qs.append(q.copy())
        qds.append(qd.copy())
    return Trajectory(
        system=sys.name,
        t=np.asarray(ts),
        q=np.asarray(qs),
        qdot=np.asarray(qds),
        dt=dt,
        truncated=truncated,
    )


def monitor_drift(
    sys: LagrangianSystem, traj: Trajectory, N, name: str = ""
) -> DriftReport:
    """Max absolute and relative deviation of N from its initial value."""
    expr = _as_expr(N)
    if isinstance(N, FirstIntegral) and not name:
        name = N.name
    fn = compile_fn([expr], sys.alphabet, sys.bindings)
    names = [s.name for s in sys.alphabet.variables()]
    values = np.empty(len(traj.t))
    for i in range(len(traj.t)):
        point = dict(zip(names, [traj.t[i], *traj.q[i], *traj.qdot[i]]))
        point.update(sys.param_values)
        values[i] = float(fn(point)[0])
    if not np.all(np.isfinite(values)):
        raise ValueError(f"integral {name or expr} not evaluable along trajectory")
    drift = np.abs(values - values[0])
    scale = 1.0 + abs(values[0])
    return DriftReport(
        name=name or str(expr),
        initial=float(values[0]),
        max_abs_drift=float(drift.max()),
        max_rel_drift=float(drift.max() / scale),
        nodes=len(traj.t),
        truncated=traj.truncated,
    )


def functional_independence_rank(
    sys: LagrangianSystem,
    integrals: Sequence,
    *,
    points: int = 10,
    seed: int = 0,
    svd_rtol: float = 1e-8,
) -> tuple[int, list[int]]:
    """Numeric rank of the Jacobian of the integrals with respect to
    (q, qdot), majority-voted over sample points.

    Returns (majority rank, per-point ranks).
    """
    exprs = [_as_expr(N) for N in integrals]
    ab = sys.alphabet
    state = ab.coord_symbols + ab.velocity_symbols
    jac_entries = [sp.diff(e, s) for e in exprs for s in state]
    fn = compile_fn(jac_entries, ab, sys.bindings)
    pts = draw_points(ab, sys.domain(), sys.param_values, sys.bindings, points, seed)
    ranks = []
    for point in pts:
        J = np.asarray(fn(point), dtype=float).reshape(len(exprs), len(state))
        sv = np.linalg.svd(J, compute_uv=False)
        ranks.append(int(np.sum(sv > svd_rtol * sv[0])))
    majority = max(set(ranks), key=ranks.count)
    return majority, ranks


def write_trajectory_csv(traj: Trajectory, path, coord_names: Sequence[str]) -> None:
    """Export with header t, q..., qdot... (one row per node)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["t"] + list(coord_names) + [c + "dot" for c in coord_names]
        )
        for i in range(len(traj.t)):
            writer.writerow(
                [f"{traj.t[i]:.12g}"]
                + [f"{v:.17g}" for v in traj.q[i]]
                + [f"{v:.17g}" for v in traj.qdot[i]]
            )
