"""Projected time-stepping simulation of the constrained dynamics.

Explicit projected Euler: x_next = proj(x + dt f(x)), with the per-step
multiplier estimate eta = (x_next - x)/dt - f(x).  Serves as the independent
dynamics oracle for certificates: trajectories stay in the orthant and a
valid V must not increase along them beyond discretization error.

Trajectory CSV format: header "t,x1..xn,eta1..etan[,V]", one row per step,
12-digit scientific notation.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .cone import DEFAULT_ACTIVITY_TOL, project
from .synth import Certificate, ProblemSpec

BLOW_NORM = 1e12
DEFAULT_DT = 1e-3


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (num_steps+1, n)
    multipliers: np.ndarray  # per-step estimates; final row is instantaneous
    dt: float
    truncated: bool = False

    @property
    def n(self) -> int:
        return self.states.shape[1]

    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def state_at(self, t: float) -> np.ndarray:
        k = int(round(t / self.dt))
        if not 0 <= k < len(self.times):
            raise IndexError(f"time {t} outside the simulated range")
        return self.states[k]


def step(x, field, dt: float):
    """One projected Euler step; returns (x_next, eta_estimate)."""
    x = np.asarray(x, dtype=float)
    if dt <= 0:
        raise ValueError("dt must be positive")
    fx = np.array([f.eval(x) for f in field])
    if not np.all(np.isfinite(fx)) or not np.all(np.isfinite(x)):
        raise FloatingPointError("non-finite state or field value")
    x_next = project(x + dt * fx)
    eta = (x_next - x) / dt - fx
    return x_next, eta


def simulate(problem: ProblemSpec, x0, T: float, dt: float = DEFAULT_DT) -> Trajectory:
    """Project the initial point into the orthant and iterate to time T.

    Truncates with a flag when the state norm exceeds 1e12.
    """
    if T <= 0 or dt <= 0:
        raise ValueError("T and dt must be positive")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (problem.n,):
        raise ValueError(f"x0 has shape {x0.shape}, expected ({problem.n},)")
    nsteps = int(round(T / dt))
    exps, coefs = problem.field_arrays()
    states, etas, stop = _kernels.simulate_path(
        exps, coefs, x0, dt, nsteps, BLOW_NORM, DEFAULT_ACTIVITY_TOL
    )
    truncated = stop < nsteps
    states = states[: stop + 1]
    etas = etas[: stop + 1]
    times = np.arange(stop + 1) * dt
    return Trajectory(times=times, states=states, multipliers=etas, dt=dt,
                      truncated=truncated)


@dataclass(frozen=True)
class DecreaseStats:
    values: np.ndarray
    max_forward_diff: float
    violations: int
    tol: float


def evaluate_along(cert: Certificate, traj: Trajectory, slack: float = 10.0
                   ) -> DecreaseStats:
    """V along the trajectory; forward differences above slack*dt are flagged."""
    values = np.array([cert.v_value(x) for x in traj.states])
    if len(values) < 2:
        return DecreaseStats(values, 0.0, 0, slack * traj.dt)
    diffs = np.diff(values) / traj.dt
    tol = slack * traj.dt
    return DecreaseStats(
        values=values,
        max_forward_diff=float(diffs.max()),
        violations=int((diffs > tol).sum()),
        tol=tol,
    )


def write_csv(traj: Trajectory, path, cert: Certificate | None = None):
    """Persist a trajectory; adds a V column when a certificate is given."""
    n = traj.n
    header = ["t"] + [f"x{i+1}" for i in range(n)] + [f"eta{i+1}" for i in range(n)]
    if cert is not None:
        header.append("V")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k in range(len(traj.times)):
            row = [f"{traj.times[k]:.12e}"]
            row += [f"{v:.12e}" for v in traj.states[k]]
            row += [f"{v:.12e}" for v in traj.multipliers[k]]
            if cert is not None:
                row.append(f"{cert.v_value(traj.states[k]):.12e}")
            writer.writerow(row)


def read_csv(path) -> Trajectory:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n = sum(1 for name in header if name.startswith("x"))
        rows = [list(map(float, row)) for row in reader]
    data = np.array(rows)
    times = data[:, 0]
    states = data[:, 1 : 1 + n]
    etas = data[:, 1 + n : 1 + 2 * n]
    dt = float(times[1] - times[0]) if len(times) > 1 else 1.0
    return Trajectory(times=times, states=states, multipliers=etas, dt=dt)
