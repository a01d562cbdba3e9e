"""Scalar diagnostics tracked along trajectories, and their CSV serialization."""

from __future__ import annotations

import csv
from dataclasses import dataclass, fields

import numpy as np

from .dynamics import FlockModel, FlockState
from .potentials import wall_distances

# CSV column order; G is the initial energy, repeated on every row so each
# row carries its own bound constants.
FIELDS = (
    "t", "K", "P", "E", "p", "A", "D", "I2", "L", "W",
    "F_max", "F_mean", "x_min_wall", "v_max", "v_min", "G",
)


@dataclass
class DiagnosticsRecord:
    t: float
    K: float
    P: float
    E: float
    p: float
    A: float
    D: float
    I2: float
    L: float
    W: float
    F_max: float
    F_mean: float
    x_min_wall: float
    v_max: float
    v_min: float
    G: float


def initial_energy(m: FlockModel, s: FlockState) -> float:
    """K + P at a state; captured once per run as the constant G."""
    kinetic = float(s.v @ s.v) / (2.0 * s.n)
    potential = float(np.mean(m.potential(s.x)))
    return kinetic + potential


def diagnostics(m: FlockModel, s: FlockState, G: float) -> DiagnosticsRecord:
    x, v, n = s.x, s.v, s.n
    K = float(v @ v) / (2.0 * n)
    P = float(np.mean(m.potential(x)))
    p = float(np.mean(v))
    v_max = float(np.max(v))
    v_min = float(np.min(v))
    A = v_max - v_min
    D = float(np.max(x) - np.min(x))
    gaps = x[:, None] - x[None, :]
    dv = v[:, None] - v[None, :]
    I2 = float((m.kernel.eval(gaps) * dv * dv).sum()) / (2.0 * n * n)
    L = A + m.kernel.primitive(D)
    F = np.atleast_1d(m.force(x))
    W = -float(v @ F)
    return DiagnosticsRecord(
        t=s.t,
        K=K,
        P=P,
        E=K + P,
        p=p,
        A=A,
        D=D,
        I2=I2,
        L=L,
        W=W,
        F_max=float(np.max(np.abs(F))),
        F_mean=float(np.mean(F)),
        x_min_wall=float(np.min(wall_distances(m.geometry, x))),
        v_max=v_max,
        v_min=v_min,
        G=G,
    )


def diagnostics_table(records) -> np.ndarray:
    """Records stacked as a (n_samples, n_fields) array in CSV column order."""
    return np.array([[getattr(r, f) for f in FIELDS] for r in records], dtype=float)


def record_series(records, name: str) -> np.ndarray:
    return np.array([getattr(r, name) for r in records], dtype=float)


def write_diagnostics_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FIELDS)
        for r in records:
            writer.writerow(format(getattr(r, f), ".17g") for f in FIELDS)


def read_diagnostics_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != FIELDS:
            raise ValueError("unexpected diagnostics header")
        return np.array([[float(c) for c in row] for row in reader])


def dissipation_residual(traj) -> np.ndarray:
    """Central-difference dE/dt plus I2 at interior samples.

    The identity dE/dt = -I2 makes this a pure discretization residual; it
    shrinks at second order in the sample spacing.
    """
    if len(traj.records) < 3:
        raise ValueError("need at least 3 samples for a central difference")
    t = np.asarray(traj.sample_times, dtype=float)
    E = record_series(traj.records, "E")
    I2 = record_series(traj.records, "I2")
    dEdt = (E[2:] - E[:-2]) / (t[2:] - t[:-2])
    return dEdt + I2[1:-1]
