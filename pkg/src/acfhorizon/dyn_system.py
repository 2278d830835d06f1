"""Discrete-time linear dynamics ``x(t+1) = A x(t) + B u(t) + xi(t)``.

State, control and noise vectors are plain 1-D float arrays. A trajectory
is a ``T x n`` matrix whose row ``j`` holds the state at time ``t0 + j``.

The two Leontief-form problems live here as well: ``leontief_observe``
evaluates ``(E - A) x`` and ``leontief_plan`` solves ``(E - A) x = y``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .errors import DimensionMismatch, IndexOutOfRange, NonFinite, SingularSystem

NOISE_KINDS = ("none", "gaussian", "fines")

# E - A is treated as singular once its 1-norm condition estimate passes this.
MAX_CONDITION = 1e12


def _vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class SystemModel:
    """Constant structure matrices of the linear system.

    ``A`` (n x n) is the internal structure, ``B`` (n x m) the control
    structure. Both are copied and made read-only on construction.
    """

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionMismatch(f"A must be square, got shape {A.shape}")
        B = np.array(self.B, dtype=float)
        if B.ndim == 1:
            B = B.reshape(-1, 1)
        if B.ndim != 2 or B.shape[0] != A.shape[0]:
            raise DimensionMismatch(f"B must have {A.shape[0]} rows, got shape {B.shape}")
        if not (np.isfinite(A).all() and np.isfinite(B).all()):
            raise NonFinite("system matrices contain non-finite entries")
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True)
class NoiseModel:
    """Disturbance term ``xi(t)``.

    ``gaussian`` draws zero-mean normals with scale ``sigma``; ``fines``
    subtracts ``fine_magnitude`` whenever ``(t + 1) % fine_period == 0``, so
    the impulses show up in the states at times ``fine_period, 2*fine_period,
    ...``. ``components`` restricts the disturbance to the listed state
    indices (``None`` means all of them).

    Gaussian draws are keyed on ``(seed, t)`` and component ``i`` takes the
    ``i``-th draw of that stream, so a value never depends on which other
    times were sampled first.
    """

    kind: str = "none"
    sigma: float = 0.0
    fine_magnitude: float = 0.0
    fine_period: int = 1
    seed: int = 0
    components: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"noise kind must be one of {NOISE_KINDS}, got {self.kind!r}")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if int(self.fine_period) < 1:
            raise ValueError(f"fine_period must be >= 1, got {self.fine_period}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.components is not None:
            object.__setattr__(self, "components", tuple(int(i) for i in self.components))

    def sample(self, t: int, n: int) -> np.ndarray:
        xi = np.zeros(n)
        if self.kind == "none":
            return xi
        mask = np.zeros(n, dtype=bool)
        if self.components is None:
            mask[:] = True
        else:
            for i in self.components:
                if not 0 <= i < n:
                    raise IndexOutOfRange(f"noise component {i} outside state dimension {n}")
                mask[i] = True
        if self.kind == "gaussian":
            if self.sigma > 0:
                rng = np.random.default_rng(np.random.SeedSequence([int(self.seed), int(t)]))
                xi[mask] = self.sigma * rng.standard_normal(n)[mask]
        elif (t + 1) % int(self.fine_period) == 0:
            xi[mask] = -self.fine_magnitude
        return xi


def sample_noise(noise, t: int, n: int) -> np.ndarray:
    """Sum of the disturbances of one or several noise models at time ``t``."""
    if isinstance(noise, NoiseModel):
        return noise.sample(t, n)
    total = np.zeros(n)
    for model in noise:
        total += model.sample(t, n)
    return total


@dataclass(frozen=True)
class ObservationMap:
    """Selects observable state components, in the given order."""

    indices: tuple[int, ...] = ()

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if len(set(idx)) != len(idx):
            raise ValueError(f"observation indices contain duplicates: {idx}")
        object.__setattr__(self, "indices", idx)


@dataclass
class Trajectory:
    """``T x n`` matrix of states; row ``j`` is time ``t0 + j``.

    ``clamp_events`` counts component updates that a lower bound overrode
    during simulation (0 for data read from disk).
    """

    data: np.ndarray
    t0: int = 0
    names: list[str] | None = None
    clamp_events: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim == 1:
            data = data.reshape(-1, 1)
        if data.ndim != 2 or data.shape[0] < 1:
            raise DimensionMismatch(f"trajectory must be a non-empty 2-D matrix, got {data.shape}")
        if not np.isfinite(data).all():
            raise NonFinite("trajectory contains non-finite values")
        self.data = data
        if self.names is None:
            self.names = [f"x{i}" for i in range(data.shape[1])]
        elif len(self.names) != data.shape[1]:
            raise DimensionMismatch(f"{len(self.names)} names for {data.shape[1]} columns")
        else:
            self.names = list(self.names)

    @property
    def T(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.t0, self.t0 + self.T)

    def column(self, i: int) -> np.ndarray:
        return self.data[:, i]


SeriesMatrix = Trajectory


def step(x, model: SystemModel, u, xi) -> np.ndarray:
    """One transition: ``A @ x + B @ u + xi``."""
    x = _vector(x, "x")
    u = _vector(u, "u")
    xi = _vector(xi, "xi")
    if x.size != model.n:
        raise DimensionMismatch(f"state has length {x.size}, model expects {model.n}")
    if u.size != model.m:
        raise DimensionMismatch(f"control has length {u.size}, model expects {model.m}")
    if xi.size != model.n:
        raise DimensionMismatch(f"noise has length {xi.size}, model expects {model.n}")
    return model.A @ x + model.B @ u + xi


def simulate(
    x0,
    model: SystemModel,
    controls,
    noise: NoiseModel | Sequence[NoiseModel] = NoiseModel(),
    T: int | None = None,
    *,
    swaps: Mapping[int, SystemModel] | None = None,
    lower_bounds=None,
    names: Sequence[str] | None = None,
    t0: int = 0,
) -> Trajectory:
    """Iterate ``step`` from ``x0`` for ``T`` rows.

    ``controls`` is a ``(T-1) x m`` array; row ``t`` drives the transition
    from time ``t`` to ``t + 1``. ``swaps`` maps a step index to the model
    used from that step onwards. ``lower_bounds`` (length n, ``-inf`` for
    unbounded components) is enforced after every step and each override is
    counted in ``Trajectory.clamp_events``.
    """
    x0 = _vector(x0, "x0")
    if x0.size != model.n:
        raise DimensionMismatch(f"x0 has length {x0.size}, model expects {model.n}")
    U = np.asarray(controls, dtype=float)
    if T is None:
        T = U.shape[0] + 1 if U.ndim == 2 else 1
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if T == 1 and U.size == 0:
        U = np.zeros((0, model.m))
    if U.ndim != 2 or U.shape[0] != T - 1:
        raise DimensionMismatch(f"expected {T - 1} control rows, got array of shape {U.shape}")
    if U.shape[1] != model.m:
        raise DimensionMismatch(f"controls have {U.shape[1]} columns, model expects {model.m}")

    floor = None
    if lower_bounds is not None:
        floor = _vector(lower_bounds, "lower_bounds")
        if floor.size != model.n:
            raise DimensionMismatch("lower_bounds length differs from state dimension")

    swaps = dict(swaps or {})
    for s, swapped in swaps.items():
        if swapped.n != model.n or swapped.m != model.m:
            raise DimensionMismatch(f"model swapped in at step {s} has different dimensions")

    data = np.empty((T, model.n))
    data[0] = x0
    current = model
    clamps = 0
    for t in range(T - 1):
        current = swaps.get(t, current)
        xi = sample_noise(noise, t, model.n)
        with np.errstate(over="ignore", invalid="ignore"):
            nxt = step(data[t], current, U[t], xi)
        if not np.isfinite(nxt).all():
            raise NonFinite(f"state became non-finite at t={t0 + t + 1}", t=t0 + t + 1)
        if floor is not None:
            below = nxt < floor
            clamps += int(below.sum())
            nxt = np.where(below, floor, nxt)
        data[t + 1] = nxt
    return Trajectory(data, t0=t0, names=list(names) if names is not None else None, clamp_events=clamps)


def observe(traj: Trajectory, obs: ObservationMap) -> Trajectory:
    for i in obs.indices:
        if not 0 <= i < traj.n:
            raise IndexOutOfRange(f"observation index {i} outside {traj.n} state components")
    idx = list(obs.indices)
    return Trajectory(
        traj.data[:, idx].reshape(traj.T, len(idx)),
        t0=traj.t0,
        names=[traj.names[i] for i in idx],
    )


def _leontief_operator(A, v, name: str) -> tuple[np.ndarray, np.ndarray]:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"A must be square, got shape {A.shape}")
    v = _vector(v, name)
    if v.size != A.shape[0]:
        raise DimensionMismatch(f"{name} has length {v.size}, A is {A.shape[0]}x{A.shape[0]}")
    return np.eye(A.shape[0]) - A, v


def leontief_observe(A, x) -> np.ndarray:
    """Net output ``(E - A) x`` for a given state."""
    M, x = _leontief_operator(A, x, "x")
    return M @ x


def leontief_plan(A, y) -> np.ndarray:
    """State ``x`` with ``(E - A) x = y``, via LU with partial pivoting.

    Raises ``SingularSystem`` when ``E - A`` has an exact zero pivot or its
    estimated condition number exceeds ``MAX_CONDITION``.
    """
    M, y = _leontief_operator(A, y, "y")
    if M.size == 0:
        return np.zeros(0)
    anorm = np.linalg.norm(M, 1)
    if anorm == 0.0:
        raise SingularSystem("E - A is the zero matrix")
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
        try:
            lu, piv = scipy.linalg.lu_factor(M, check_finite=True)
        except scipy.linalg.LinAlgWarning as exc:
            raise SingularSystem(f"E - A is singular: {exc}") from None
    if np.any(np.diag(lu) == 0.0):
        raise SingularSystem("E - A has an exact zero pivot")
    rcond, info = lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or rcond * MAX_CONDITION < 1.0:
        raise SingularSystem(f"E - A is numerically rank-deficient (condition estimate {1 / max(rcond, 1e-300):.3g})")

    x = scipy.linalg.lu_solve((lu, piv), y)
    scale = max(1.0, float(np.max(np.abs(y))))
    residual = M @ x - y
    if np.max(np.abs(residual)) > 1e-9 * scale:
        # one round of iterative refinement before giving up
        x = x - scipy.linalg.lu_solve((lu, piv), residual)
        if np.max(np.abs(M @ x - y)) > 1e-9 * scale:
            raise SingularSystem("solution residual exceeds tolerance; E - A is too ill-conditioned")
    return x
