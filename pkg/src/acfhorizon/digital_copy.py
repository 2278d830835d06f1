"""Desk-scale digital copy of a seasonal wood-processing enterprise.

Round wood arrives by barge only during the shipping months and is held in
a raw-material warehouse. A processing line draws a fixed share of the
stock every period and splits it into product lines. Energy, maintenance
and overhead costs are exogenous inputs with their own seasonal calendar
and drift by the external factor every seasonal cycle. A dedicated fines
component receives a negative impulse every ``fine_period`` steps.

Period ``t = 1`` is the first month of the first year, so month
``m(t) = (t - 1) mod P + 1``. ``t = 0`` holds the initial state, which is the
periodic steady state of the pre-doubling, drift-free regime.

Component order for the default twelve parameters::

     0 raw_intake           6 pellet_output
     1 raw_stock            7 semi_finished_stock
     2 processing           8 boiler_energy
     3 floorboard_output    9 maintenance_cost
     4 glued_beam_output   10 overhead_cost
     5 eurolining_output   11 fines_cost

Fewer parameters keep a prefix of this chain (``fines_cost`` is always
last); more parameters add extra product lines fed by processing.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .dyn_system import NoiseModel, SystemModel, Trajectory, leontief_plan, simulate
from .errors import ConfigInvalid

# transfer coefficients of the production chain
STOCK_DRAW = 0.3
PRODUCT_YIELDS = {
    "floorboard_output": 0.35,
    "glued_beam_output": 0.25,
    "eurolining_output": 0.15,
    "pellet_output": 0.10,
}
EXTRA_LINE_YIELD = 0.02
SEMI_RETENTION = 0.6
SEMI_YIELD = 0.10
PELLET_TO_BOILER = 0.05
FINES_RETENTION = 0.3

CHAIN = (
    "raw_intake",
    "raw_stock",
    "processing",
    "floorboard_output",
    "glued_beam_output",
    "eurolining_output",
    "pellet_output",
    "semi_finished_stock",
    "boiler_energy",
    "maintenance_cost",
    "overhead_cost",
)
FINES = "fines_cost"
WAREHOUSES = ("raw_stock", "semi_finished_stock")
PRODUCTION = ("floorboard_output", "glued_beam_output", "eurolining_output", "pellet_output")
COSTS = ("boiler_energy", "maintenance_cost", "overhead_cost")

# control channels: intake, heating, maintenance, overhead
N_CONTROLS = 4


@dataclass(frozen=True)
class ScenarioConfig:
    n_params: int = 12
    T: int = 60
    seasonal_period: int = 12
    shipping_window: tuple[int, ...] = (6, 7, 8, 9)
    doubling_period: int = 25
    external_factor: float = 0.06
    fine_period: int = 3
    fine_magnitude: float = 1.0
    noise_sigma: float = 0.02
    seed: int = 42
    intake_volume: float = 25.0
    cost_level: float = 10.0
    heating_window: tuple[int, ...] = (10, 11, 12, 1, 2)
    heating_surge: float = 0.3
    service_window: tuple[int, ...] = (1,)
    service_surge: float = 0.05
    year_end_window: tuple[int, ...] = (10, 11, 12)
    year_end_surge: float = 0.1

    def __post_init__(self):
        for name in ("shipping_window", "heating_window", "service_window", "year_end_window"):
            object.__setattr__(self, name, tuple(int(m) for m in getattr(self, name)))
        validate_config(self)


def validate_config(cfg: ScenarioConfig) -> None:
    def need(ok, name, message):
        if not ok:
            raise ConfigInvalid(name, message)

    need(int(cfg.n_params) == cfg.n_params and cfg.n_params >= 2, "n_params", "must be an integer >= 2")
    need(int(cfg.T) == cfg.T and cfg.T >= 1, "T", "must be a positive integer")
    need(int(cfg.seasonal_period) == cfg.seasonal_period and cfg.seasonal_period >= 1,
         "seasonal_period", "must be a positive integer")
    need(int(cfg.doubling_period) == cfg.doubling_period and 0 <= cfg.doubling_period < cfg.T,
         "doubling_period", f"must lie in [0, T={cfg.T})")
    need(int(cfg.fine_period) == cfg.fine_period and cfg.fine_period >= 1, "fine_period", "must be >= 1")
    need(cfg.fine_magnitude >= 0, "fine_magnitude", "must be >= 0")
    need(cfg.noise_sigma >= 0, "noise_sigma", "must be >= 0")
    need(cfg.external_factor > -1, "external_factor", "must exceed -1")
    need(cfg.intake_volume >= 0, "intake_volume", "must be >= 0")
    need(cfg.cost_level >= 0, "cost_level", "must be >= 0")
    need(int(cfg.seed) == cfg.seed and 0 <= cfg.seed < 2**64, "seed", "must be a 64-bit unsigned integer")
    for name in ("shipping_window", "heating_window", "service_window", "year_end_window"):
        months = getattr(cfg, name)
        need(all(1 <= m <= cfg.seasonal_period for m in months), name,
             f"months must lie in 1..{cfg.seasonal_period}")
    for name in ("heating_surge", "service_surge", "year_end_surge"):
        need(getattr(cfg, name) > -1, name, "must exceed -1")
    if cfg.T < 2 * cfg.seasonal_period:
        warnings.warn(f"T={cfg.T} covers fewer than two seasonal cycles of {cfg.seasonal_period}", stacklevel=3)


def paper_scenario() -> ScenarioConfig:
    """Five monthly years with the capacity doubling in period 25."""
    return ScenarioConfig(n_params=12, seed=42)


@dataclass
class Scenario:
    config: ScenarioConfig
    model: SystemModel
    controls: np.ndarray
    x0: np.ndarray
    noise: tuple[NoiseModel, ...]
    labels: list[str]
    lower_bounds: np.ndarray = field(repr=False, default=None)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def indices(self, labels) -> list[int]:
        return [i for i, name in enumerate(self.labels) if name in labels]


def component_labels(n_params: int) -> list[str]:
    n_chain = n_params - 1
    labels = list(CHAIN[:n_chain])
    for j in range(n_chain - len(CHAIN)):
        labels.append(f"product_line_{len(CHAIN) + j + 1}")
    labels.append(FINES)
    return labels


def month_of(t: int, period: int) -> int:
    return (t - 1) % period + 1


def _structure(labels: list[str]) -> tuple[np.ndarray, np.ndarray]:
    n = len(labels)
    pos = {name: i for i, name in enumerate(labels)}
    A = np.zeros((n, n))
    B = np.zeros((n, N_CONTROLS))

    def link(dst, src, coef):
        if dst in pos and src in pos:
            A[pos[dst], pos[src]] = coef

    if "raw_intake" in pos:
        B[pos["raw_intake"], 0] = 1.0
    if "raw_stock" in pos:
        A[pos["raw_stock"], pos["raw_stock"]] = 1.0 - STOCK_DRAW
    link("raw_stock", "raw_intake", 1.0)
    link("processing", "raw_stock", STOCK_DRAW)
    for name, y in PRODUCT_YIELDS.items():
        link(name, "processing", y)
    for name in labels:
        if name.startswith("product_line_"):
            link(name, "processing", EXTRA_LINE_YIELD)
    if "semi_finished_stock" in pos:
        A[pos["semi_finished_stock"], pos["semi_finished_stock"]] = SEMI_RETENTION
    link("semi_finished_stock", "processing", SEMI_YIELD)
    link("boiler_energy", "pellet_output", PELLET_TO_BOILER)
    for channel, name in enumerate(COSTS, start=1):
        if name in pos:
            B[pos[name], channel] = 1.0
    A[pos[FINES], pos[FINES]] = FINES_RETENTION
    return A, B


def _control(cfg: ScenarioConfig, s: int, *, drift: bool = True, doubled: bool = True) -> np.ndarray:
    """Control vector that produces the state at time ``s``."""
    P = cfg.seasonal_period
    m = month_of(s, P)
    u = np.zeros(N_CONTROLS)
    scale = 2.0 if (doubled and s >= cfg.doubling_period) else 1.0
    if m in cfg.shipping_window:
        u[0] = cfg.intake_volume * scale
    g = (1.0 + cfg.external_factor) ** (s / P) if drift else 1.0
    u[1] = cfg.cost_level * g * (1.0 + cfg.heating_surge * (m in cfg.heating_window))
    u[2] = cfg.cost_level * g * (1.0 + cfg.service_surge * (m in cfg.service_window))
    u[3] = cfg.cost_level * g * (1.0 + cfg.year_end_surge * (m in cfg.year_end_window))
    return u


def _steady_state(cfg: ScenarioConfig, model: SystemModel) -> np.ndarray:
    """Initial state that repeats after one seasonal cycle of base controls.

    Solves ``(E - A^P) x0 = sum_j A^(P-1-j) B u_j`` for the drift-free,
    pre-doubling controls of steps ``j = 0..P-1``.
    """
    P = cfg.seasonal_period
    A, B = model.A, model.B
    forced = np.zeros(model.n)
    for j in range(P):
        forced = A @ forced + B @ _control(cfg, j + 1, drift=False, doubled=False)
    return leontief_plan(np.linalg.matrix_power(A, P), forced)


def build_scenario(config: ScenarioConfig) -> Scenario:
    validate_config(config)
    labels = component_labels(config.n_params)
    A, B = _structure(labels)
    model = SystemModel(A, B)
    controls = np.array([_control(config, t + 1) for t in range(config.T - 1)]).reshape(config.T - 1, N_CONTROLS)
    x0 = _steady_state(config, model)

    fines_idx = labels.index(FINES)
    noise = (
        NoiseModel("gaussian", sigma=config.noise_sigma, seed=config.seed),
        NoiseModel("fines", fine_magnitude=config.fine_magnitude, fine_period=config.fine_period,
                   seed=config.seed, components=(fines_idx,)),
    )
    floor = np.full(len(labels), -np.inf)
    for name in WAREHOUSES:
        if name in labels:
            floor[labels.index(name)] = 0.0
    return Scenario(config=config, model=model, controls=controls, x0=x0, noise=noise,
                    labels=labels, lower_bounds=floor)


def run_scenario(scenario: Scenario) -> Trajectory:
    """Simulate the scenario; warehouse components are clamped at zero."""
    traj = simulate(
        scenario.x0,
        scenario.model,
        scenario.controls,
        scenario.noise,
        scenario.config.T,
        lower_bounds=scenario.lower_bounds,
        names=scenario.labels,
    )
    traj.meta["clamp_events"] = traj.clamp_events
    return traj


def config_fields() -> list[str]:
    return [f.name for f in fields(ScenarioConfig)]


def with_overrides(config: ScenarioConfig, **overrides) -> ScenarioConfig:
    return replace(config, **overrides)
