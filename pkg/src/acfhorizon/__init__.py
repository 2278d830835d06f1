"""Windowed autocorrelation indicators for linear production models.

Simulate a discrete-time linear system, compute windowed autocorrelation
cells over depth and time, aggregate them into integral indicators and turn
those into planning-horizon recommendations.
"""

from .acf_core import (
    AcfCell,
    DepthSummary,
    DepthTimeMatrix,
    IndicatorDecomposition,
    WindowSpec,
    acf_cells,
    acf_grid,
    acf_row,
    acf_value,
    center_normalize,
    decompose,
    depth_summary,
    depth_time_matrix,
    extract_window,
    relative_to_base,
)
from .digital_copy import ScenarioConfig, build_scenario, paper_scenario, run_scenario
from .dyn_system import (
    NoiseModel,
    ObservationMap,
    SeriesMatrix,
    SystemModel,
    Trajectory,
    leontief_observe,
    leontief_plan,
    observe,
    simulate,
    step,
)
from .errors import *  # noqa: F401,F403
from .horizon import (
    ComponentClass,
    HorizonRecommendation,
    OscillationReport,
    PeakReport,
    classify_components,
    detect_oscillation,
    detect_peaks,
    recommend_horizon,
)

__version__ = "0.1.0"
