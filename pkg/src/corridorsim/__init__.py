"""Monte Carlo simulator of UAV connectivity along urban aerial corridors.

The package synthesizes Manhattan-grid cities, places rooftop base
stations, flies a UAV down a straight corridor, and benchmarks handover
strategies on handover frequency and outage probability.  Every trial is
fully determined by its seed.
"""

from .channel import ChannelParams, LinkSample, is_los, path_loss, rsrp, sample_links
from .city import (
    ENVIRONMENT_PRESETS,
    Building,
    BuiltUpParams,
    CityLayout,
    GbsSite,
    building_dimensions,
    generate_city,
    place_gbs,
)
from .config import RunConfig, parse_config, serialize_config
from .engine import (
    CampaignStats,
    TrialResult,
    aggregate_stats,
    evaluate_variants,
    run_campaign,
    run_trial,
    sweep,
)
from .errors import ConfigError, InsufficientRooftopsError, InvalidParamsError, SchemaError
from .mobility import FlightPlan, build_flight_plan, waypoint_spacing
from .strategies import (
    FuzzyConfig,
    HandoverState,
    SohtConfig,
    StepContext,
    StrategyConfig,
    cash_score,
    fuzzy_hysteresis,
    fuzzy_ttt_ms,
    soht_params,
    strategy_names,
)

__version__ = "0.1.0"

__all__ = [
    "Building",
    "BuiltUpParams",
    "CampaignStats",
    "ChannelParams",
    "CityLayout",
    "ConfigError",
    "ENVIRONMENT_PRESETS",
    "FlightPlan",
    "FuzzyConfig",
    "GbsSite",
    "HandoverState",
    "InsufficientRooftopsError",
    "InvalidParamsError",
    "LinkSample",
    "RunConfig",
    "SchemaError",
    "SohtConfig",
    "StepContext",
    "StrategyConfig",
    "TrialResult",
    "aggregate_stats",
    "build_flight_plan",
    "building_dimensions",
    "cash_score",
    "evaluate_variants",
    "fuzzy_hysteresis",
    "fuzzy_ttt_ms",
    "generate_city",
    "is_los",
    "parse_config",
    "path_loss",
    "place_gbs",
    "rsrp",
    "run_campaign",
    "run_trial",
    "sample_links",
    "serialize_config",
    "soht_params",
    "strategy_names",
    "sweep",
    "waypoint_spacing",
]
