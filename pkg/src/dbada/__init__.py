"""Dynamic pico activation with proportional-fair bandwidth allocation in a two-tier HetNet."""

from .allocation import (Allocation, ConvergenceError, RateParams, ea_allocate,
                         marginal_utility, pfs_allocate, rate)
from .association import AssociationMap, StateVector, associate
from .campaign import run_campaign, write_outputs
from .config import ConfigError, SimulationConfig, default_config, load_config
from .metrics import aggregate, drop_metrics, improvement_table, percentile
from .scenarios import (EnergyModel, ScenarioSpec, StateEvaluation, dbada_optimize,
                        evaluate_state, network_power, run_scenario)
from .topology import (BaseStationParams, LayoutConfig, LinkGainTable, NetworkLayout,
                       UserSet, build_layout, drop_users, link_gains, path_loss_db)
from .traffic import TrafficProfile, UserCounts, default_profile, user_counts

__version__ = "0.1.0"
