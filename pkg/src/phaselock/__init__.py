"""Detection and characterization of intermittent phase locking via
first-return maps of strobed phase differences."""

from .core import (CircStats, NoPreferredAngleError, PhaseSeries, TWO_PI,
                   circular_mean, unwrap, wrap_angle)
from .analysis import (DesyncHistogram, InsufficientDataError, NoLockingError,
                       PipelineResult, RegionPartition, ReturnMap,
                       StrobedPhases, SyncIndex, TransitionRates,
                       analyze_pipeline, build_return_map, desync_events,
                       desync_histogram, estimate_histogram_from_rates,
                       fit_partition, gamma_index, locking_significance,
                       mean_laminar_empirical, mean_laminar_from_rates,
                       return_map_from_theta, scaling_fit, strobe,
                       transition_rates)

__version__ = "0.1.0"
