"""Multi-view sparse-representation visual tracker.

The solver core (`solver`, `proxops`) is usable standalone as a small
numerical-optimization library; `pipeline` wires it into a particle
filter over the four feature views of `features`, and `evaluate` scores
runs benchmark-style.
"""

from .evaluate import Box, SuccessCurve, auc, average_overlap, emit_plot, overlap, success_curve
from .features import Frame, FeatureConfig, extract_all_views, intensity_template_size
from .particles import MotionConfig, likelihood, propagate, resample, select_best
from .pipeline import Tracker, TrackerConfig, TrackRecord, track_sequence
from .proxops import (column_group_scatter, column_group_select, nuclear_norm,
                      nuclear_subgradient, project_nonneg, soft_threshold, svd_thin)
from .sequences import RunManifest, SequenceSource, config_io, load_sequence, synth_sequence
from .solver import Problem, SolverConfig, Solution, auto_step, objective, smooth_grad, solve
from .templates import TemplateSet, UpdateConfig, init_templates, maybe_update

__version__ = "0.1.0"
