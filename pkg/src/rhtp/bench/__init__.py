"""Seeded Monte-Carlo experiments: ensembles, sweeps, presets and the CLI."""
from .config import AlgoSpec, ExperimentConfig
from .instances import generate_instance, near_isometric_instance, simplex_frame
from .presets import PRESETS, preset
from .sweep import CSV_HEADER, SweepRow, TrialResult, aggregate, run_sweep, run_trial, trial_rng

__all__ = [name for name in dir() if not name.startswith("_")]
