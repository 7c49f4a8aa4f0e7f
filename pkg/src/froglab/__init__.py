"""Frog-model epidemic on the complete graph: samplers, exact law, lemma checks."""

from ._backend import BACKEND
from .analysis import BoundCheckReport, ModelConstants, model_constants, solve_q
from .oracle import ExactLaw, exact_law
from .rng import RngStream
from .simulate import ChainState, IdealOutcome, RunOutcome, run_chain, run_ideal, run_level
from .stats import CltReport, EventReport, run_clt_experiment, run_event_experiment

__version__ = "0.1.0"
