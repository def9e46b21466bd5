"""Propagation connectivity of random 2/3-uniform hypergraphs."""
from .model import (
    HorizonError,
    InvalidParameters,
    ModelParams,
    Regime,
    classify,
    critical_r,
    k0,
    k1,
    p_of_t,
    threshold_I,
    threshold_I_quadrature,
    threshold_report,
)
from .rng import RngStream, derive_seed, mix64
from .hypergraph import Hypergraph, generate, load, loads, sample, save
from .propagation import (
    Engine,
    Order,
    StartMode,
    census,
    closure,
    explore_paper,
    is_propagation_connected,
    oracle_bruteforce,
)

__version__ = "0.1.0"
