"""Domino-effect cascades in power-controlled wireless networks."""

import json

from . import _domino
from ._domino import (
    ConfigError,
    DomainError,
    InfeasibleError,
    affected_radius,
    critical_coupling,
    edge_probability,
    existence_density,
    find_divergence_threshold,
    path_loss,
)

__version__ = _domino.__version__


def array_cascade(a1, delta, alpha=3.0, n_max=10000):
    return json.loads(_domino._array_cascade(a1, delta, alpha, n_max))


def percolation_bounds(delta_update=1.0, delta=0.01, beta=1.0, d_ii=10.0, alpha=3.0, n_terms=10000):
    return json.loads(_domino._percolation_bounds(delta_update, delta, beta, d_ii, alpha, n_terms))


def random_network(lam, width, height, d_ii=10.0, alpha=3.0, seed=1):
    return json.loads(_domino._network(lam, width, height, d_ii, alpha, seed))


def min_power(network, backend="auto"):
    return json.loads(_domino._min_power(json.dumps(network), backend))


def run_cascade(network, threshold, p_max=1.0, origin=0):
    return json.loads(_domino._cascade(json.dumps(network), threshold, float(p_max), origin))


def poisson_fit(samples):
    return json.loads(_domino._poisson_fit(list(samples)))


def powerlaw_fit(fractions):
    return json.loads(_domino._powerlaw_fit(list(fractions)))


def parse_config(config):
    return json.loads(_domino._parse_config(json.dumps(config)))


def run_experiment(config):
    return json.loads(_domino._run_experiment(json.dumps(config)))
