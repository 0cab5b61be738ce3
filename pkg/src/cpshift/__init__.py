"""Exact and Monte Carlo experiments with ergodic CP shift systems."""
from .chain import ChainState, ChainSystem, advance, extend_past, make_rng, sample_forward, sample_state
from .diagnostics import entropy_rate, group_sum_check, phi0, phi_n, rn_derivative_T
from .ergodic import (
    chacon_ornstein_ratio,
    continuous_average,
    discrete_average,
    functional,
    hurewicz_average,
    u_t_power,
)
from .extension import ExtendedState, compatible_intervals, magnify, mu_tilde, theta, theta_inverse
from .padic import GridMeasure, Homothety, PAdicInterval, SelfSimilarMeasure, interval_of_word
from .translation import GroupWord, S_a, T_k, T_map, T_map_inverse, s_k, tau, tau_minus, tau_n

__version__ = "0.1.0"
