"""Dyadic Haar analysis on the multi-parameter torus.

Arrays are C-ordered with one axis per parameter and 2**depth entries per axis. Coefficient
arrays use heap slots: 0 is the mean, 2**level + offset is the Haar function of that interval.
"""

from ._dyadic import (
    bmo_norm,
    config_hash,
    haar_forward,
    haar_inverse,
    iterated_commutator,
    lmo_norm,
    paraproduct_opnorm,
    pi_main,
    product_bmo_norm,
    run_experiment,
)

__all__ = [
    "bmo_norm",
    "config_hash",
    "haar_forward",
    "haar_inverse",
    "iterated_commutator",
    "lmo_norm",
    "paraproduct_opnorm",
    "pi_main",
    "product_bmo_norm",
    "run_experiment",
]
