"""
Integrand registry. Every integrand takes a stratum index and a batch of
draws of shape (k, D) and returns k values; mixture files name one of these.
"""
from typing import Dict

import numpy as np

from mixqmc.exceptions import DomainError
from mixqmc.schemas.mixture import IntegrandHandle

RIVER_LENGTH = 5000.0
RIVER_WIDTH = 300.0


def gaussian_cosine(stratum: int, x: np.ndarray) -> np.ndarray:
    """exp(-x^2) cos(x) of the first coordinate."""
    x1 = x[:, 0]
    return np.exp(-x1 * x1) * np.cos(x1)


def flood_depth(stratum: int, x: np.ndarray) -> np.ndarray:
    """
    Saint-Venant water depth H = (Q / (K_s B sqrt((Z_m - Z_v) / L)))^(3/5)
    for columns (Q, K_s, Z_v, Z_m), with L = 5000 and B = 300.
    """
    q, ks, zv, zm = x[:, 0], x[:, 1], x[:, 2], x[:, 3]
    slope = (zm - zv) / RIVER_LENGTH
    return (q / (ks * RIVER_WIDTH * np.sqrt(slope))) ** 0.6


def coordinate_sum(stratum: int, x: np.ndarray) -> np.ndarray:
    return x.sum(axis=1)


INTEGRANDS: Dict[str, IntegrandHandle] = {
    "gaussian_cosine": IntegrandHandle(name="gaussian_cosine", func=gaussian_cosine),
    "flood_depth": IntegrandHandle(name="flood_depth", func=flood_depth),
    "coordinate_sum": IntegrandHandle(name="coordinate_sum", func=coordinate_sum),
}


def get_integrand(name: str) -> IntegrandHandle:
    try:
        return INTEGRANDS[name]
    except KeyError:
        raise DomainError(f"unknown integrand {name!r}; choose from {sorted(INTEGRANDS)}")
