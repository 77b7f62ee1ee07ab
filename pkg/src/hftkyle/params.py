"""Market primitives for the two-period anticipatory-trading model.

The model has four independent Gaussian shocks: the asset innovation
v - p0 (variance sigma_v^2), the anticipation noise eps (variance
sigma_eps^2), and the two rounds of noise-trader flow u1, u2 (variances
sigma_1^2, sigma_2^2).  The fast trader pays an inventory penalty
gamma * (x1 + x2)^2.

All solvers work in dimensionless coordinates:

    theta1    = sigma_1^2 / sigma_2^2
    theta_eps = sigma_eps^2 / sigma_2^2
    Gamma     = gamma / (sigma_v / sigma_2)

with price-impact coefficients scaled by sigma_2 / sigma_v and trading
intensities by sigma_v / sigma_2.  ``ModelParams`` stores the
dimensionless triple plus the two scale factors needed to map results
back to price/share units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless model parameters plus the two dimensional scales.

    Args:
        theta1: ratio of first- to second-period noise-trade variance (> 0).
        theta_eps: anticipation-noise variance over second-period noise-trade
            variance (>= 0; 0 means the order is observed perfectly).
        Gamma: normalized inventory-aversion coefficient (>= 0).
        sigma_v: standard deviation of the asset-value innovation (> 0).
        sigma_2: standard deviation of second-period noise trade (> 0).
        p0: prior price (enters only through v - p0; defaults to 0).
    """

    theta1: float
    theta_eps: float
    Gamma: float
    sigma_v: float = 1.0
    sigma_2: float = 1.0
    p0: float = 0.0

    def __post_init__(self):
        if not self.theta1 > 0.0:
            raise ValueError(f"theta1 must be > 0, got {self.theta1}")
        if not self.theta_eps >= 0.0:
            raise ValueError(f"theta_eps must be >= 0, got {self.theta_eps}")
        if not self.Gamma >= 0.0:
            raise ValueError(f"Gamma must be >= 0, got {self.Gamma}")
        if not self.sigma_v > 0.0:
            raise ValueError(f"sigma_v must be > 0, got {self.sigma_v}")
        if not self.sigma_2 > 0.0:
            raise ValueError(f"sigma_2 must be > 0, got {self.sigma_2}")

    # -- dimensional views ------------------------------------------------

    @property
    def sigma_1(self) -> float:
        """Std deviation of first-period noise trade."""
        return math.sqrt(self.theta1) * self.sigma_2

    @property
    def sigma_eps(self) -> float:
        """Std deviation of the anticipation noise."""
        return math.sqrt(self.theta_eps) * self.sigma_2

    @property
    def gamma(self) -> float:
        """Inventory-aversion coefficient in price/share units."""
        return self.Gamma * self.sigma_v / self.sigma_2

    @classmethod
    def from_dimensional(cls, sigma_1, sigma_eps, gamma, sigma_v, sigma_2,
                         p0=0.0) -> "ModelParams":
        """Build params from primitive standard deviations and gamma."""
        if not sigma_1 > 0.0:
            raise ValueError(f"sigma_1 must be > 0, got {sigma_1}")
        if not sigma_eps >= 0.0:
            raise ValueError(f"sigma_eps must be >= 0, got {sigma_eps}")
        if not sigma_v > 0.0:
            raise ValueError(f"sigma_v must be > 0, got {sigma_v}")
        if not sigma_2 > 0.0:
            raise ValueError(f"sigma_2 must be > 0, got {sigma_2}")
        if not gamma >= 0.0:
            raise ValueError(f"gamma must be >= 0, got {gamma}")
        return cls(
            theta1=(sigma_1 / sigma_2) ** 2,
            theta_eps=(sigma_eps / sigma_2) ** 2,
            Gamma=gamma * sigma_2 / sigma_v,
            sigma_v=sigma_v,
            sigma_2=sigma_2,
            p0=p0,
        )
