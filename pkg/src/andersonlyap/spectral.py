"""Spatial covariance families of the driving noise.

Three families are supported, each identified by its spectral measure
``mu`` (the measure the noise covariance transforms to in Fourier
variables):

* ``riesz``      -- covariance |x|^(-alpha) in dimension d, spectral
                    density ``riesz_constant(d, alpha) * |xi|^(alpha-d)``;
* ``fractional`` -- d = 1, spatial fractional-Brownian covariance with
                    Hurst index 1/4 < H < 1/2, spectral density
                    ``c_h(H) * |xi|^(1-2H)``;
* ``white``      -- d = 1 space-time white noise, flat density 1/(2*pi).

Every family carries an effective scaling exponent ``alpha_eff`` (alpha,
2 - 2H and 1 respectively) which is what all downstream scaling laws and
the admissibility check depend on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma

from .errors import ParameterError, SingularPointError

__all__ = [
    "KernelSpec",
    "riesz_constant",
    "c_h",
    "dalang_check",
    "spectral_density",
]


def riesz_constant(d: int, alpha: float) -> float:
    """Normalization of the Riesz spectral density in dimension d.

    Returns ``pi^(-d/2) * 2^(-alpha) * Gamma((d-alpha)/2) / Gamma(alpha/2)``,
    the constant C such that |x|^(-alpha) has spectral density
    C * |xi|^(alpha-d).
    """
    if not (isinstance(d, (int, np.integer)) and d >= 1):
        raise ParameterError(f"d must be a positive integer, got {d!r}")
    if not 0.0 < alpha < d:
        raise ParameterError(f"alpha must lie in (0, d) = (0, {d}), got {alpha}")
    return (
        math.pi ** (-d / 2.0)
        * 2.0 ** (-alpha)
        * _gamma((d - alpha) / 2.0)
        / _gamma(alpha / 2.0)
    )


def c_h(H: float) -> float:
    """Spectral-density constant Gamma(2H+1) * sin(pi*H) / (2*pi) of the
    fractional family, defined for 1/4 < H < 1/2."""
    if not 0.25 < H < 0.5:
        raise ParameterError(f"H must lie in (1/4, 1/2), got {H}")
    return _gamma(2.0 * H + 1.0) * math.sin(math.pi * H) / (2.0 * math.pi)


def dalang_check(alpha_eff: float, beta_l: float = 2.0) -> bool:
    """Admissibility of the noise against the dispersion power.

    True iff integral of mu(dxi) / (1 + |xi|^beta_l) is finite for a
    measure scaling with exponent alpha_eff, which holds iff
    alpha_eff < beta_l.  The classical Laplacian is beta_l = 2.
    """
    if alpha_eff <= 0:
        raise ParameterError(f"alpha_eff must be positive, got {alpha_eff}")
    return alpha_eff < beta_l


@dataclass(frozen=True)
class KernelSpec:
    """One spatial covariance family plus its parameters.

    ``family`` is "riesz", "fractional" or "white"; ``d`` and ``alpha``
    apply to the Riesz family, ``H`` to the fractional one.  The white
    and fractional families are one-dimensional.
    """

    family: str
    d: int = 1
    alpha: float = 0.0
    H: float = 0.0

    def __post_init__(self):
        if self.family == "riesz":
            if not (isinstance(self.d, (int, np.integer)) and self.d >= 1):
                raise ParameterError(f"d must be a positive integer, got {self.d!r}")
            if not 0.0 < self.alpha < self.d:
                raise ParameterError(
                    f"Riesz family needs 0 < alpha < d, got alpha={self.alpha}, d={self.d}"
                )
        elif self.family == "fractional":
            if self.d != 1:
                raise ParameterError("fractional family is one-dimensional")
            if not 0.25 < self.H < 0.5:
                raise ParameterError(f"H must lie in (1/4, 1/2), got {self.H}")
        elif self.family == "white":
            if self.d != 1:
                raise ParameterError("white-noise family is one-dimensional")
        else:
            raise ParameterError(f"unknown kernel family {self.family!r}")

    @property
    def alpha_eff(self) -> float:
        """Scaling exponent of the spectral measure: mu(cA) = c^alpha_eff mu(A)."""
        if self.family == "riesz":
            return self.alpha
        if self.family == "fractional":
            return 2.0 - 2.0 * self.H
        return 1.0

    @property
    def constant(self) -> float:
        """Multiplicative constant of the spectral density."""
        if self.family == "riesz":
            return riesz_constant(self.d, self.alpha)
        if self.family == "fractional":
            return c_h(self.H)
        return 1.0 / (2.0 * math.pi)

    @property
    def density_exponent(self) -> float:
        """Power p in density = constant * |xi|^p (0 for white noise)."""
        if self.family == "riesz":
            return self.alpha - self.d
        if self.family == "fractional":
            return 1.0 - 2.0 * self.H
        return 0.0

    def to_config(self) -> dict:
        """Flat key-value form (the config-file representation)."""
        cfg = {"family": self.family}
        if self.family == "riesz":
            cfg["d"] = self.d
            cfg["alpha"] = self.alpha
        elif self.family == "fractional":
            cfg["H"] = self.H
        return cfg

    @classmethod
    def from_config(cls, cfg: dict) -> "KernelSpec":
        family = cfg.get("family")
        if family == "riesz":
            return cls("riesz", d=int(cfg["d"]), alpha=float(cfg["alpha"]))
        if family == "fractional":
            return cls("fractional", H=float(cfg["H"]))
        if family == "white":
            return cls("white")
        raise ParameterError(f"unknown kernel family {family!r}")


def spectral_density(spec: KernelSpec, xi) -> float:
    """Density of the spectral measure mu at the point xi (scalar |xi| is
    accepted for d = 1; arrays broadcast).

    Raises SingularPointError at xi = 0 for a family whose density blows
    up there (Riesz); callers doing quadrature must integrate around it.
    """
    xi = np.asarray(xi, dtype=float)
    r = np.abs(xi) if xi.ndim == 0 or spec.d == 1 else np.linalg.norm(xi, axis=-1)
    p = spec.density_exponent
    if p < 0 and np.any(r == 0):
        raise SingularPointError(
            f"{spec.family} spectral density is singular at xi = 0"
        )
    if p == 0.0:
        out = spec.constant * np.ones_like(r)
    else:
        out = spec.constant * r ** p
    return float(out) if out.ndim == 0 else out
