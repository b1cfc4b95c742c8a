"""The dispersive Schrodinger operator and manufactured solutions.

The operator is A u = i u_t - (beta/2) u_xx acting on complex fields
over the spacetime strip; beta > 0 is the dispersion coefficient of the
fiber model.  Manufactured cases store the exact field together with
closed-form derivatives, and always define the forcing as f = A u so
the discrete experiments are exactly consistent regardless of whether
the printed solution annihilates the operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["SchrodingerOperator", "ManufacturedCase", "gaussian_case",
           "wavepacket_case", "case_from_derivatives", "apply_operator"]

FD_STEP_FIRST = 1e-6
FD_STEP_SECOND = 1e-4


@dataclass(frozen=True)
class SchrodingerOperator:
    """A u = i u_t - (beta/2) u_xx."""

    beta: float = 2.0

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError(f"dispersion coefficient must be positive, got {self.beta}")

    def combine(self, u_t, u_xx):
        return 1j * np.asarray(u_t) - 0.5 * self.beta * np.asarray(u_xx)


@dataclass(frozen=True)
class ManufacturedCase:
    """Exact solution with analytic derivatives and manufactured forcing.

    All closures are vectorized over numpy arrays and return complex
    values.  Boundary data on the inflow boundary is read off the exact
    field itself.
    """

    name: str
    beta: float
    params: dict
    u: Callable
    u_t: Callable
    u_x: Callable
    u_xx: Callable

    @property
    def operator(self) -> SchrodingerOperator:
        return SchrodingerOperator(self.beta)

    def f(self, x, t):
        """Forcing f = A u from the stored closed-form derivatives."""
        return 1j * self.u_t(x, t) - 0.5 * self.beta * self.u_xx(x, t)

    # inflow data, read from the exact field
    def u0(self, x):
        return self.u(x, np.zeros_like(np.asarray(x, dtype=float)))

    def ul(self, t):
        return self.u(np.zeros_like(np.asarray(t, dtype=float)), t)

    def ur(self, t, L: float = 1.0):
        return self.u(np.full_like(np.asarray(t, dtype=float), L), t)


def case_from_derivatives(name: str, beta: float, u, u_t, u_x, u_xx,
                          params: dict | None = None) -> ManufacturedCase:
    """Wrap user-supplied closures into a manufactured case."""
    return ManufacturedCase(name=name, beta=beta, params=params or {},
                            u=u, u_t=u_t, u_x=u_x, u_xx=u_xx)


def gaussian_case(M: float = 1.5, T0: float = 1.5, beta: float = 2.5) -> ManufacturedCase:
    """Dispersing complex Gaussian u = M T0 / sqrt(T0^2 - i beta t) * exp(-x^2/(T0^2 - i beta t)).

    The complex square root takes its principal branch, which is smooth
    for t >= 0 since Re(T0^2 - i beta t) = T0^2 > 0.
    """
    if T0 <= 0:
        raise ValueError(f"pulse width must be positive, got {T0}")
    if beta <= 0:
        raise ValueError(f"dispersion coefficient must be positive, got {beta}")

    def D(t):
        return T0 * T0 - 1j * beta * np.asarray(t)

    def u(x, t):
        d = D(t)
        return M * T0 / np.sqrt(d) * np.exp(-np.asarray(x) ** 2 / d)

    def u_t(x, t):
        d = D(t)
        x = np.asarray(x)
        return u(x, t) * (-1j * beta) * (x * x / (d * d) - 0.5 / d)

    def u_x(x, t):
        d = D(t)
        return u(x, t) * (-2.0 * np.asarray(x) / d)

    def u_xx(x, t):
        d = D(t)
        x = np.asarray(x)
        return u(x, t) * (4.0 * x * x / (d * d) - 2.0 / d)

    return ManufacturedCase(name="gaussian", beta=beta,
                            params={"M": M, "T0": T0, "beta": beta},
                            u=u, u_t=u_t, u_x=u_x, u_xx=u_xx)


def wavepacket_case(omega: float = 20.0, beta: float = 2.5) -> ManufacturedCase:
    """Wide envelope u = a0 exp(-(x^2 + t^2)/omega^2) with a0 = (2/omega^2)^(1/4)."""
    if omega <= 0:
        raise ValueError(f"wavenumber must be positive, got {omega}")
    a0 = (2.0 / omega**2) ** 0.25
    w2 = omega * omega

    def u(x, t):
        x, t = np.asarray(x), np.asarray(t)
        return (a0 + 0j) * np.exp(-(x * x + t * t) / w2)

    def u_t(x, t):
        return u(x, t) * (-2.0 * np.asarray(t) / w2)

    def u_x(x, t):
        return u(x, t) * (-2.0 * np.asarray(x) / w2)

    def u_xx(x, t):
        x = np.asarray(x)
        return u(x, t) * (4.0 * x * x / (w2 * w2) - 2.0 / w2)

    return ManufacturedCase(name="wavepacket", beta=beta,
                            params={"omega": omega, "a0": a0, "beta": beta},
                            u=u, u_t=u_t, u_x=u_x, u_xx=u_xx)


def apply_operator(op: SchrodingerOperator, u, x, t):
    """Value of A u at scattered points.

    u may be a ManufacturedCase (analytic derivatives) or a plain
    callable u(x, t), in which case central differences supply the
    derivatives (step 1e-6 in t, 1e-4 for the second x difference).
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if isinstance(u, ManufacturedCase):
        return op.combine(u.u_t(x, t), u.u_xx(x, t))
    h1, h2 = FD_STEP_FIRST, FD_STEP_SECOND
    ut = (np.asarray(u(x, t + h1)) - np.asarray(u(x, t - h1))) / (2.0 * h1)
    uxx = (np.asarray(u(x + h2, t)) - 2.0 * np.asarray(u(x, t))
           + np.asarray(u(x - h2, t))) / (h2 * h2)
    return op.combine(ut, uxx)
