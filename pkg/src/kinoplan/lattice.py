"""Constant-control motion primitives and the state lattice they induce.

Applying a constant control u for a fixed duration tau maps a lattice state
to another lattice state: each derivative of order i moves on a grid with
spacing d_u * tau**(n-i) / (n-i)!. Keys are computed by rounding relative to
the search start state, which keeps the bookkeeping exact even though states
are stored as floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .lti import State, Vec3
from .polyalg import Poly1

# Orders the lattice search supports; pure velocity control stays in lti.
SEARCH_ORDERS = (2, 3)

LatticeKey = tuple[tuple[int, int, int], ...]


class InvalidDimsError(ValueError):
    """Control-set dimensionality must be 2 or 3."""


@dataclass(frozen=True)
class ControlSet:
    """All (2*mu + 1)**dims constant controls on the axis-aligned grid."""

    u_max: float
    mu: int
    dims: int
    d_u: float
    controls: tuple[Vec3, ...]


def make_control_set(u_max: float, mu: int, dims: int = 3) -> ControlSet:
    """Uniform control grid with step u_max / mu per axis.

    dims = 2 keeps the third component at zero for planar problems. The
    ordering is deterministic: x varies slowest, z fastest, each axis from
    -u_max to +u_max. The zero control is always a member.
    """
    if dims not in (2, 3):
        raise InvalidDimsError(f"dims must be 2 or 3, got {dims}")
    if mu < 1:
        raise InvalidDimsError("mu must be at least 1")
    if not u_max > 0.0:
        raise InvalidDimsError("u_max must be positive")
    d_u = u_max / mu
    steps = [k * d_u for k in range(-mu, mu + 1)]
    z_steps = steps if dims == 3 else [0.0]
    controls = tuple((ux, uy, uz)
                     for ux in steps for uy in steps for uz in z_steps)
    return ControlSet(u_max, mu, dims, d_u, controls)


class MotionPrimitive(NamedTuple):
    """One lattice edge: constant control u held for duration tau."""

    x0: State
    u: Vec3
    tau: float
    axis_polys: tuple[Poly1, Poly1, Poly1]
    cost: float

    def state_at(self, t: float) -> State:
        n = self.x0.order
        derivs = []
        for i in range(n):
            row = []
            for ax in range(3):
                val = self.u[ax] * t ** (n - i) / math.factorial(n - i)
                for j in range(i, n):
                    val += self.x0.derivs[j][ax] * t ** (j - i) / math.factorial(j - i)
                row.append(val)
            derivs.append(tuple(row))
        return State(tuple(derivs))

    def end_state(self) -> State:
        return self.state_at(self.tau)


def propagate(x0: State, u, tau: float, rho: float) -> MotionPrimitive:
    """Build the primitive that applies constant control u to x0 for tau.

    The position polynomial per axis is the Taylor expansion of the chain of
    integrators, degree n; the edge cost is (|u|^2 + rho) * tau.
    """
    n = x0.order
    if n not in SEARCH_ORDERS:
        raise ValueError(f"lattice propagation needs order in {SEARCH_ORDERS}")
    if not tau > 0.0:
        raise ValueError("tau must be positive")
    if rho < 0.0:
        raise ValueError("rho must be nonnegative")
    ux, uy, uz = float(u[0]), float(u[1]), float(u[2])
    uu = (ux, uy, uz)
    inv_nf = 1.0 / math.factorial(n)
    polys = []
    for ax in range(3):
        coeffs = [x0.derivs[j][ax] / math.factorial(j) for j in range(n)]
        coeffs.append(uu[ax] * inv_nf)
        polys.append(Poly1(tuple(coeffs)))
    cost = (ux * ux + uy * uy + uz * uz + rho) * tau
    return MotionPrimitive(x0, uu, tau, (polys[0], polys[1], polys[2]), cost)


def lattice_resolutions(n: int, d_u: float, tau: float) -> tuple[float, ...]:
    """Grid spacing per derivative order, position first."""
    return tuple(d_u * tau ** (n - i) / math.factorial(n - i) for i in range(n))


def lattice_key(s: State, d_u: float, tau: float, origin: State) -> LatticeKey:
    """Integer lattice coordinates of s relative to the search origin."""
    n = s.order
    key = []
    for i in range(n):
        res = d_u * tau ** (n - i) / math.factorial(n - i)
        si = s.derivs[i]
        oi = origin.derivs[i]
        key.append((round((si[0] - oi[0]) / res),
                    round((si[1] - oi[1]) / res),
                    round((si[2] - oi[2]) / res)))
    return tuple(key)
