"""Exact resolvent kernels of piecewise-constant Volterra kernels.

Typical use::

    from volres import kernels, resolvent, solver

    spec = kernels.PowerLaw(k=0.5, theta=1.0, c=1.0)
    pk = kernels.discretize(spec, delta=2**-7, horizon=5.0)
    h = resolvent.build(pk, horizon=5.0, tol=1e-10)
    h(1.5)
"""
from . import certificates, coefficients, gamma, kernels, oracle, resolvent, solver
from .exceptions import (GridMismatch, IncompatibleStep, InvalidMass, MassExceedsOne,
                         OutOfHorizon, TolUnreachable, Unsupported, VolresError)

__version__ = "0.1.0"

__all__ = [
    "certificates", "coefficients", "gamma", "kernels", "oracle", "resolvent", "solver",
    "GridMismatch", "IncompatibleStep", "InvalidMass", "MassExceedsOne", "OutOfHorizon",
    "TolUnreachable", "Unsupported", "VolresError",
]
