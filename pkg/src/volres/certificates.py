"""Perturbation certificates: kernel error to resolvent and solution error.

If ``||g||, ||g_a|| <= k < 1`` (L1 masses) then, in L1 and in sup norm
(also on any window [0, T])::

    ||h - h_a|| <= ||g - g_a|| / (1 - k)**2

and for an input ``f``, ``||h * f - h_a * f|| <= ||f||_1 ||h - h_a||``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from . import kernels
from .exceptions import InvalidMass


class NormKind(enum.Enum):
    L1 = "L1"
    SUP = "SUP"
    SUP_WINDOWED = "SUP_WINDOWED"


@dataclass(frozen=True)
class Certificate:
    norm_kind: NormKind
    kernel_error: float
    k_bound: float
    resolvent_error: float
    window: float | None = None
    solution_error: float | None = None

    def as_dict(self) -> dict:
        return {
            "norm_kind": self.norm_kind.value,
            "window": self.window,
            "kernel_error": self.kernel_error,
            "k_bound": self.k_bound,
            "multiplier": 1.0 / (1.0 - self.k_bound) ** 2,
            "resolvent_error": self.resolvent_error,
            "solution_error": self.solution_error,
        }


def _check_k(k):
    if not (0.0 <= k < 1.0) or not math.isfinite(k):
        raise InvalidMass(f"mass bound must lie in [0, 1), got {k!r}")


def resolvent_certificate(kernel_error: float, k_bound: float,
                          norm_kind: NormKind = NormKind.SUP,
                          window: float | None = None) -> Certificate:
    """Bound ``||h - h_a||`` by ``kernel_error / (1 - k_bound)**2``."""
    _check_k(k_bound)
    if not kernel_error >= 0.0:
        raise ValueError("kernel_error must be nonnegative")
    if norm_kind is NormKind.SUP_WINDOWED and not (window and window > 0.0):
        raise ValueError("windowed sup certificate needs a positive window")
    return Certificate(norm_kind=norm_kind, kernel_error=float(kernel_error),
                       k_bound=float(k_bound),
                       resolvent_error=kernel_error / (1.0 - k_bound) ** 2,
                       window=window)


def solution_certificate(cert: Certificate, f_mass: float,
                         window_T: float | None = None) -> Certificate:
    """Attach ``f_mass * resolvent_error`` as the solution error bound.

    ``f_mass`` is ``||f||_1``, or ``int_0^T |f|`` (plus atom weights) when a
    window is given; the window turns a sup certificate into a windowed one.
    """
    _check_k(cert.k_bound)
    if not f_mass >= 0.0:
        raise ValueError("f_mass must be nonnegative")
    kind, window = cert.norm_kind, cert.window
    if window_T is not None:
        if cert.norm_kind is NormKind.L1:
            raise ValueError("a time window only applies to sup-norm certificates")
        kind, window = NormKind.SUP_WINDOWED, window_T
    return replace(cert, norm_kind=kind, window=window,
                   solution_error=f_mass * cert.resolvent_error)


def sup_norm_h_bound(k: float, g_sup: float) -> float:
    """``sup h <= sup g / (1 - k)``."""
    _check_k(k)
    return g_sup / (1.0 - k)


def kernel_certificate(spec, delta: float, horizon: float, pk=None) -> Certificate:
    """Windowed sup certificate for replacing ``spec`` by its step-``delta`` sampling.

    ``k_bound`` is the larger of the kernel mass and the sampled mass over
    ``[0, horizon]``; pass ``pk`` to reuse an existing discretization.
    """
    if isinstance(spec, kernels.Tabulated):
        kernel_error = 0.0
    else:
        kernel_error = kernels.sup_discretization_error(spec, delta)
    if pk is None:
        pk = kernels.discretize(spec, delta, horizon)
    k_bound = max(kernels.l1_mass(spec), pk.l1_mass)
    return resolvent_certificate(kernel_error, k_bound, NormKind.SUP_WINDOWED, horizon)
