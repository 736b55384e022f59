"""Excitation kernel families and their piecewise-constant discretization.

A kernel ``g`` is causal (``g(t) = 0`` for ``t < 0``) with L1 mass below one.
Parametric families carry a branching mass ``k`` in (0, 1)::

    exponential  g(t) = k theta exp(-theta t)
    powerlaw     g(t) = k theta c**theta / (c + t)**(1 + theta)
    rayleigh     g(t) = k t / sigma**2 exp(-t**2 / (2 sigma**2))
    constant     g(t) = k on [0, 1)
    tabulated    g(t) = betas[j] on [j delta, (j + 1) delta)

:func:`discretize` turns any of them into a :class:`PiecewiseKernel` by
left-endpoint sampling, ``beta_j = g(j delta)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .exceptions import IncompatibleStep, MassExceedsOne, Unsupported

# relative slack when deciding that a step ratio is an integer
_RATIO_RTOL = 1e-9


def _check_mass(k):
    if not (0.0 < k < 1.0) or not math.isfinite(k):
        raise ValueError(f"branching mass k must lie in (0, 1), got {k!r}")


def _check_positive(name, value):
    if not (value > 0.0) or not math.isfinite(value):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class Exponential:
    k: float
    theta: float

    def __post_init__(self):
        _check_mass(self.k)
        _check_positive("theta", self.theta)


@dataclass(frozen=True)
class PowerLaw:
    k: float
    theta: float
    c: float

    def __post_init__(self):
        _check_mass(self.k)
        _check_positive("theta", self.theta)
        _check_positive("c", self.c)


@dataclass(frozen=True)
class Rayleigh:
    k: float
    sigma: float

    def __post_init__(self):
        _check_mass(self.k)
        _check_positive("sigma", self.sigma)


@dataclass(frozen=True)
class ConstantUnit:
    """Height ``k`` on the unit interval [0, 1)."""

    k: float

    def __post_init__(self):
        _check_mass(self.k)


@dataclass(frozen=True)
class Tabulated:
    """Step kernel with heights ``betas`` on cells of width ``delta``."""

    delta: float
    betas: tuple

    def __post_init__(self):
        _check_positive("delta", self.delta)
        betas = tuple(float(b) for b in self.betas)
        if not all(math.isfinite(b) and b >= 0.0 for b in betas):
            raise ValueError("tabulated betas must be finite and nonnegative")
        object.__setattr__(self, "betas", betas)


KernelSpec = Union[Exponential, PowerLaw, Rayleigh, ConstantUnit, Tabulated]

_FIELDS = {
    "exponential": (Exponential, ("k", "theta")),
    "powerlaw": (PowerLaw, ("k", "theta", "c")),
    "rayleigh": (Rayleigh, ("k", "sigma")),
    "constant": (ConstantUnit, ("k",)),
    "tabulated": (Tabulated, ("delta", "betas")),
}
_TYPE_NAMES = {cls: name for name, (cls, _) in _FIELDS.items()}


@dataclass(frozen=True)
class PiecewiseKernel:
    """Piecewise-constant kernel ``g_delta``, the exact input of the resolvent.

    Attributes
    ----------
    delta : float
        Cell width.
    betas : numpy.ndarray
        Heights on ``[j delta, (j + 1) delta)``, read-only.
    """

    delta: float
    betas: np.ndarray

    def __post_init__(self):
        _check_positive("delta", self.delta)
        betas = np.array(self.betas, dtype=float).ravel()
        if betas.size == 0:
            betas = np.zeros(1)
        if not np.all(np.isfinite(betas)) or np.any(betas < 0.0):
            raise ValueError("betas must be finite and nonnegative")
        betas.setflags(write=False)
        object.__setattr__(self, "betas", betas)
        if self.l1_mass >= 1.0:
            raise MassExceedsOne(
                f"delta * sum(betas) = {self.l1_mass:.6g} >= 1; "
                "the Neumann series diverges")

    @property
    def l1_mass(self) -> float:
        return self.delta * math.fsum(self.betas)

    def __call__(self, t, side="right"):
        return evaluate(self.to_spec(), t, side=side)

    def to_spec(self) -> Tabulated:
        return Tabulated(self.delta, tuple(self.betas))


def evaluate(spec: KernelSpec, t, side="right"):
    """Evaluate the kernel at ``t`` (scalar or array).

    ``side="left"`` returns left limits, which differ from the default
    right-continuous values only at the jumps of the constant and tabulated
    variants. Returns 0 for ``t < 0``.
    """
    ts = np.asarray(t, dtype=float)
    pos = ts >= 0.0 if side == "right" else ts > 0.0
    tt = np.where(ts > 0.0, ts, 0.0)
    if isinstance(spec, Exponential):
        val = spec.k * spec.theta * np.exp(-spec.theta * tt)
    elif isinstance(spec, PowerLaw):
        val = spec.k * spec.theta * spec.c ** spec.theta / (spec.c + tt) ** (1.0 + spec.theta)
    elif isinstance(spec, Rayleigh):
        val = spec.k * tt / spec.sigma ** 2 * np.exp(-tt ** 2 / (2.0 * spec.sigma ** 2))
    elif isinstance(spec, ConstantUnit):
        inside = tt < 1.0 if side == "right" else tt <= 1.0
        val = np.where(inside, spec.k, 0.0)
    elif isinstance(spec, Tabulated):
        val = _tabulated_values(spec, tt, side)
    else:
        raise TypeError(f"unknown kernel spec {spec!r}")
    out = np.where(pos, val, 0.0)
    return float(out) if out.ndim == 0 else out


def _tabulated_values(spec, tt, side):
    x = tt / spec.delta
    near = np.rint(x)
    on_edge = np.abs(x - near) <= _RATIO_RTOL * np.maximum(1.0, near)
    x = np.where(on_edge, near, x)
    if side == "right":
        idx = np.floor(x)
    else:
        idx = np.ceil(x) - 1.0
    betas = np.asarray(spec.betas, dtype=float)
    ok = (idx >= 0) & (idx < betas.size)
    return np.where(ok, betas[np.clip(idx, 0, max(betas.size - 1, 0)).astype(int)], 0.0)


def _integer_ratio(num, den):
    q = num / den
    n = round(q)
    if n >= 1 and abs(q - n) <= _RATIO_RTOL * n:
        return n
    return None


def discretize(spec: KernelSpec, delta: float, horizon: float) -> PiecewiseKernel:
    """Sample ``beta_j = g(j delta)`` for ``j = 0 .. ceil(horizon / delta)``.

    Constant and tabulated inputs are re-binned exactly; a step that would
    cut one of their cells raises :class:`IncompatibleStep`.
    """
    _check_positive("delta", delta)
    _check_positive("horizon", horizon)
    count = math.ceil(horizon / delta - _RATIO_RTOL) + 1
    if isinstance(spec, ConstantUnit):
        q = _integer_ratio(1.0, delta)
        if q is None:
            raise IncompatibleStep(f"delta={delta!r} does not divide the unit interval")
        betas = np.zeros(count)
        betas[:min(q, count)] = spec.k
    elif isinstance(spec, Tabulated):
        q = _integer_ratio(spec.delta, delta)
        if q is None:
            raise IncompatibleStep(
                f"delta={delta!r} does not divide the tabulated step {spec.delta!r}")
        src = np.asarray(spec.betas, dtype=float)
        idx = np.arange(count) // q
        betas = np.where(idx < src.size, src[np.minimum(idx, max(src.size - 1, 0))], 0.0)
    else:
        betas = np.asarray(evaluate(spec, np.arange(count) * delta), dtype=float)
    return PiecewiseKernel(delta, betas)


def derivative_bound(spec: KernelSpec) -> float:
    """Upper bound on ``sup |g'(t)|`` over ``t >= 0``."""
    if isinstance(spec, Exponential):
        return spec.k * spec.theta ** 2
    if isinstance(spec, PowerLaw):
        # |g'| peaks at t = 0; reduces to k theta (1 + theta) when c = 1
        return spec.k * spec.theta * (1.0 + spec.theta) / spec.c ** 2
    if isinstance(spec, Rayleigh):
        return 2.0 * spec.k / spec.sigma ** 2
    raise Unsupported(f"no derivative bound for {type(spec).__name__}")


def sup_discretization_error(spec: KernelSpec, delta: float) -> float:
    """Bound on ``sup |g - g_delta|`` for left-endpoint sampling at step ``delta``."""
    _check_positive("delta", delta)
    if isinstance(spec, Tabulated):
        raise Unsupported("tabulated kernels are already piecewise constant")
    if isinstance(spec, ConstantUnit):
        return 0.0 if _integer_ratio(1.0, delta) is not None else spec.k
    return derivative_bound(spec) * delta


def choose_delta(spec: KernelSpec, target: float, max_halvings: int = 60) -> float:
    """Largest ``2**-m`` (``m >= 0``) whose resolvent error bound meets ``target``.

    The bound is ``sup_discretization_error(spec, delta) / (1 - k)**2``.
    """
    _check_positive("target", target)
    if isinstance(spec, Tabulated):
        raise Unsupported("tabulated kernels have a fixed step")
    scale = 1.0 / (1.0 - spec.k) ** 2
    for m in range(max_halvings + 1):
        delta = 2.0 ** -m
        if sup_discretization_error(spec, delta) * scale <= target:
            return delta
    raise ValueError(f"target {target!r} needs delta below 2**-{max_halvings}")


def l1_mass(spec: KernelSpec) -> float:
    """Total mass of the kernel on [0, inf)."""
    if isinstance(spec, Tabulated):
        return spec.delta * math.fsum(spec.betas)
    return spec.k


def from_dict(doc: dict) -> KernelSpec:
    """Build a spec from its JSON form; unknown or missing fields raise."""
    if not isinstance(doc, dict) or "type" not in doc:
        raise ValueError("kernel document needs a 'type' field")
    try:
        cls, names = _FIELDS[doc["type"]]
    except KeyError:
        raise ValueError(f"unknown kernel type {doc['type']!r}") from None
    extra = set(doc) - set(names) - {"type"}
    if extra:
        raise ValueError(f"unknown fields for {doc['type']}: {sorted(extra)}")
    missing = [n for n in names if n not in doc]
    if missing:
        raise ValueError(f"missing fields for {doc['type']}: {missing}")
    args = {}
    for n in names:
        v = doc[n]
        if n == "betas":
            if not isinstance(v, list):
                raise ValueError("'betas' must be a list of numbers")
            args[n] = tuple(float(b) for b in v)
        else:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ValueError(f"field {n!r} must be a number")
            args[n] = float(v)
    return cls(**args)


def to_dict(spec) -> dict:
    if isinstance(spec, PiecewiseKernel):
        spec = spec.to_spec()
    name = _TYPE_NAMES[type(spec)]
    doc = {"type": name}
    for n in _FIELDS[name][1]:
        v = getattr(spec, n)
        doc[n] = list(v) if n == "betas" else v
    return doc


def load(path) -> KernelSpec:
    with open(path, encoding="utf-8") as fh:
        return from_dict(json.load(fh))


def dump(spec, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_dict(spec), fh)
        fh.write("\n")
