"""Reaction kinetics of the three-species tumor-immune interaction model.

State variables (dimensionless densities):
    u  effector cells
    v  tumor cells
    w  IL-2 cytokine

Reaction terms:
    F1 = c*v - mu1*u + p1*u*w/(g1 + w) + s1
    F2 = r2*v*(1 - b*v) - p2*u*v/(g2 + v)
    F3 = p3*u*v/(g3 + v) - mu3*w + s3

Tumor growth is logistic with birth rate r2 and carrying capacity 1/b;
saturating Michaelis-Menten terms couple the species; s1 and s3 are the
constant therapy sources (adoptive effector-cell transfer and cytokine
administration).  This module also carries the mapping between dimensional
and dimensionless parameter sets and the named parameter presets used
throughout the package.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "ModelParams",
    "ScalingSet",
    "preset",
    "preset_names",
    "parse_kv",
    "params_from_file",
    "reaction_rhs",
    "jacobian",
    "nondimensionalize",
    "dimensionalize",
]

# Fields that must be strictly positive; s1/s3 are therapy sources (>= 0)
# and d32 is the cross-diffusion coefficient, which may take either sign.
_POSITIVE_FIELDS = (
    "c", "mu1", "mu3", "p1", "p2", "p3",
    "g1", "g2", "g3", "r2", "b",
    "d11", "d22", "d33", "tau_L",
)
_NONNEGATIVE_FIELDS = ("s1", "s3")


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless kinetic and diffusion coefficients for one scenario."""

    c: float        # tumor antigenicity
    mu1: float      # effector-cell decay rate
    mu3: float      # IL-2 decay rate
    p1: float       # max effector proliferation rate (IL-2 driven)
    p2: float       # max tumor kill rate by effectors
    p3: float       # max IL-2 production rate
    g1: float       # half-saturation for effector proliferation
    g2: float       # half-saturation for tumor kill
    g3: float       # half-saturation for IL-2 production
    r2: float       # tumor birth rate
    b: float        # inverse tumor carrying capacity
    d11: float      # effector self-diffusion
    d22: float      # tumor self-diffusion
    d33: float      # IL-2 self-diffusion
    d32: float      # cross-diffusion of the tumor gradient into the IL-2 balance
    s1: float = 0.0     # adoptive effector-cell source (therapy)
    s3: float = 0.0     # cytokine source (therapy)
    tau_L: float = 1.0  # (Lx/Ly)^2 domain anisotropy factor

    def __post_init__(self):
        for name in _POSITIVE_FIELDS:
            val = getattr(self, name)
            if not np.isfinite(val) or val <= 0.0:
                raise ValueError(f"parameter {name} must be positive and finite, got {val}")
        for name in _NONNEGATIVE_FIELDS:
            val = getattr(self, name)
            if not np.isfinite(val) or val < 0.0:
                raise ValueError(f"parameter {name} must be nonnegative and finite, got {val}")
        if not np.isfinite(self.d32):
            raise ValueError(f"parameter d32 must be finite, got {self.d32}")

    def replace(self, **changes) -> "ModelParams":
        """Copy with the given fields overridden (validation reruns)."""
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    @staticmethod
    def field_names() -> tuple:
        return tuple(f.name for f in dataclasses.fields(ModelParams))


@dataclass(frozen=True)
class ScalingSet:
    """Reference scales used to nondimensionalize the model.

    tau is the time scale, Lx/Ly the domain edge lengths and E0/T0/IL0 the
    reference concentrations of effectors, tumor cells and IL-2.
    """

    tau: float
    Lx: float
    Ly: float
    E0: float
    T0: float
    IL0: float

    def __post_init__(self):
        for f in dataclasses.fields(self):
            val = getattr(self, f.name)
            if not np.isfinite(val) or val <= 0.0:
                raise ValueError(f"scaling {f.name} must be positive and finite, got {val}")


# Classic parameter table for the effector/tumor/IL-2 kinetics, plus the
# diffusion set used in the spatial studies.
_TABLE1 = dict(
    mu1=0.167, p1=0.69167, g1=20.0,
    r2=1.0, g2=0.1,
    p3=27.778, g3=0.001, mu3=55.55556,
    b=1.0,
)
_DIFFUSION = dict(d11=0.001, d22=1.99e-5, d33=0.01, d32=-0.01)
_STUDY = dict(c=0.25, p2=0.5)

_PRESETS = {
    # bare classic table, no therapy
    "kirschner-table1": {**_TABLE1, **_DIFFUSION, **_STUDY, "s1": 0.0, "s3": 0.0},
    # the two case-study scenarios
    "untreated": {**_TABLE1, **_DIFFUSION, **_STUDY, "s1": 0.0, "s3": 0.0},
    "treated": {**_TABLE1, **_DIFFUSION, **_STUDY, "s1": 0.0035, "s3": 0.2},
}


def preset_names() -> tuple:
    return tuple(_PRESETS)


def preset(name: str, **overrides) -> ModelParams:
    """Named parameter preset, with optional per-field overrides."""
    try:
        base = dict(_PRESETS[name])
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; available: {', '.join(_PRESETS)}") from None
    for key in overrides:
        if key not in ModelParams.field_names():
            raise ValueError(f"unknown parameter {key!r}")
    base.update(overrides)
    return ModelParams(**base)


def parse_kv(text: str) -> dict:
    """Parse 'key = value' lines; '#' starts a comment, blank lines ignored."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        if key in out:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def params_from_file(path, base: ModelParams | None = None) -> ModelParams:
    """Load a parameter preset from a key=value file.

    Keys must be ModelParams field names; unknown keys are errors.  When
    `base` is given the file only needs to list the fields it overrides.
    """
    with open(path) as fh:
        raw = parse_kv(fh.read())
    fields = ModelParams.field_names()
    values = {}
    for key, sval in raw.items():
        if key not in fields:
            raise ValueError(f"{path}: unknown parameter {key!r}")
        try:
            values[key] = float(sval)
        except ValueError:
            raise ValueError(f"{path}: parameter {key} has non-numeric value {sval!r}") from None
    if base is not None:
        return base.replace(**values)
    return ModelParams(**values)


def _check_denominators(p: ModelParams, u, v, w):
    # Exact zero checks: a vanishing denominator means the state left the
    # biological domain, which is a hard error rather than something to nudge.
    if np.any(p.g1 + w == 0.0):
        raise DomainError("denominator g1 + w is zero")
    if np.any(p.g2 + v == 0.0):
        raise DomainError("denominator g2 + v is zero")
    if np.any(p.g3 + v == 0.0):
        raise DomainError("denominator g3 + v is zero")


def _rhs_terms(p: ModelParams, u, v, w):
    """Reaction terms; plain arithmetic so scalars and arrays both work."""
    f1 = p.c * v - p.mu1 * u + p.p1 * u * w / (p.g1 + w) + p.s1
    f2 = p.r2 * v * (1.0 - p.b * v) - p.p2 * u * v / (p.g2 + v)
    f3 = p.p3 * u * v / (p.g3 + v) - p.mu3 * w + p.s3
    return f1, f2, f3


def reaction_rhs(p: ModelParams, state) -> np.ndarray:
    """Reaction right-hand side (F1, F2, F3) at the given (u, v, w).

    Accepts any 3-sequence; components may be scalars or equally shaped
    arrays, and the result matches that shape with a leading axis of 3.
    """
    u, v, w = state
    _check_denominators(p, u, v, w)
    f1, f2, f3 = _rhs_terms(p, u, v, w)
    return np.stack(np.broadcast_arrays(np.asarray(f1, dtype=float), f2, f3))


def jacobian(p: ModelParams, state) -> np.ndarray:
    """Analytic Jacobian of the reaction terms at a single state.

    Entry (1, 2) is identically zero: the tumor equation does not involve w.
    """
    u, v, w = (float(x) for x in state)
    _check_denominators(p, u, v, w)
    gw = p.g1 + w
    gv2 = p.g2 + v
    gv3 = p.g3 + v
    return np.array([
        [-p.mu1 + p.p1 * w / gw, p.c, p.p1 * u * p.g1 / gw**2],
        [-p.p2 * v / gv2, p.r2 * (1.0 - 2.0 * p.b * v) - p.p2 * u * p.g2 / gv2**2, 0.0],
        [p.p3 * v / gv3, p.p3 * u * p.g3 / gv3**2, -p.mu3],
    ])


def nondimensionalize(dim_params: ModelParams, scaling: ScalingSet) -> ModelParams:
    """Map dimensional coefficients to the dimensionless set.

    `dim_params` carries the dimensional values in the same container (the
    d11..d32 fields hold the dimensional diffusivities); tau_L of the input
    is ignored and recomputed as (Lx/Ly)^2.
    """
    s = scaling
    d = dim_params
    lx2 = s.Lx**2
    return ModelParams(
        c=s.tau * d.c * s.T0 / s.E0,
        mu1=s.tau * d.mu1,
        mu3=s.tau * d.mu3,
        p1=s.tau * d.p1,
        p2=s.tau * d.p2 * s.E0 / s.T0,
        p3=s.tau * d.p3 * s.E0 / s.IL0,
        g1=d.g1 / s.IL0,
        g2=d.g2 / s.T0,
        g3=d.g3 / s.T0,
        s1=s.tau * d.s1 / s.E0,
        s3=s.tau * d.s3 / s.IL0,
        r2=s.tau * d.r2,
        b=d.b * s.T0,
        d11=s.tau * d.d11 / lx2,
        d22=s.tau * d.d22 / lx2,
        d33=s.tau * d.d33 / lx2,
        d32=s.tau * d.d32 * s.T0 / (lx2 * s.IL0),
        tau_L=(s.Lx / s.Ly) ** 2,
    )


def dimensionalize(p: ModelParams, scaling: ScalingSet) -> ModelParams:
    """Inverse of nondimensionalize; the result carries tau_L = 1."""
    s = scaling
    lx2 = s.Lx**2
    return ModelParams(
        c=p.c * s.E0 / (s.tau * s.T0),
        mu1=p.mu1 / s.tau,
        mu3=p.mu3 / s.tau,
        p1=p.p1 / s.tau,
        p2=p.p2 * s.T0 / (s.tau * s.E0),
        p3=p.p3 * s.IL0 / (s.tau * s.E0),
        g1=p.g1 * s.IL0,
        g2=p.g2 * s.T0,
        g3=p.g3 * s.T0,
        s1=p.s1 * s.E0 / s.tau,
        s3=p.s3 * s.IL0 / s.tau,
        r2=p.r2 / s.tau,
        b=p.b / s.T0,
        d11=p.d11 * lx2 / s.tau,
        d22=p.d22 * lx2 / s.tau,
        d33=p.d33 * lx2 / s.tau,
        d32=p.d32 * lx2 * s.IL0 / (s.tau * s.T0),
        tau_L=1.0,
    )
