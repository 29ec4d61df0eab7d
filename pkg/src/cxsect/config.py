"""Run configuration: quadrature levels, truncation degrees, grids, seeds.

A ``RunConfig`` is a plain value object; every report echoes it verbatim so
results are reproducible from the report alone.  Missing fields take the
documented defaults.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

from .errors import InvalidInputError

# product-rule levels per ambient dimension m (sections, reference integrals)
_PRODUCT_LEVELS = {2: 24, 3: 24, 4: 24, 5: 16, 6: 16, 7: 6, 8: 6}
# torus-reduced levels per complex dimension n (polar volumes, radial scans)
_REDUCED_LEVELS = {2: 320, 3: 160, 4: 48}
# expansion truncation per real dimension N
_JMAX = {4: 16, 6: 12, 8: 6}
# direction-grid resolution per complex dimension n
_MODULI_RES = {2: 48, 3: 14, 4: 6}
_PHASE_RES = {2: 16, 3: 4, 4: 4}


def _intkeys(d):
    return {int(k): int(v) for k, v in d.items()}


@dataclass(frozen=True)
class RunConfig:
    product_levels: dict = field(default_factory=lambda: dict(_PRODUCT_LEVELS))
    reduced_levels: dict = field(default_factory=lambda: dict(_REDUCED_LEVELS))
    jmax: dict = field(default_factory=lambda: dict(_JMAX))
    moduli_res: dict = field(default_factory=lambda: dict(_MODULI_RES))
    phase_res: dict = field(default_factory=lambda: dict(_PHASE_RES))
    refine_halvings: int = 3
    seed: int = 20240 + 817
    mc_samples: int = 10_000_000
    tol_multiplier: float = 3.0
    tail_warn: float = 1e-3
    noise_floor: float = 1e-12
    threads: int | None = None
    output_dir: str = "reports"

    def __post_init__(self):
        for name in ("product_levels", "reduced_levels", "jmax", "moduli_res", "phase_res"):
            vals = getattr(self, name)
            if any(v < 1 for v in vals.values()):
                raise InvalidInputError(f"{name} entries must be >= 1")
        if self.refine_halvings < 0:
            raise InvalidInputError("refine_halvings must be >= 0")
        if self.tol_multiplier <= 0:
            raise InvalidInputError("tol_multiplier must be positive")

    # --- accessors ------------------------------------------------------

    def product_level(self, m):
        try:
            return self.product_levels[m]
        except KeyError:
            raise InvalidInputError(f"no product level configured for m={m}") from None

    def reduced_level(self, n):
        try:
            return self.reduced_levels[n]
        except KeyError:
            raise InvalidInputError(f"no reduced level configured for n={n}") from None

    def jmax_for(self, N):
        try:
            return self.jmax[N]
        except KeyError:
            raise InvalidInputError(f"no jmax configured for N={N}") from None

    def replace(self, **kw):
        data = self.to_dict()
        data.update(kw)
        return RunConfig(**data)

    # --- serialization ---------------------------------------------------

    def to_dict(self):
        d = asdict(self)
        return d

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise InvalidInputError("config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise InvalidInputError(f"unknown config fields: {sorted(unknown)}")
        merged = {}
        for key, value in data.items():
            if key in ("product_levels", "reduced_levels", "jmax", "moduli_res", "phase_res"):
                base = dict(getattr(cls(), key))
                base.update(_intkeys(value))
                merged[key] = base
            else:
                merged[key] = value
        return cls(**merged)

    @classmethod
    def from_json(cls, path):
        try:
            with open(path) as fh:
                return cls.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidInputError(f"unreadable config {path}: {exc}") from exc


def default_config() -> RunConfig:
    return RunConfig()
