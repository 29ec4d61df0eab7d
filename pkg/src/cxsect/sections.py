"""Complex hyperplane sections: subspace bases, section volumes by two
independent routes, total volume by the polar formula, and the normalized
inradius.

The section (2n-2)-volume at a unit direction xi is computed either directly
(polar formula on the subspace sphere, radial function evaluated through an
isometric embedding of S^{2n-3} into the hyperplane) or through the Fourier
route: the transformed norm power at exponent 2n-2, evaluated at xi and
divided by 4 pi (n-1).  Agreement of the two routes is the central
cross-check of the verification suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import grids
from .bodies import complex_structure
from .config import RunConfig, default_config
from .errors import InvalidInputError
from .harmonics import HarmonicExpansion, ft_norm_power
from .spherequad import (
    QuadratureRule,
    integrate_sphere,
    invariant_sphere_rule,
    sphere_rule,
)


@dataclass(frozen=True)
class Direction:
    """A unit vector xi with its image under the complex structure."""

    xi: np.ndarray
    jxi: np.ndarray = field(init=False, compare=False)

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        if xi.ndim != 1 or xi.size % 2:
            raise InvalidInputError("direction must be a vector of even length")
        length = float(np.linalg.norm(xi))
        if not math.isfinite(length) or length == 0.0:
            raise InvalidInputError("direction must be a nonzero finite vector")
        if abs(length - 1.0) > 1e-12:
            raise InvalidInputError("direction must be unit length; use direction() to normalize")
        xi = xi.copy()
        xi.setflags(write=False)
        object.__setattr__(self, "xi", xi)
        jxi = complex_structure(xi)
        jxi.setflags(write=False)
        object.__setattr__(self, "jxi", jxi)

    @property
    def n(self):
        return self.xi.size // 2


def direction(vec) -> Direction:
    """Normalize a vector into a Direction."""
    vec = np.asarray(vec, dtype=float)
    length = float(np.linalg.norm(vec))
    if length == 0.0 or not math.isfinite(length):
        raise InvalidInputError("cannot normalize a zero or non-finite vector")
    return Direction(vec / length)


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of the (2n-2)-dimensional hyperplane orthogonal to
    both xi and J xi.  The span is closed under J (the hyperplane is a
    complex subspace); rows are the basis vectors."""

    direction: Direction
    basis: np.ndarray

    def __post_init__(self):
        self.basis.setflags(write=False)

    def embed(self, points):
        """Map vectors from subspace coordinates R^{2n-2} into R^{2n}."""
        return np.asarray(points, dtype=float) @ self.basis


def hyperplane_basis(xi) -> SubspaceBasis:
    """Deterministic orthonormal basis of the hyperplane at xi.

    Gram-Schmidt of the standard basis vectors against {xi, J xi} in fixed
    order, dropping the two that become dependent.  The projection depends on
    xi only through its complex line, so any phase rotation of xi yields the
    same basis.
    """
    d = xi if isinstance(xi, Direction) else direction(xi)
    N = d.xi.size
    anchors = [d.xi, d.jxi]
    rows = []
    for i in range(N):
        v = np.zeros(N)
        v[i] = 1.0
        for _ in range(2):  # two passes for orthogonality to ~1e-15
            for b in anchors:
                v = v - (v @ b) * b
            for b in rows:
                v = v - (v @ b) * b
        length = float(np.linalg.norm(v))
        if length > 1e-7:
            rows.append(v / length)
        if len(rows) == N - 2:
            break
    if len(rows) != N - 2:
        raise InvalidInputError("failed to complete hyperplane basis")
    return SubspaceBasis(d, np.array(rows))


@dataclass(frozen=True)
class SectionReport:
    body: str
    xi: tuple
    value: float
    method: str
    error: float
    warnings: tuple = ()

    def to_row(self):
        return {
            "body": self.body,
            "xi": list(self.xi),
            "method": self.method,
            "value": self.value,
            "error": self.error,
            "warnings": list(self.warnings),
        }


def _section_rule(n, config, bump=0, scan=False):
    level = config.product_level(2 * n - 2)
    if scan:
        level = max(8, level // 2)
    return sphere_rule(2 * n - 2, level + bump)


def section_volume_direct(body, xi, rule: QuadratureRule | None = None,
                          config: RunConfig | None = None,
                          with_error=True) -> SectionReport:
    """Section volume by the polar formula on the subspace sphere.

    Vol_{2n-2} = (1/(2n-2)) * int_{S^{2n-3}} rho(embed(theta))^{2n-2}.
    The error estimate is the difference against a level+2 rule.
    """
    cfg = config or default_config()
    n = body.dim.n
    d = xi if isinstance(xi, Direction) else direction(xi)
    if d.n != n:
        raise InvalidInputError("direction dimension does not match the body")
    sub = hyperplane_basis(d)
    if rule is None:
        rule = _section_rule(n, cfg)
    if rule.m != 2 * n - 2:
        raise InvalidInputError(f"section rule must live on S^{2 * n - 3}")

    def integrand(r):
        return body.radial(r.nodes @ sub.basis) ** (2 * n - 2)

    value = integrate_sphere(integrand(rule), rule) / (2 * n - 2)
    err = 0.0
    if with_error:
        finer = sphere_rule(rule.m, rule.level + 2)
        v2 = integrate_sphere(integrand(finer), finer) / (2 * n - 2)
        err = abs(v2 - value)
        value = v2
    return SectionReport(body.label, tuple(d.xi), float(value), "direct", float(err))


def section_volume_fourier(body, xi, ft: HarmonicExpansion,
                           config: RunConfig | None = None) -> SectionReport:
    """Section volume from the transformed norm power at exponent 2n-2.

    value = ft(xi) / (4 pi (n-1)); the error estimate is the magnitude of the
    top-two-degree contribution at xi (truncation indicator).  A value more
    negative than the estimate is flagged: section volumes are positive, so
    that signals unreliable truncation.
    """
    n = body.dim.n
    if ft.multiplier_power is None or abs(ft.multiplier_power - (2 * n - 2)) > 1e-12:
        raise InvalidInputError("fourier section needs ft_norm_power at p = 2n-2")
    d = xi if isinstance(xi, Direction) else direction(xi)
    scale = 4.0 * math.pi * (n - 1)
    raw = float(ft.evaluate(d.xi[None, :])[0])
    tail = abs(float(ft.tail_values(d.xi[None, :])[0]))
    value = raw / scale
    err = tail / scale
    warnings = tuple(ft.warnings)
    if value < -err:
        warnings = warnings + (
            f"negative section value {value:.3e} beyond tail estimate {err:.3e}: truncation failure",
        )
    return SectionReport(body.label, tuple(d.xi), value, "fourier", err, warnings)


def section_values(body, dirs, rule: QuadratureRule | None = None,
                   config: RunConfig | None = None, scan=False):
    """Direct section volumes for a batch of unit directions, shape (P,).

    Bases are built per direction; radial evaluations are chunked so large
    direction grids stay within memory.  ``scan=True`` uses a half-level rule,
    cheap enough for extremum scans over large grids (final values at the
    extremizer should be re-evaluated at the full level).
    """
    cfg = config or default_config()
    n = body.dim.n
    if rule is None:
        rule = _section_rule(n, cfg, scan=scan)
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    P = dirs.shape[0]
    out = np.empty(P)
    nodes = rule.nodes
    M = nodes.shape[0]
    power = 2 * n - 2
    chunk = max(1, 4_000_000 // M)
    bases = np.empty((P, 2 * n - 2, 2 * n))
    for i in range(P):
        bases[i] = hyperplane_basis(dirs[i]).basis
    for lo in range(0, P, chunk):
        hi = min(lo + chunk, P)
        pts = np.einsum("mj,pjk->pmk", nodes, bases[lo:hi])
        vals = body.radial(pts.reshape(-1, 2 * n)).reshape(hi - lo, M) ** power
        out[lo:hi] = (vals @ rule.weights) / power
    return out


def _volume_rule(body, config, bump=0):
    n = body.dim.n
    bw = body.phase_bandwidth
    nphase = 2 * n * bw + 1 if bw else 1
    return invariant_sphere_rule(n, config.reduced_level(n) + bump, nphase=nphase)


def volume(body, rule: QuadratureRule | None = None,
           config: RunConfig | None = None) -> float:
    """Total volume by the polar formula Vol = (1/2n) int rho^{2n}.

    With no explicit rule the torus-reduced rule is used (the integrand is
    rotation-invariant for every admitted body); pass a product-rule
    ``sphere_rule(2n, level)`` for the generic reference path.
    """
    cfg = config or default_config()
    n = body.dim.n
    if rule is None:
        rule = _volume_rule(body, cfg)
    if rule.m != 2 * n:
        raise InvalidInputError(f"volume rule must live on S^{2 * n - 1}")
    return integrate_sphere(body.radial(rule.nodes) ** (2 * n), rule) / (2 * n)


def volume_with_error(body, config: RunConfig | None = None):
    """Volume plus a refinement-difference error estimate (reduced rule)."""
    cfg = config or default_config()
    coarse = volume(body, rule=_volume_rule(body, cfg), config=cfg)
    bump = max(8, cfg.reduced_level(body.dim.n) // 8)
    fine = volume(body, rule=_volume_rule(body, cfg, bump=bump), config=cfg)
    return fine, abs(fine - coarse)


def min_radial(body, config: RunConfig | None = None, grid=None):
    """Minimum of the radial function over directions (grid + refinement)."""
    cfg = config or default_config()
    n = body.dim.n
    if grid is None:
        grid = grids.direction_grid(
            n, cfg.moduli_res[n], cfg.phase_res[n],
            with_phases=not body.is_full_torus_invariant,
        )
    _, dir_min, value, _ = grids.refine_extremum(
        lambda X: body.radial(X), grid, mode="min", halvings=cfg.refine_halvings,
    )
    return float(value), dir_min


def inradius_normalized(body, rule: QuadratureRule | None = None, grid=None,
                        config: RunConfig | None = None) -> float:
    """min rho / Vol^{1/2n}; scale-invariant by construction.

    ``rule`` feeds the polar volume, ``grid`` the radial minimum scan; both
    default to the configured choices.
    """
    cfg = config or default_config()
    rmin, _ = min_radial(body, cfg, grid=grid)
    vol = volume(body, rule=rule, config=cfg)
    return rmin / vol ** (1.0 / (2 * body.dim.n))


def fourier_transform_of_body(body, p, config: RunConfig | None = None,
                              jmax=None, invariant_only=None) -> HarmonicExpansion:
    """Convenience wrapper building ft_norm_power with configured defaults."""
    cfg = config or default_config()
    N = body.dim.N
    return ft_norm_power(
        body, p,
        jmax=cfg.jmax_for(N) if jmax is None else jmax,
        invariant_only=invariant_only,
        tail_warn=cfg.tail_warn,
    )
