"""Numerical verification of the stated results: the spherical Parseval
identity, positivity of the transformed norm power at exponent 2, the
stability and separation comparisons, the two-sided corollary, and the
Gamma-function inequality.

Every inequality check carries a tolerance assembled from the propagated
quadrature and truncation error estimates of its inputs (times a
configurable multiplier): the verified statements are exact, so only
numerics can produce a spurious violation, and a violation beyond the
tolerance fails loudly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import grids, sections
from .bodies import validate
from .config import RunConfig, default_config
from .errors import InvalidInputError
from .harmonics import expansion_rule, ft_norm_power
from .spherequad import integrate_sphere, invariant_sphere_rule
from .specfun import log_gamma

_TOL_FLOOR = 1e-12


class VerificationContext:
    """Shared per-run caches: volumes, section grids, transforms, validations."""

    def __init__(self, config: RunConfig | None = None):
        self.config = config or default_config()
        self._volumes = {}
        self._sections = {}
        self._grids = {}
        self._validated = {}
        self._ft = {}
        self._inradius = {}

    def volume(self, body):
        if body not in self._volumes:
            self._volumes[body] = sections.volume_with_error(body, self.config)
        return self._volumes[body]

    def grid(self, n, with_phases):
        key = (n, with_phases)
        if key not in self._grids:
            cfg = self.config
            self._grids[key] = grids.direction_grid(
                n, cfg.moduli_res[n], cfg.phase_res[n], with_phases=with_phases
            )
        return self._grids[key]

    def section_grid_values(self, body, with_phases):
        """Scan-level section values on the shared direction grid."""
        key = (body, with_phases)
        if key not in self._sections:
            grid = self.grid(body.dim.n, with_phases)
            self._sections[key] = sections.section_values(
                body, grid.directions, config=self.config, scan=True
            )
        return self._sections[key]

    def ensure_valid(self, body):
        if body not in self._validated:
            self._validated[body] = validate(body, 1000, self.config.seed)
        report = self._validated[body]
        if not report.passed:
            raise InvalidInputError(
                f"{body.label} failed validation: {', '.join(report.failed_checks())}"
            )

    def ft(self, body, p):
        key = (body, float(p))
        if key not in self._ft:
            cfg = self.config
            self._ft[key] = ft_norm_power(
                body, p, jmax=cfg.jmax_for(body.dim.N), tail_warn=cfg.tail_warn
            )
        return self._ft[key]

    def inradius(self, body):
        if body not in self._inradius:
            rmin, _ = sections.min_radial(body, self.config)
            vol, _ = self.volume(body)
            self._inradius[body] = rmin / vol ** (1.0 / (2 * body.dim.n))
        return self._inradius[body]


def _ctx(context, config):
    return context if context is not None else VerificationContext(config)


def _require_theorem_dim(*bodies):
    for b in bodies:
        if b.dim.n not in (2, 3):
            raise InvalidInputError(
                f"theorem checks require complex dimension 2 or 3, got {b.dim.n}"
            )
    if len({b.dim.n for b in bodies}) != 1:
        raise InvalidInputError("bodies must share a dimension")


# --- section gap -----------------------------------------------------------


@dataclass(frozen=True)
class GapResult:
    """Largest section difference over the refined direction grid.

    ``epsilon`` is the clamped value max(0, refined_max); ``refined_max`` may
    be negative when the first body's sections lie below everywhere.
    """

    epsilon: float
    refined_max: float
    argmax_xi: tuple
    error: float
    grid_points: int
    evaluations: int

    def __float__(self):
        return self.epsilon


def _diff_extremum(K, L, ctx, mode):
    """Extremize section(K) - section(L): scan-level grid + pattern search,
    final value re-evaluated at the full quadrature level."""
    cfg = ctx.config
    with_phases = not (K.is_full_torus_invariant and L.is_full_torus_invariant)
    grid = ctx.grid(K.dim.n, with_phases)
    sK = ctx.section_grid_values(K, with_phases)
    sL = ctx.section_grid_values(L, with_phases)
    diff_grid = sK - sL

    def diff_fn(X):
        return (sections.section_values(K, X, config=cfg, scan=True)
                - sections.section_values(L, X, config=cfg, scan=True))

    sign = 1.0 if mode == "max" else -1.0
    best = int(np.argmax(sign * diff_grid))
    start_p = grid.params[best]
    sub = grids.DirectionGrid(grid.n, start_p[None, :],
                              grid.directions[best][None, :], grid.steps, with_phases)
    _, xi_star, _, evals = grids.refine_extremum(
        diff_fn, sub, mode=mode, halvings=cfg.refine_halvings
    )
    # full-level value and quadrature error at the extremizer
    rK = sections.section_volume_direct(K, sections.direction(xi_star), config=cfg)
    rL = sections.section_volume_direct(L, sections.direction(xi_star), config=cfg)
    value = rK.value - rL.value
    err = rK.error + rL.error
    return value, xi_star, err, grid.size, evals + grid.size


def section_gap(K, L, config: RunConfig | None = None,
                context: VerificationContext | None = None) -> GapResult:
    """Smallest epsilon with section(K, xi) <= section(L, xi) + epsilon on the grid."""
    ctx = _ctx(context, config)
    value, xi_star, err, gpts, evals = _diff_extremum(K, L, ctx, "max")
    return GapResult(max(0.0, value), value, tuple(xi_star), err, gpts, evals)


# --- stability / corollary / separation ------------------------------------


def _volume_power_terms(body, ctx):
    n = body.dim.n
    alpha = (n - 1) / n
    vol, verr = ctx.volume(body)
    value = vol ** alpha
    err = alpha * vol ** (alpha - 1.0) * verr
    return value, err


@dataclass(frozen=True)
class StabilityReport:
    body_k: str
    body_l: str
    n: int
    epsilon: float
    lhs: float
    rhs: float
    margin: float
    tol: float
    passed: bool
    epsilon_error: float
    lhs_error: float
    rhs_error: float
    grid_points: int
    evaluations: int
    warnings: tuple = ()
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "bodies": {"K": self.body_k, "L": self.body_l},
            "n": self.n,
            "epsilon": self.epsilon,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "tol": self.tol,
            "passed": self.passed,
            "errors": {
                "epsilon": self.epsilon_error,
                "lhs": self.lhs_error,
                "rhs": self.rhs_error,
            },
            "grid": {"points": self.grid_points, "evaluations": self.evaluations},
            "warnings": list(self.warnings),
        }
        out.update(self.extra)
        return out


def stability_verify(K, L, config: RunConfig | None = None,
                     context: VerificationContext | None = None,
                     epsilon=None) -> StabilityReport:
    """Volume comparison under an epsilon-relaxed section hypothesis.

    epsilon is the computed section gap (the smallest constant making the
    hypothesis hold on the refined grid), so the check is self-contained:
    Vol(K)^{(n-1)/n} <= Vol(L)^{(n-1)/n} + epsilon  (margin >= -tol).
    A caller-supplied ``epsilon`` runs the hypothesis-driven form instead;
    the conclusion is only guaranteed when that hypothesis actually holds.
    """
    ctx = _ctx(context, config)
    _require_theorem_dim(K, L)
    ctx.ensure_valid(K)
    ctx.ensure_valid(L)
    n = K.dim.n
    if epsilon is None:
        gap = section_gap(K, L, context=ctx)
        eps, eps_err = gap.epsilon, gap.error
        grid_points, evaluations = gap.grid_points, gap.evaluations
        extra = {}
    else:
        if epsilon < 0:
            raise InvalidInputError("epsilon must be nonnegative")
        eps, eps_err = float(epsilon), 0.0
        grid_points = evaluations = 0
        extra = {"epsilon_source": "supplied"}
    lhs, lhs_err = _volume_power_terms(K, ctx)
    rterm, rterm_err = _volume_power_terms(L, ctx)
    rhs = rterm + eps
    rhs_err = rterm_err + eps_err
    margin = rhs - lhs
    tol = ctx.config.tol_multiplier * (lhs_err + rhs_err) \
        + _TOL_FLOOR * max(abs(lhs), abs(rhs), 1.0)
    return StabilityReport(
        K.label, L.label, n, eps, lhs, rhs, margin, tol,
        margin >= -tol, eps_err, lhs_err, rhs_err,
        grid_points, evaluations, extra=extra,
    )


@dataclass(frozen=True)
class Corollary1Report:
    body_k: str
    body_l: str
    n: int
    volume_difference: float
    max_section_difference: float
    margin: float
    tol: float
    passed: bool
    forward: StabilityReport
    reverse: StabilityReport

    def to_dict(self):
        return {
            "bodies": {"K": self.body_k, "L": self.body_l},
            "n": self.n,
            "volume_difference": self.volume_difference,
            "max_section_difference": self.max_section_difference,
            "margin": self.margin,
            "tol": self.tol,
            "passed": self.passed,
            "forward": self.forward.to_dict(),
            "reverse": self.reverse.to_dict(),
        }


def corollary1_verify(K, L, config: RunConfig | None = None,
                      context: VerificationContext | None = None) -> Corollary1Report:
    """Two-sided form: |Vol(K)^a - Vol(L)^a| <= max_xi |section difference| + tol.

    Implemented as the stability check run in both orders; the reported
    margin uses the direct two-sided quantities.
    """
    ctx = _ctx(context, config)
    fwd = stability_verify(K, L, context=ctx)
    rev = stability_verify(L, K, context=ctx)
    lhs_k, err_k = _volume_power_terms(K, ctx)
    lhs_l, err_l = _volume_power_terms(L, ctx)
    vol_diff = abs(lhs_k - lhs_l)
    max_gap = max(fwd.epsilon, rev.epsilon)
    gap_err = max(fwd.epsilon_error, rev.epsilon_error)
    margin = max_gap - vol_diff
    tol = ctx.config.tol_multiplier * (err_k + err_l + gap_err) \
        + _TOL_FLOOR * max(vol_diff, max_gap, 1.0)
    return Corollary1Report(
        K.label, L.label, K.dim.n, vol_diff, max_gap, margin, tol,
        margin >= -tol and fwd.passed and rev.passed, fwd, rev,
    )


@dataclass(frozen=True)
class SeparationReport:
    body_k: str
    body_l: str
    n: int
    epsilon: float
    inradius_sq: float
    lhs: float
    rhs: float
    margin: float
    tol: float
    passed: bool
    degenerate: bool
    note: str
    warnings: tuple = ()

    def to_dict(self):
        return {
            "bodies": {"K": self.body_k, "L": self.body_l},
            "n": self.n,
            "epsilon": self.epsilon,
            "normalized_inradius_sq": self.inradius_sq,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "tol": self.tol,
            "passed": self.passed,
            "degenerate": self.degenerate,
            "note": self.note,
            "warnings": list(self.warnings),
        }


def separation_verify(K, L, config: RunConfig | None = None,
                      context: VerificationContext | None = None,
                      epsilon=None) -> SeparationReport:
    """Strengthened comparison when K's sections sit below L's by a margin.

    epsilon = max(0, min_xi [section(L) - section(K)]); the check is
    Vol(K)^{(n-1)/n} <= Vol(L)^{(n-1)/n} - (pi r(K)^2 / n) epsilon + tol,
    where r(K) is the normalized inradius.  epsilon = 0 degenerates to the
    plain comparison and is labeled as such.  A caller-supplied ``epsilon``
    runs the hypothesis-driven form.
    """
    ctx = _ctx(context, config)
    _require_theorem_dim(K, L)
    ctx.ensure_valid(K)
    ctx.ensure_valid(L)
    n = K.dim.n
    if epsilon is None:
        value, _, gap_err, _, _ = _diff_extremum(L, K, ctx, "min")
    else:
        if epsilon < 0:
            raise InvalidInputError("epsilon must be nonnegative")
        value, gap_err = float(epsilon), 0.0
    degenerate = value <= 0.0
    eps = max(0.0, value)
    note = "hypothesis not satisfied, degenerate check" if degenerate else ""
    if epsilon is not None:
        note = "supplied-epsilon run" + ("; " + note if note else "")
    r2 = ctx.inradius(K) ** 2
    lhs, lhs_err = _volume_power_terms(K, ctx)
    rterm, rterm_err = _volume_power_terms(L, ctx)
    factor = math.pi * r2 / n
    rhs = rterm - factor * eps
    rhs_err = rterm_err + factor * gap_err + 1e-9 * factor * eps  # inradius allowance
    margin = rhs - lhs
    tol = ctx.config.tol_multiplier * (lhs_err + rhs_err) \
        + _TOL_FLOOR * max(abs(lhs), abs(rhs), 1.0)
    return SeparationReport(
        K.label, L.label, n, eps, r2, lhs, rhs, margin, tol,
        margin >= -tol, degenerate, note,
    )


# --- Parseval --------------------------------------------------------------


@dataclass(frozen=True)
class ParsevalResult:
    body_k: str
    body_l: str
    n: int
    p: float
    lhs: float
    rhs: float
    relative_error: float
    jmax: int
    warnings: tuple = ()

    def to_dict(self):
        return {
            "bodies": {"K": self.body_k, "L": self.body_l},
            "n": self.n,
            "p": self.p,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relative_error": self.relative_error,
            "jmax": self.jmax,
            "warnings": list(self.warnings),
        }


def parseval_check(K, L, p, config: RunConfig | None = None,
                   jmax=None) -> ParsevalResult:
    """Spherical pairing identity for the exponent pair (p, 2n-p).

    lhs:  int over S^{2n-1} of ft[||.||_K^{-p}] * ft[||.||_L^{-2n+p}]
    rhs:  (2 pi)^{2n} int over S^{2n-1} of rho_K^p rho_L^{2n-p}
    lhs uses a product rule exact for the degree-2*jmax integrand; rhs uses a
    high-level torus-reduced rule (the integrand is rotation-invariant).
    """
    cfg = config or default_config()
    if K.dim.n != L.dim.n:
        raise InvalidInputError("bodies must share a dimension")
    n = K.dim.n
    N = 2 * n
    if not 0 < p < N:
        raise InvalidInputError(f"parseval exponent must lie in (0, {N})")
    if jmax is None:
        jmax = cfg.jmax_for(N)
    ft_k = ft_norm_power(K, p, jmax=jmax, tail_warn=cfg.tail_warn)
    ft_l = ft_norm_power(L, N - p, jmax=jmax, tail_warn=cfg.tail_warn)
    rule = expansion_rule(N, jmax)
    lhs_vals = ft_k.evaluate(rule.nodes) * ft_l.evaluate(rule.nodes)
    lhs = integrate_sphere(lhs_vals, rule)
    bw = max(K.phase_bandwidth, L.phase_bandwidth)
    reduced = invariant_sphere_rule(n, cfg.reduced_level(n),
                                    nphase=(N * bw + 1) if bw else 1)
    rho = K.radial(reduced.nodes) ** p * L.radial(reduced.nodes) ** (N - p)
    rhs = (2.0 * math.pi) ** N * integrate_sphere(rho, reduced)
    rel = abs(lhs - rhs) / abs(rhs)
    return ParsevalResult(
        K.label, L.label, n, float(p), lhs, rhs, rel, jmax,
        tuple(ft_k.warnings) + tuple(ft_l.warnings),
    )


# --- positivity -------------------------------------------------------------


@dataclass(frozen=True)
class PositivityResult:
    body: str
    n: int
    min_value: float
    max_value: float
    location: tuple
    passed: bool | None
    exploratory: bool
    warnings: tuple = ()

    def to_dict(self):
        return {
            "body": self.body,
            "n": self.n,
            "min_value": self.min_value,
            "max_value": self.max_value,
            "location": list(self.location),
            "passed": self.passed,
            "exploratory": self.exploratory,
            "warnings": list(self.warnings),
        }


def positivity_check(K, config: RunConfig | None = None,
                     context: VerificationContext | None = None) -> PositivityResult:
    """Sign scan of the transformed norm power at exponent 2 over a refined grid.

    Pass criterion (complex dimension 2 or 3): grid minimum >= -1e-6 * grid
    maximum.  Dimension 4 runs in exploratory mode: values are reported, no
    pass/fail is attached.
    """
    ctx = _ctx(context, config)
    n = K.dim.n
    if n not in (2, 3, 4):
        raise InvalidInputError("positivity scan supports complex dimension 2, 3, 4")
    exploratory = n == 4
    ft = ctx.ft(K, 2.0)
    grid = ctx.grid(n, not K.is_full_torus_invariant)
    vals = ft.evaluate(grid.directions)
    vmax = float(np.max(vals))
    best = int(np.argmin(vals))
    sub = grids.DirectionGrid(grid.n, grid.params[best][None, :],
                              grid.directions[best][None, :], grid.steps,
                              grid.with_phases)
    _, xi_star, vmin, _ = grids.refine_extremum(
        lambda X: ft.evaluate(X), sub, mode="min",
        halvings=ctx.config.refine_halvings,
    )
    passed = None if exploratory else bool(vmin >= -1e-6 * vmax)
    return PositivityResult(
        K.label, n, float(vmin), vmax, tuple(xi_star), passed, exploratory,
        tuple(ft.warnings),
    )


# --- Gamma inequality --------------------------------------------------------


@dataclass(frozen=True)
class GammaRow:
    n: int
    lhs: float
    rhs: float
    log_margin: float
    passed: bool


def gamma_lemma_check(n_max=170):
    """Gamma(n)^{1/n} <= n^{(n-1)/n} for n = 1..n_max, through log-gamma.

    Equality at n = 1, strict inequality required for n >= 2.
    """
    if not 1 <= n_max <= 170:
        raise InvalidInputError("n_max must be between 1 and 170")
    rows = []
    for n in range(1, n_max + 1):
        lg = float(log_gamma(n))
        log_margin = (n - 1) * math.log(n) - lg
        lhs = math.exp(lg / n)
        rhs = math.exp((n - 1) * math.log(n) / n)
        passed = abs(log_margin) <= 1e-14 if n == 1 else log_margin > 0.0
        rows.append(GammaRow(n, lhs, rhs, log_margin, passed))
    return rows
