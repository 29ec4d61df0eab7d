"""Parametric origin-symmetric convex bodies in R^{2n} invariant under the
simultaneous rotation of all coordinate pairs.

Identification: a point (x_11, x_12, ..., x_n1, x_n2) in R^{2n} is read as
(z_1, ..., z_n) in C^n with z_k = x_k1 + i x_k2.  Every admitted kind depends
on x only through the moduli |z_k| or through rotation-invariant harmonics,
so the invariance holds by construction; ``validate`` certifies it (and
homogeneity and midpoint convexity) by randomized sampling.

Bodies are immutable and hashable; all evaluations are pure and vectorized
over a trailing axis of length 2n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import harmonics
from .errors import ConvexityError, InvalidInputError

_CERTIFY_SEED = 0x5EED_C0DE
_CERTIFY_PAIRS = 100_000
_MIDPOINT_TOL = 1e-10


@dataclass(frozen=True)
class ComplexDim:
    """Complex dimension n with its real dimension N = 2n."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise InvalidInputError("complex dimension must be at least 2")

    @property
    def N(self):
        return 2 * self.n


def complex_structure(x):
    """Multiplication by i on each coordinate pair: (a, b) -> (-b, a); J^2 = -I."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] % 2:
        raise InvalidInputError("complex structure needs an even number of coordinates")
    out = np.empty_like(x)
    out[..., 0::2] = -x[..., 1::2]
    out[..., 1::2] = x[..., 0::2]
    return out


def rotate_pairs(x, theta):
    """Rotate every coordinate pair by the same angle theta."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] % 2:
        raise InvalidInputError("pair rotation needs an even number of coordinates")
    c, s = math.cos(theta), math.sin(theta)
    out = np.empty_like(x)
    out[..., 0::2] = c * x[..., 0::2] - s * x[..., 1::2]
    out[..., 1::2] = s * x[..., 0::2] + c * x[..., 1::2]
    return out


def torus_rotate(x, phases):
    """Rotate coordinate pair k by phases[k] (independent angles)."""
    x = np.asarray(x, dtype=float)
    phases = np.asarray(phases, dtype=float)
    out = np.empty_like(x)
    c, s = np.cos(phases), np.sin(phases)
    out[..., 0::2] = c * x[..., 0::2] - s * x[..., 1::2]
    out[..., 1::2] = s * x[..., 0::2] + c * x[..., 1::2]
    return out


def moduli(x, n):
    """|z_k| for each coordinate pair; shape (..., n)."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(x[..., 0::2] ** 2 + x[..., 1::2] ** 2)


class ConvexBody:
    """Common behavior of the parametric kinds; subclasses provide ``_norm_impl``."""

    dim: ComplexDim

    # --- evaluation -----------------------------------------------------

    def norm(self, x):
        """The norm whose unit ball is this body; 1-homogeneous, vectorized."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim.N:
            raise InvalidInputError(
                f"expected vectors in R^{self.dim.N}, got trailing axis {x.shape[-1]}"
            )
        if not np.all(np.isfinite(x)):
            raise InvalidInputError("norm input must be finite")
        return self._norm_impl(x)

    def radial(self, theta):
        """rho(theta) = 1/||theta|| for unit vectors theta."""
        theta = np.asarray(theta, dtype=float)
        lengths = np.linalg.norm(theta, axis=-1)
        if np.any(lengths == 0):
            raise InvalidInputError("radial function is undefined at the zero vector")
        if np.any(np.abs(lengths - 1.0) > 1e-8):
            raise InvalidInputError("radial expects unit vectors; normalize first")
        return 1.0 / self.norm(theta)

    # --- structure ------------------------------------------------------

    @property
    def is_full_torus_invariant(self):
        """True when the norm depends on the moduli |z_k| only."""
        return True

    @property
    def phase_bandwidth(self):
        """Highest relative-phase frequency in the norm (0 for moduli-only bodies)."""
        return 0

    def scaled(self, factor):
        raise NotImplementedError

    @property
    def label(self):
        raise NotImplementedError

    def spec_dict(self):
        """JSON body-spec form: {"n": ..., "kind": ..., "params": {...}}."""
        raise NotImplementedError

    def __repr__(self):
        return self.label


@dataclass(frozen=True, repr=False)
class EuclideanBall(ConvexBody):
    dim: ComplexDim
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidInputError("radius must be positive")

    def _norm_impl(self, x):
        return np.linalg.norm(x, axis=-1) / self.radius

    def scaled(self, factor):
        return EuclideanBall(self.dim, self.radius * factor)

    @property
    def label(self):
        return f"ball(n={self.dim.n},r={self.radius:g})"

    def spec_dict(self):
        return {"n": self.dim.n, "kind": "euclidean", "params": {"radius": self.radius}}


@dataclass(frozen=True, repr=False)
class ComplexLqBall(ConvexBody):
    """Unit ball of (sum_k |z_k|^q)^{1/q} / scale; q = inf gives the polydisc."""

    dim: ComplexDim
    q: float
    scale: float = 1.0

    def __post_init__(self):
        if not (self.q >= 1.0):
            raise InvalidInputError("exponent q must satisfy q >= 1")
        if not self.scale > 0:
            raise InvalidInputError("scale must be positive")

    def _norm_impl(self, x):
        mods = moduli(x, self.dim.n)
        if math.isinf(self.q):
            return np.max(mods, axis=-1) / self.scale
        return np.sum(mods ** self.q, axis=-1) ** (1.0 / self.q) / self.scale

    def scaled(self, factor):
        return ComplexLqBall(self.dim, self.q, self.scale * factor)

    @property
    def label(self):
        qs = "inf" if math.isinf(self.q) else f"{self.q:g}"
        return f"lq(n={self.dim.n},q={qs},s={self.scale:g})"

    def spec_dict(self):
        return {
            "n": self.dim.n,
            "kind": "lq",
            "params": {"q": "inf" if math.isinf(self.q) else self.q, "scale": self.scale},
        }


@dataclass(frozen=True, repr=False)
class ComplexEllipsoid(ConvexBody):
    """Unit ball of sqrt(sum_k |z_k|^2 / a_k^2)."""

    semiaxes: tuple
    dim: ComplexDim = field(init=False, compare=False)

    def __post_init__(self):
        axes = tuple(float(a) for a in self.semiaxes)
        if len(axes) < 2 or any(a <= 0 for a in axes):
            raise InvalidInputError("need at least two positive semiaxes")
        object.__setattr__(self, "semiaxes", axes)
        object.__setattr__(self, "dim", ComplexDim(len(axes)))

    def _norm_impl(self, x):
        mods2 = x[..., 0::2] ** 2 + x[..., 1::2] ** 2
        inv = np.array([1.0 / a ** 2 for a in self.semiaxes])
        return np.sqrt(mods2 @ inv)

    def scaled(self, factor):
        return ComplexEllipsoid(tuple(a * factor for a in self.semiaxes))

    @property
    def label(self):
        axes = ",".join(f"{a:g}" for a in self.semiaxes)
        return f"ellipsoid({axes})"

    def spec_dict(self):
        return {
            "n": self.dim.n,
            "kind": "ellipsoid",
            "params": {"semiaxes": list(self.semiaxes)},
        }


@dataclass(frozen=True, repr=False)
class PerturbedBall(ConvexBody):
    """Radial function r * (1 + sum_t c_t Y_{j_t, l_t}) with even rotation-invariant
    harmonics; the norm inverts the radial function.

    Terms are (even degree j >= 2, invariant-basis index l, coefficient c).
    Construction certifies positivity of the radial function and midpoint
    convexity on 1e5 sampled pairs unless ``certify=False`` (used to build
    deliberately broken bodies for the validator).
    """

    dim: ComplexDim
    radius: float = 1.0
    terms: tuple = ()
    certify: bool = field(default=True, compare=False)

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidInputError("radius must be positive")
        cleaned = []
        for j, ell, c in self.terms:
            j, ell, c = int(j), int(ell), float(c)
            if j < 2 or j % 2:
                raise InvalidInputError("perturbation degrees must be even and >= 2")
            size = len(harmonics.invariant_harmonic_basis(self.dim.N, j))
            if not 0 <= ell < size:
                raise InvalidInputError(
                    f"invariant harmonic index {ell} out of range for degree {j} (size {size})"
                )
            cleaned.append((j, ell, c))
        object.__setattr__(self, "terms", tuple(cleaned))
        if self.certify:
            self._certify()

    @property
    def is_full_torus_invariant(self):
        return not self.terms

    @property
    def phase_bandwidth(self):
        return max((j for j, _, _ in self.terms), default=0)

    def radial_profile(self, theta):
        """The defining radial function on unit vectors (no norm inversion)."""
        theta = np.atleast_2d(np.asarray(theta, dtype=float))
        vals = np.ones(theta.shape[0])
        for j, ell, c in self.terms:
            basis = harmonics.invariant_harmonic_basis(self.dim.N, j)
            vals = vals + c * basis.evaluate(theta)[:, ell]
        return self.radius * vals

    def _norm_impl(self, x):
        flat = x.reshape(-1, self.dim.N)
        lengths = np.linalg.norm(flat, axis=-1)
        out = np.zeros(flat.shape[0])
        nz = lengths > 0
        if np.any(nz):
            units = flat[nz] / lengths[nz, None]
            out[nz] = lengths[nz] / self.radial_profile(units)
        return out.reshape(x.shape[:-1])

    def _certify(self):
        rng = np.random.Generator(np.random.Philox(key=np.uint64(_CERTIFY_SEED)))
        N = self.dim.N
        probe = rng.normal(size=(4096, N))
        probe /= np.linalg.norm(probe, axis=-1, keepdims=True)
        rho = self.radial_profile(probe)
        if np.min(rho) <= 0:
            raise ConvexityError(
                f"{self.label}: radial function nonpositive (min {np.min(rho):.3g}); "
                "convexity certification failed"
            )
        x = rng.normal(size=(_CERTIFY_PAIRS, N))
        y = rng.normal(size=(_CERTIFY_PAIRS, N))
        viol = self.norm(0.5 * (x + y)) - 0.5 * (self.norm(x) + self.norm(y))
        worst = float(np.max(viol))
        if worst > _MIDPOINT_TOL:
            raise ConvexityError(
                f"{self.label}: midpoint convexity violated by {worst:.3g} "
                f"(tolerance {_MIDPOINT_TOL:g})"
            )

    def scaled(self, factor):
        return PerturbedBall(self.dim, self.radius * factor, self.terms, certify=False)

    @property
    def label(self):
        ts = ";".join(f"{j},{ell},{c:g}" for j, ell, c in self.terms)
        return f"perturbed(n={self.dim.n},r={self.radius:g},[{ts}])"

    def spec_dict(self):
        return {
            "n": self.dim.n,
            "kind": "perturbed",
            "params": {"radius": self.radius, "terms": [list(t) for t in self.terms]},
        }


# --- module-level operations ---------------------------------------------


def norm(body, x):
    return body.norm(x)


def radial(body, theta):
    return body.radial(theta)


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    worst: float
    tolerance: float


@dataclass(frozen=True)
class ValidationReport:
    body: str
    sample_count: int
    seed: int
    checks: dict

    @property
    def passed(self):
        return all(c.passed for c in self.checks.values())

    def failed_checks(self):
        return [name for name, c in self.checks.items() if not c.passed]

    def to_dict(self):
        return {
            "body": self.body,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "passed": self.passed,
            "checks": {
                name: {"passed": c.passed, "worst": c.worst, "tolerance": c.tolerance}
                for name, c in self.checks.items()
            },
        }


def validate(body, sample_count=1000, seed=0) -> ValidationReport:
    """Randomized certification of the structural hypotheses.

    Checks 1-homogeneity, invariance under simultaneous pair rotation,
    midpoint convexity, and radial/norm consistency.  Failures are reported,
    never raised; deterministic for a given seed.
    """
    if sample_count < 1:
        raise InvalidInputError("sample_count must be >= 1")
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    N = body.dim.N
    x = rng.normal(size=(sample_count, N))
    x /= np.linalg.norm(x, axis=-1, keepdims=True)
    base = body.norm(x)

    lam = rng.uniform(0.1, 2.5, size=sample_count) * rng.choice([-1.0, 1.0], size=sample_count)
    hom = np.abs(body.norm(lam[:, None] * x) - np.abs(lam) * base) / (np.abs(lam) * base)
    homog = float(np.max(hom)) if np.all(np.isfinite(hom)) else math.inf

    # rotation check: one random theta per sample
    thetas = rng.uniform(0.0, 2.0 * math.pi, size=sample_count)
    c, s = np.cos(thetas)[:, None], np.sin(thetas)[:, None]
    xr = np.empty_like(x)
    xr[:, 0::2] = c * x[:, 0::2] - s * x[:, 1::2]
    xr[:, 1::2] = s * x[:, 0::2] + c * x[:, 1::2]
    rot = np.abs(body.norm(xr) - base) / base
    worst_rot = float(np.max(rot)) if np.all(np.isfinite(rot)) else math.inf

    y = rng.normal(size=(sample_count, N))
    y /= np.linalg.norm(y, axis=-1, keepdims=True)
    mid = body.norm(0.5 * (x + y)) - 0.5 * (body.norm(x) + body.norm(y))
    bad_norms = (base <= 0) | ~np.isfinite(base)
    worst_mid = math.inf if np.any(bad_norms) or not np.all(np.isfinite(mid)) else float(np.max(mid))

    rad = np.abs(body.radial(x) * base - 1.0) if not np.any(bad_norms) else np.array([math.inf])
    worst_rad = float(np.max(rad))

    checks = {
        "homogeneity": CheckResult(homog <= 1e-12, homog, 1e-12),
        "rotation_invariance": CheckResult(worst_rot <= 1e-12, worst_rot, 1e-12),
        "convexity": CheckResult(worst_mid <= _MIDPOINT_TOL, worst_mid, _MIDPOINT_TOL),
        "radial_norm_consistency": CheckResult(worst_rad <= 1e-13, worst_rad, 1e-13),
    }
    return ValidationReport(body.label, sample_count, int(seed), checks)


# --- JSON schema ----------------------------------------------------------

_KINDS = ("euclidean", "lq", "ellipsoid", "perturbed")


def body_from_dict(spec, certify=True) -> ConvexBody:
    """Build a body from {"n": int, "kind": str, "params": {...}}."""
    if not isinstance(spec, dict):
        raise InvalidInputError("body spec must be a JSON object")
    try:
        n = int(spec["n"])
        kind = spec["kind"]
        params = spec.get("params", {})
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed body spec: {exc}") from exc
    if kind not in _KINDS:
        raise InvalidInputError(f"unknown body kind {kind!r}; expected one of {_KINDS}")
    dim = ComplexDim(n)
    try:
        if kind == "euclidean":
            return EuclideanBall(dim, float(params.get("radius", 1.0)))
        if kind == "lq":
            qraw = params["q"]
            q = math.inf if qraw in ("inf", "infinity") else float(qraw)
            return ComplexLqBall(dim, q, float(params.get("scale", 1.0)))
        if kind == "ellipsoid":
            axes = tuple(float(a) for a in params["semiaxes"])
            if len(axes) != n:
                raise InvalidInputError("semiaxes count must equal n")
            return ComplexEllipsoid(axes)
        terms = tuple((int(j), int(ell), float(c)) for j, ell, c in params.get("terms", ()))
        return PerturbedBall(dim, float(params.get("radius", 1.0)), terms, certify=certify)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise InvalidInputError(f"malformed {kind} params: {exc}") from exc


def body_to_dict(body) -> dict:
    return body.spec_dict()
