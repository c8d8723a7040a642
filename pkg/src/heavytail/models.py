"""Model families: linear autoregression, stochastic recurrence (Kesten),
GARCH(1,1); their path simulators, spectral-tail-process samplers,
moment-equation tail indices, and drift-condition diagnostics.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.signal import lfilter
from scipy.special import roots_hermite

from .errors import (DivergenceError, NoRootError, ParameterError,
                     UnsupportedLawError)
from . import randkit
from .randkit import RngStream, TailLaw, derive_stream, sample_law

# child-stream tags: keep tail-process angle, radius and pilot draws on
# separate streams so the radius is independent of the angles by construction
_ANGLE_CHILD = 0x7A17
_RADIUS_CHILD = 0x7A18
_PILOT_STREAM_ID = 0x7A19
_FIXED_MC_SEED = 0x5EED0FF1CE

_BLOWUP = 1e280
_SERIES_TERMS = 400  # geometric coefficient sums, converged for rho < 1

_POSITIVE_FAMILIES = (randkit.PARETO, randkit.LOGNORMAL)
_SYMMETRIC_FAMILIES = (randkit.SYMMETRIC_PARETO, randkit.GAUSSIAN)


# ---------------------------------------------------------------------------
# model specifications


@dataclass(eq=False)
class Var1Spec:
    """Linear recursion X_t = A X_{t-1} + Z_t with a fixed coefficient
    matrix, or a matrix drawn once per path from ``a_sampler`` (a mixture of
    fixed-coefficient chains, keeping the closed-form index well defined).

    ``innovation`` applies per coordinate, scaled by ``weights``.
    """

    dim: int
    innovation: TailLaw
    a_matrix: np.ndarray | float | None = None
    a_sampler: object = None
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ParameterError("dim must be at least 1")
        if (self.a_matrix is None) == (self.a_sampler is None):
            raise ParameterError(
                "exactly one of a_matrix / a_sampler is required")
        if self.a_matrix is not None:
            a = np.atleast_2d(np.asarray(self.a_matrix, dtype=float))
            if a.shape != (self.dim, self.dim):
                raise ParameterError(
                    f"a_matrix must be {self.dim}x{self.dim}")
            self.a_matrix = a
            if _spectral_radius(a) >= 1.0:
                raise ParameterError(
                    "spectral radius of a_matrix must be below 1")
        else:
            check = derive_stream(_FIXED_MC_SEED, 0x1A)
            for _ in range(32):
                a = np.atleast_2d(np.asarray(self.a_sampler(check),
                                             dtype=float))
                if _spectral_radius(a) >= 1.0:
                    raise ParameterError(
                        "a_sampler produced a matrix with spectral "
                        "radius >= 1")
        if self.weights is None:
            self.weights = np.ones(self.dim)
        else:
            self.weights = np.asarray(self.weights, dtype=float)
            if self.weights.shape != (self.dim,):
                raise ParameterError("weights must have length dim")
            if np.any(self.weights <= 0):
                raise ParameterError("weights must be positive")
        self._angular_cache = {}

    def draw_matrix(self, stream: RngStream) -> np.ndarray:
        if self.a_matrix is not None:
            return self.a_matrix
        return np.atleast_2d(np.asarray(self.a_sampler(stream), dtype=float))


@dataclass(eq=False)
class KestenSpec:
    """Stochastic recurrence X_t = A_t X_{t-1} + B_t.

    Scalar case: ``a_law`` / ``b_law`` are univariate laws (A > 0 required
    for the moment equation). For dim > 1 supply samplers:
    ``a_sampler(stream, size) -> (size, d, d)``,
    ``b_sampler(stream, size) -> (size, d)``.
    """

    dim: int
    a_law: TailLaw | None = None
    b_law: TailLaw | None = None
    a_sampler: object = None
    b_sampler: object = None
    alpha_hint: float | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ParameterError("dim must be at least 1")
        if self.dim == 1:
            if self.a_law is None or self.b_law is None:
                raise ParameterError("scalar recursion needs a_law and b_law")
        else:
            if self.a_sampler is None or self.b_sampler is None:
                raise ParameterError(
                    "dim > 1 recursion needs a_sampler and b_sampler")
        if _lyapunov_exponent(self) >= 0.0:
            raise ParameterError(
                "multiplier law must have negative log-mean "
                "(contraction on average)")
        self._angular_cache = {}

    def draw_multipliers(self, stream: RngStream, size: int) -> np.ndarray:
        if self.dim == 1:
            return sample_law(stream, self.a_law, size)
        return np.asarray(self.a_sampler(stream, size), dtype=float)

    def draw_additives(self, stream: RngStream, size: int) -> np.ndarray:
        if self.dim == 1:
            return sample_law(stream, self.b_law, size)
        return np.asarray(self.b_sampler(stream, size), dtype=float)


@dataclass(eq=False)
class Garch11Spec:
    """Volatility recursion sigma_t^2 = alpha0 + sigma_{t-1}^2
    (alpha1 Z_{t-1}^2 + beta1), observable X_t = sigma_t Z_t.

    ``z_law`` must be standard Gaussian (mean 0, variance 1); other
    innovation laws are not supported by the moment-equation and
    tail-process machinery here.
    """

    alpha0: float
    alpha1: float
    beta1: float
    z_law: TailLaw = field(
        default_factory=lambda: TailLaw(randkit.GAUSSIAN))

    def __post_init__(self):
        for name in ("alpha0", "alpha1", "beta1"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")
        if self.z_law.family != randkit.GAUSSIAN or self.z_law.scale != 1.0:
            raise UnsupportedLawError(
                "z_law must be standard Gaussian (mean 0, variance 1)")
        if _garch_log_moment(self.alpha1, self.beta1) >= 0.0:
            raise ParameterError(
                "E log(alpha1 Z^2 + beta1) must be negative (stationarity)")
        self._tilt_cache = {}


@dataclass
class PathMatrix:
    """A simulated stationary-regime path: n rows, one column per
    coordinate of the observable."""

    values: np.ndarray
    burn_in_used: int
    stream_id: int

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.values.size and not np.all(np.isfinite(self.values)):
            raise ParameterError("path contains non-finite entries")


@dataclass
class TailProcessPath:
    """One realization (Theta_0, ..., Theta_T) of the spectral tail
    process, with the independent unit-scale Pareto radius |Y_0|."""

    theta: np.ndarray
    pareto_radius: float

    def __post_init__(self):
        self.theta = np.atleast_2d(np.asarray(self.theta, dtype=float))
        norm0 = float(np.linalg.norm(self.theta[0]))
        if abs(norm0 - 1.0) > 1e-9:
            raise ParameterError("Theta_0 must have unit norm")
        if self.pareto_radius < 1.0:
            raise ParameterError("pareto_radius must be at least 1")


@dataclass
class DriftReport:
    """Fitted one-step (or m-step) drift inequality
    E(V(next) | state) <= beta V(state) + b with V = |.|^p."""

    p: float
    m: int
    beta_hat: float
    beta_se: float
    intercept: float
    passed: bool
    grid_v: np.ndarray
    response_v: np.ndarray

    def horizon_for(self, tol: float = 1e-4, c: float = 1.0) -> int:
        """Smallest T with c beta^T / (1 - beta) below tol."""
        return horizon_for_tolerance(self.beta_hat, tol=tol, c=c)

    def burn_in_hint(self) -> int:
        """Default warm-up: 10 / (1 - beta)."""
        b = min(self.beta_hat, 0.999)
        return int(math.ceil(10.0 / (1.0 - b)))


def horizon_for_tolerance(beta: float, tol: float = 1e-4,
                          c: float = 1.0) -> int:
    """Smallest T with c beta^T / (1 - beta) < tol (geometric residual)."""
    if not 0 < beta < 1:
        raise ParameterError("beta must lie in (0, 1)")
    if not tol > 0:
        raise ParameterError("tol must be positive")
    t = math.log(tol * (1.0 - beta) / c) / math.log(beta)
    k = max(1, int(math.ceil(t)))
    # the log inversion can land exactly on (or just off) the boundary;
    # enforce strictness and minimality directly
    while c * beta ** k / (1.0 - beta) >= tol:
        k += 1
    while k > 1 and c * beta ** (k - 1) / (1.0 - beta) < tol:
        k -= 1
    return k


# ---------------------------------------------------------------------------
# internal helpers


def _spectral_radius(a: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(a))))


def _gh_nodes():
    nodes, weights = roots_hermite(128)
    return math.sqrt(2.0) * nodes, weights / math.sqrt(math.pi)


_GH_Z, _GH_W = _gh_nodes()


def _garch_log_moment(a1: float, b1: float) -> float:
    """E log(a1 Z^2 + b1) for standard Gaussian Z (Gauss-Hermite)."""
    return float(np.sum(_GH_W * np.log(a1 * _GH_Z ** 2 + b1)))


def _garch_power_moment(a1: float, b1: float, kappa: float) -> float:
    """E (a1 Z^2 + b1)^(kappa/2) for standard Gaussian Z."""
    return float(np.sum(_GH_W * (a1 * _GH_Z ** 2 + b1) ** (kappa / 2.0)))


def _law_log_mean(law: TailLaw) -> float:
    """E log A for a positive multiplier law."""
    if law.family == randkit.LOGNORMAL:
        return law.mu
    if law.family == randkit.PARETO:
        # log X ~ scale shift + Exp(alpha)
        return math.log(law.scale) + 1.0 / law.alpha
    stream = derive_stream(_FIXED_MC_SEED, 0x1B)
    draws = sample_law(stream, law, 200_000)
    if np.any(draws <= 0):
        raise ParameterError("multiplier law must be positive")
    return float(np.mean(np.log(draws)))


def _lyapunov_exponent(spec: KestenSpec) -> float:
    if spec.dim == 1:
        return _law_log_mean(spec.a_law)
    stream = derive_stream(_FIXED_MC_SEED, 0x1C)
    v = np.full(spec.dim, 1.0 / math.sqrt(spec.dim))
    acc = 0.0
    steps = 2000
    mats = spec.draw_multipliers(stream, steps)
    for t in range(steps):
        v = mats[t] @ v
        nrm = float(np.linalg.norm(v))
        if nrm == 0.0:
            return -math.inf
        acc += math.log(nrm)
        v /= nrm
    return acc / steps


def _law_moment(law: TailLaw, kappa: float) -> float:
    """E A^kappa for a positive multiplier law."""
    if law.family == randkit.LOGNORMAL:
        return math.exp(kappa * law.mu + kappa ** 2 * law.sigma ** 2 / 2.0)
    stream = derive_stream(_FIXED_MC_SEED, 0x1D)
    draws = sample_law(stream, law, 1_000_000)
    if np.any(draws <= 0):
        raise ParameterError("multiplier law must be positive")
    with np.errstate(over="raise"):
        try:
            return float(np.mean(draws ** kappa))
        except FloatingPointError:
            return math.inf


def _bisect_root(fn, lo: float, hi: float, tol: float = 2e-12) -> float:
    """Bracketing bisection; fn(lo) <= 0 <= fn(hi) assumed checked."""
    flo = fn(lo)
    if flo == 0.0:
        return lo
    if fn(hi) == 0.0:
        return hi
    for _ in range(256):
        if hi - lo < tol:
            break
        mid = 0.5 * (lo + hi)
        fmid = fn(mid)
        if not math.isfinite(fmid):
            raise NoRootError("moment non-finite inside the bracket")
        if fmid == 0.0:
            return mid
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _tail_balance(law: TailLaw) -> tuple[float, float]:
    """Limit split (P(X>x), P(X<-x)) / P(|X|>x) for a regularly varying
    innovation law."""
    if law.family == randkit.PARETO:
        return 1.0, 0.0
    if law.family == randkit.SYMMETRIC_PARETO:
        return 0.5, 0.5
    if law.family == randkit.STABLE and law.alpha < 2:
        return (1.0 + law.skew) / 2.0, (1.0 - law.skew) / 2.0
    raise UnsupportedLawError(
        f"{law.family} is not regularly varying: no tail balance")


# ---------------------------------------------------------------------------
# path simulation


def simulate_path(spec, n: int, burn_in: int, stream: RngStream) -> PathMatrix:
    """Stationary-regime sample of length n after discarding burn_in."""
    if n < 0 or burn_in < 0:
        raise ParameterError("n and burn_in must be nonnegative")
    if isinstance(spec, Var1Spec):
        values = _var1_paths(spec, n, burn_in, 1, stream)[0]
    elif isinstance(spec, KestenSpec):
        if spec.dim == 1:
            values = _kesten_scalar_paths(spec, n, burn_in, 1, stream)[0]
            values = values[:, None]
        else:
            values = _kesten_vector_path(spec, n, burn_in, stream)
    elif isinstance(spec, Garch11Spec):
        values = _garch_paths(spec, n, burn_in, 1, stream)[0][:, None]
    else:
        raise ParameterError(f"unsupported spec type {type(spec).__name__}")
    values = values.reshape(n, -1)
    return PathMatrix(values, burn_in, stream.stream_id)


def simulate_paths_batch(spec, n: int, burn_in: int, replicas: int,
                         stream: RngStream) -> np.ndarray:
    """(replicas, n) observable paths for scalar models; used by the
    limit-theorem scans. Rows are independent paths."""
    if replicas < 0:
        raise ParameterError("replicas must be nonnegative")
    if isinstance(spec, Var1Spec):
        if spec.dim != 1:
            raise ParameterError("batch path simulation is scalar-only")
        return _var1_paths(spec, n, burn_in, replicas, stream)[..., 0]
    if isinstance(spec, KestenSpec):
        if spec.dim != 1:
            raise ParameterError("batch path simulation is scalar-only")
        return _kesten_scalar_paths(spec, n, burn_in, replicas, stream)
    if isinstance(spec, Garch11Spec):
        return _garch_paths(spec, n, burn_in, replicas, stream)
    raise ParameterError(f"unsupported spec type {type(spec).__name__}")


def _var1_paths(spec: Var1Spec, n: int, burn_in: int, replicas: int,
                stream: RngStream) -> np.ndarray:
    d = spec.dim
    total = n + burn_in
    if d == 1:
        a = float(spec.draw_matrix(stream)[0, 0]) if spec.a_matrix is None \
            else float(spec.a_matrix[0, 0])
        z = sample_law(stream, spec.innovation,
                       replicas * total).reshape(replicas, total)
        z *= spec.weights[0]
        if spec.a_matrix is None:
            # one coefficient per path
            out = np.empty_like(z)
            coeffs = [a] + [float(spec.draw_matrix(stream)[0, 0])
                            for _ in range(replicas - 1)]
            for r in range(replicas):
                out[r] = lfilter([1.0], [1.0, -coeffs[r]], z[r])
            x = out
        else:
            x = lfilter([1.0], [1.0, -a], z, axis=1)
        x = x[:, burn_in:]
        _check_finite(x, "spectral radius below 1")
        return x[..., None]
    out = np.empty((replicas, n, d))
    for r in range(replicas):
        a = spec.draw_matrix(stream)
        z = sample_law(stream, spec.innovation,
                       total * d).reshape(total, d) * spec.weights
        x = np.zeros(d)
        for t in range(total):
            x = a @ x + z[t]
            if t >= burn_in:
                out[r, t - burn_in] = x
        _check_finite(out[r], "spectral radius below 1")
    return out


def _kesten_scalar_paths(spec: KestenSpec, n: int, burn_in: int,
                         replicas: int, stream: RngStream) -> np.ndarray:
    total = n + burn_in
    a = spec.draw_multipliers(stream, replicas * total).reshape(
        replicas, total)
    b = spec.draw_additives(stream, replicas * total).reshape(
        replicas, total)
    x = np.zeros(replicas)
    out = np.empty((replicas, n))
    for t in range(total):
        x = a[:, t] * x + b[:, t]
        if t >= burn_in:
            out[:, t - burn_in] = x
    _check_finite(out, "negative log-mean of the multiplier law")
    return out


def _kesten_vector_path(spec: KestenSpec, n: int, burn_in: int,
                        stream: RngStream) -> np.ndarray:
    total = n + burn_in
    mats = spec.draw_multipliers(stream, total)
    adds = spec.draw_additives(stream, total)
    x = np.zeros(spec.dim)
    out = np.empty((n, spec.dim))
    for t in range(total):
        x = mats[t] @ x + adds[t]
        if t >= burn_in:
            out[t - burn_in] = x
    _check_finite(out, "negative top Lyapunov exponent")
    return out


def _garch_paths(spec: Garch11Spec, n: int, burn_in: int, replicas: int,
                 stream: RngStream) -> np.ndarray:
    total = n + burn_in
    z = stream.rng.standard_normal((replicas, total))
    a0, a1, b1 = spec.alpha0, spec.alpha1, spec.beta1
    if a1 + b1 < 1.0:
        s2 = np.full(replicas, a0 / (1.0 - a1 - b1))
    else:
        s2 = np.full(replicas, a0)
    out = np.empty((replicas, n))
    for t in range(total):
        x = np.sqrt(s2) * z[:, t]
        if t >= burn_in:
            out[:, t - burn_in] = x
        s2 = a0 + s2 * (a1 * z[:, t] ** 2 + b1)
    _check_finite(out, "negative log-mean of the volatility multiplier")
    return out


def _check_finite(x: np.ndarray, invariant: str) -> None:
    if x.size and (not np.all(np.isfinite(x))
                   or np.max(np.abs(x)) > _BLOWUP):
        raise DivergenceError(
            f"simulated recursion diverged; failed invariant: {invariant}")


# ---------------------------------------------------------------------------
# spectral tail process


def tail_index(spec) -> float:
    """Tail index of the stationary law.

    Linear model: inherited from the innovation law. Scalar recurrence /
    GARCH: unique positive root of the multiplier moment equation, found
    by bracketing bisection (absolute tolerance well below 1e-8).
    """
    if isinstance(spec, Var1Spec):
        law = spec.innovation
        if law.family in (randkit.PARETO, randkit.SYMMETRIC_PARETO):
            return law.alpha
        if law.family == randkit.STABLE and law.alpha < 2:
            return law.alpha
        raise UnsupportedLawError(
            "tail index requires a regularly varying innovation law")
    if isinstance(spec, KestenSpec):
        if spec.dim != 1:
            raise UnsupportedLawError(
                "moment equation implemented for the scalar recursion only")
        fn = lambda k: _law_moment(spec.a_law, k) - 1.0
        return _solve_moment_equation(fn)
    if isinstance(spec, Garch11Spec):
        fn = lambda k: _garch_power_moment(spec.alpha1, spec.beta1, k) - 1.0
        return _solve_moment_equation(fn)
    raise ParameterError(f"unsupported spec type {type(spec).__name__}")


def model_alpha(spec) -> float:
    """Tail index for downstream sampling: the declared ``alpha_hint``
    when the spec carries one, else the moment-equation root."""
    hint = getattr(spec, "alpha_hint", None)
    if hint is not None:
        if not hint > 0:
            raise ParameterError("alpha_hint must be positive")
        return float(hint)
    return tail_index(spec)


def _solve_moment_equation(fn) -> float:
    lo = 1e-6
    flo = fn(lo)
    if not math.isfinite(flo):
        raise NoRootError("moment non-finite at the lower bracket end")
    if flo >= 0.0:
        raise NoRootError(
            "moment function not below 1 near zero; no admissible root")
    hi = 1.0
    for _ in range(12):
        fhi = fn(hi)
        if not math.isfinite(fhi):
            raise NoRootError(
                f"moment non-finite at bracket end kappa={hi}")
        if fhi >= 0.0:
            return _bisect_root(fn, lo, hi)
        lo, flo = hi, fhi
        hi *= 2.0
    raise NoRootError("no sign change on the expanded bracket (kappa <= "
                      f"{hi / 2})")


def _theta0_two_point(spec) -> tuple[float, float]:
    """P(Theta_0 = +1), P(Theta_0 = -1) for scalar models.

    Exact from the innovation tail balance and the moving-average
    coefficients (linear model), or from the sign structure of the
    additive term (scalar recurrence).
    """
    if isinstance(spec, Var1Spec):
        alpha = tail_index(spec)
        p_up, p_dn = _tail_balance(spec.innovation)
        a = float(spec.a_matrix[0, 0])
        j = np.arange(_SERIES_TERMS)
        c = a ** j
        w_up = float(np.sum(np.clip(c, 0, None) ** alpha) * p_up
                     + np.sum(np.clip(-c, 0, None) ** alpha) * p_dn)
        w_dn = float(np.sum(np.clip(c, 0, None) ** alpha) * p_dn
                     + np.sum(np.clip(-c, 0, None) ** alpha) * p_up)
        tot = w_up + w_dn
        return w_up / tot, w_dn / tot
    if isinstance(spec, KestenSpec):
        fam = spec.b_law.family
        if fam in _POSITIVE_FAMILIES:
            return 1.0, 0.0
        if fam in _SYMMETRIC_FAMILIES or (
                fam == randkit.STABLE and spec.b_law.skew == 0.0):
            return 0.5, 0.5
        raise UnsupportedLawError(
            "no exact exceedance-angle law for this additive family")
    raise ParameterError("two-point angle only for scalar models")


def _angular_atoms(spec, master_seed: int, pilot_n: int = 200_000,
                   pilot_q: float = 0.999) -> np.ndarray:
    """Empirical exceedance angles from a pilot stationary run (the
    renormalized top (1 - pilot_q) rows by norm)."""
    key = (master_seed, pilot_n, pilot_q)
    cache = spec._angular_cache
    if key not in cache:
        pilot = simulate_path(spec, pilot_n, 2_000,
                              derive_stream(master_seed, _PILOT_STREAM_ID))
        x = pilot.values
        norms = np.linalg.norm(x, axis=1)
        cut = np.quantile(norms, pilot_q)
        rows = x[norms > cut]
        if rows.shape[0] < 10:
            raise ParameterError("pilot produced too few exceedances")
        cache[key] = rows / np.linalg.norm(rows, axis=1, keepdims=True)
    return cache[key]


def _sample_theta0(spec, replicas: int, stream: RngStream) -> np.ndarray:
    """(replicas, d) draws of the exceedance angle Theta_0."""
    dim = spec.dim
    if dim == 1:
        if isinstance(spec, Var1Spec) and spec.a_matrix is None:
            # random-coefficient chain: no exact two-point law; use the
            # pilot exceedance angles (signs, for d = 1)
            atoms = _angular_atoms(spec, stream.master_seed)
            idx = stream.rng.integers(0, atoms.shape[0], replicas)
            return atoms[idx]
        p_up, _ = _theta0_two_point(spec)
        if p_up == 1.0:
            return np.ones((replicas, 1))
        signs = np.where(stream.rng.random(replicas) < p_up, 1.0, -1.0)
        return signs[:, None]
    atoms = _angular_atoms(spec, stream.master_seed)
    idx = stream.rng.integers(0, atoms.shape[0], replicas)
    return atoms[idx]


def _tilted_z0_table(spec: Garch11Spec, alpha: float):
    """Inverse CDF table for the size-biased time-zero innovation with
    density proportional to (1 + z^2)^(alpha/2) exp(-z^2/2)."""
    key = round(alpha, 12)
    if key not in spec._tilt_cache:
        z = np.linspace(-16.0, 16.0, 2 ** 14 + 1)
        logw = 0.5 * alpha * np.log1p(z ** 2) - 0.5 * z ** 2
        w = np.exp(logw - logw.max())
        cdf = np.concatenate([[0.0], np.cumsum((w[1:] + w[:-1])
                                               * 0.5 * np.diff(z))])
        cdf /= cdf[-1]
        # strictly increasing for interpolation
        keep = np.concatenate([[True], np.diff(cdf) > 0])
        spec._tilt_cache[key] = (cdf[keep], z[keep])
    return spec._tilt_cache[key]


def _sample_tilted_z0(spec: Garch11Spec, alpha: float, replicas: int,
                      stream: RngStream) -> np.ndarray:
    cdf, z = _tilted_z0_table(spec, alpha)
    u = stream.rng.random(replicas)
    return np.interp(u, cdf, z)


def sample_tail_process_batch(spec, horizon: int, replicas: int,
                              stream: RngStream):
    """(replicas, horizon+1, d) tail-process angles and (replicas,) radii.

    The radius stream is derived separately from the angle stream so the
    Pareto radius is independent of the angular path by construction.
    """
    if horizon < 0:
        raise ParameterError("horizon must be nonnegative")
    if replicas < 1:
        raise ParameterError("replicas must be at least 1")
    angle = stream.substream(_ANGLE_CHILD)
    radius = stream.substream(_RADIUS_CHILD)
    alpha = model_alpha(spec)
    radii = randkit.sample_pareto(radius, alpha, replicas)
    t_len = horizon + 1

    if isinstance(spec, Var1Spec):
        theta0 = _sample_theta0(spec, replicas, angle)
        d = spec.dim
        if spec.a_matrix is not None:
            a = spec.a_matrix
            theta = np.empty((replicas, t_len, d))
            cur = theta0
            theta[:, 0] = cur
            for t in range(1, t_len):
                cur = cur @ a.T
                theta[:, t] = cur
        else:
            theta = np.empty((replicas, t_len, d))
            theta[:, 0] = theta0
            mats = np.stack([spec.draw_matrix(angle)
                             for _ in range(replicas)])
            cur = theta0
            for t in range(1, t_len):
                cur = np.einsum("rij,rj->ri", mats, cur)
                theta[:, t] = cur
        return theta, radii

    if isinstance(spec, KestenSpec):
        theta0 = _sample_theta0(spec, replicas, angle)
        if spec.dim == 1:
            mults = spec.draw_multipliers(
                angle, replicas * horizon).reshape(replicas, horizon) \
                if horizon else np.empty((replicas, 0))
            pi = np.cumprod(mults, axis=1)
            theta = np.empty((replicas, t_len, 1))
            theta[:, 0] = theta0
            theta[:, 1:, 0] = pi * theta0
            return theta, radii
        theta = np.empty((replicas, t_len, spec.dim))
        theta[:, 0] = theta0
        cur = theta0
        for t in range(1, t_len):
            mats = spec.draw_multipliers(angle, replicas)
            cur = np.einsum("rij,rj->ri", mats, cur)
            theta[:, t] = cur
        return theta, radii

    if isinstance(spec, Garch11Spec):
        z0 = _sample_tilted_z0(spec, alpha, replicas, angle)
        z_rest = angle.rng.standard_normal((replicas, horizon))
        z_all = np.concatenate([z0[:, None], z_rest], axis=1)
        mults = spec.alpha1 * z_all[:, :horizon] ** 2 + spec.beta1
        pi = np.cumprod(mults, axis=1) if horizon else \
            np.empty((replicas, 0))
        s0 = np.sqrt(1.0 + z0 ** 2)
        theta = np.empty((replicas, t_len, 2))
        theta[:, 0, 0] = 1.0 / s0
        theta[:, 0, 1] = z0 / s0
        if horizon:
            root = np.sqrt(pi) / s0[:, None]
            theta[:, 1:, 0] = root
            theta[:, 1:, 1] = root * z_all[:, 1:]
        return theta, radii

    raise ParameterError(f"unsupported spec type {type(spec).__name__}")


def sample_tail_process(spec, horizon: int,
                        stream: RngStream) -> TailProcessPath:
    """One tail-process realization built from the model's closed form."""
    theta, radii = sample_tail_process_batch(spec, horizon, 1, stream)
    return TailProcessPath(theta[0], float(radii[0]))


def sample_exceedance_angles(spec, replicas: int,
                             stream: RngStream) -> np.ndarray:
    """(replicas, d) draws from the model's exceedance-angle law (the law
    of Theta_0): exact two-point law for scalar models, pilot-based
    empirical angles otherwise."""
    if replicas < 1:
        raise ParameterError("replicas must be at least 1")
    return _sample_theta0(spec, replicas, stream)


# ---------------------------------------------------------------------------
# analytic stationary-law facts (used for scan denominators and centering)


def stationary_tail_constant(spec):
    """(c, alpha, scale) with P(|X| > x) ~ c (x/scale)^(-alpha), when the
    stationary tail follows analytically; None otherwise."""
    if isinstance(spec, Var1Spec) and spec.dim == 1 \
            and spec.a_matrix is not None:
        law = spec.innovation
        a = abs(float(spec.a_matrix[0, 0]))
        if law.family in (randkit.PARETO, randkit.SYMMETRIC_PARETO):
            base = 1.0
        elif law.family == randkit.STABLE and law.alpha < 2:
            base = randkit.stable_tail_constant(law.alpha)
        else:
            return None
        alpha = law.alpha
        return base / (1.0 - a ** alpha), alpha, \
            law.scale * spec.weights[0]
    return None


def stationary_mean(spec):
    """Exact stationary mean vector, when available; None otherwise."""
    if isinstance(spec, Var1Spec) and spec.a_matrix is not None:
        try:
            mz = randkit.law_mean(spec.innovation)
        except (ParameterError, UnsupportedLawError):
            return None
        if not math.isfinite(mz):
            return None
        rhs = mz * spec.weights
        return np.linalg.solve(np.eye(spec.dim) - spec.a_matrix, rhs)
    if isinstance(spec, Garch11Spec):
        return np.zeros(1)
    if isinstance(spec, KestenSpec) and spec.dim == 1:
        try:
            ma = _law_moment(spec.a_law, 1.0)
            mb = randkit.law_mean(spec.b_law)
        except (ParameterError, UnsupportedLawError):
            return None
        if not (math.isfinite(ma) and math.isfinite(mb)) or ma >= 1.0:
            return None
        return np.array([mb / (1.0 - ma)])
    return None


# ---------------------------------------------------------------------------
# drift diagnostics and the lag-product functional


def drift_margin(spec, p: float, m: int, grid, stream: RngStream,
                 reps_per_state: int = 2000) -> DriftReport:
    """Fit E(|next state|^p | state) <= beta |state|^p + b over the grid by
    conditional Monte Carlo and least squares (intercept clamped at 0)."""
    if not p > 0:
        raise ParameterError("p must be positive")
    if m < 1:
        raise ParameterError("m must be at least 1")
    grid = [np.atleast_1d(np.asarray(g, dtype=float)) for g in grid]
    if not grid:
        raise ParameterError("grid must be non-empty")
    v_state = np.array([np.linalg.norm(g) ** p for g in grid])
    v_next = np.empty(len(grid))
    for i, y in enumerate(grid):
        nxt = _conditional_states(spec, y, m, reps_per_state, stream)
        if not np.all(np.isfinite(nxt)):
            raise DivergenceError(
                "conditional simulation diverged from grid state "
                f"{y.tolist()}")
        v_next[i] = float(np.mean(np.linalg.norm(
            np.atleast_2d(nxt), axis=1) ** p))
    design = np.column_stack([v_state, np.ones_like(v_state)])
    coef, *_ = np.linalg.lstsq(design, v_next, rcond=None)
    beta_hat, intercept = float(coef[0]), float(coef[1])
    if intercept < 0.0:
        intercept = 0.0
        beta_hat = float(np.dot(v_state, v_next) / np.dot(v_state, v_state))
    resid = v_next - (beta_hat * v_state + intercept)
    dof = max(len(grid) - 2, 1)
    sxx = float(np.sum((v_state - v_state.mean()) ** 2))
    beta_se = math.sqrt(float(np.sum(resid ** 2)) / dof / sxx) \
        if sxx > 0 else math.inf
    passed = beta_hat < 1.0 and beta_hat + 1.96 * beta_se < 1.0
    return DriftReport(p=p, m=m, beta_hat=beta_hat, beta_se=beta_se,
                       intercept=intercept, passed=passed,
                       grid_v=v_state, response_v=v_next)


def _conditional_states(spec, y: np.ndarray, m: int, reps: int,
                        stream: RngStream) -> np.ndarray:
    """reps draws of the chain state m steps after starting at y."""
    if isinstance(spec, Var1Spec):
        d = spec.dim
        cur = np.tile(y, (reps, 1))
        for _ in range(m):
            z = sample_law(stream, spec.innovation,
                           reps * d).reshape(reps, d) * spec.weights
            if spec.a_matrix is not None:
                cur = cur @ spec.a_matrix.T + z
            else:
                mats = np.stack([spec.draw_matrix(stream)
                                 for _ in range(reps)])
                cur = np.einsum("rij,rj->ri", mats, cur) + z
        return cur
    if isinstance(spec, KestenSpec) and spec.dim == 1:
        cur = np.full(reps, float(y[0]))
        for _ in range(m):
            a = spec.draw_multipliers(stream, reps)
            b = spec.draw_additives(stream, reps)
            cur = a * cur + b
        return cur[:, None]
    if isinstance(spec, Garch11Spec):
        # state (X_t, sigma_t); sigma'^2 = alpha0 + alpha1 x^2 + beta1 s^2
        if y.shape != (2,):
            raise ParameterError("recursion state is (x, sigma)")
        x = np.full(reps, float(y[0]))
        s2 = np.full(reps, float(y[1]) ** 2)
        for _ in range(m):
            s2 = spec.alpha0 + spec.alpha1 * x ** 2 + spec.beta1 * s2
            x = np.sqrt(s2) * stream.rng.standard_normal(reps)
        return np.column_stack([x, np.sqrt(s2)])
    raise ParameterError(f"unsupported spec type {type(spec).__name__}")


def acf_functional_path(spec, lag_max: int, n: int,
                        stream: RngStream) -> PathMatrix:
    """Path of the lag products (X_t X_{t-1}, ..., X_t X_{t-h}) with the
    squares X_t^2 as the final column (the only column when h = 0)."""
    if lag_max < 0:
        raise ParameterError("lag_max must be nonnegative")
    if n <= lag_max:
        raise ParameterError("n must exceed lag_max")
    if isinstance(spec, (Garch11Spec, KestenSpec, Var1Spec)):
        if isinstance(spec, (KestenSpec, Var1Spec)) and spec.dim != 1:
            raise ParameterError("lag-product functional is scalar-only")
    else:
        raise ParameterError(f"unsupported spec type {type(spec).__name__}")
    burn = 1000
    x = simulate_path(spec, n, burn, stream).values[:, 0]
    h = lag_max
    cols = [x[h:] * x[h - s:n - s] for s in range(1, h + 1)]
    cols.append(x[h:] ** 2)
    return PathMatrix(np.column_stack(cols), burn, stream.stream_id)
