"""Empirical verification of the three limit theorems: the alpha-stable
CLT for normalized sums, the precise large-deviation ratio scan, and the
Gaussian CLT over regenerative cycles."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import (InsufficientCyclesError, OutOfRegimeError,
                     ParameterError, UnsupportedCaseError, WidenRError)
from . import cluster, models, randkit, tailstats
from .cluster import ClusterIndexEstimate, Direction
from .randkit import RngStream

CF_GRID = np.linspace(-3.0, 3.0, 61)

_PATH_CHUNK_BUDGET = 1 << 22  # floats per simulated chunk
_PILOT_N = 200_000
_PILOT_BURN = 2_000
_PILOT_STREAM_ID = 0x11D07


# ---------------------------------------------------------------------------
# stable law parameters and characteristic function


@dataclass
class StableLawParams:
    """Direction-indexed pairs (b(theta), b(-theta)) defining the stable
    limit's characteristic function, plus the tail constant."""

    alpha: float
    pairs: dict
    c_alpha: float = None
    degenerate_directions: list = field(default_factory=list)

    def __post_init__(self):
        if not 0 < self.alpha < 2:
            raise ParameterError("alpha must lie in (0, 2)")
        store = {}
        for direction, pair in self.pairs.items():
            if not isinstance(direction, Direction):
                direction = Direction(direction)
            bp, bm = float(pair[0]), float(pair[1])
            if bp < 0 or bm < 0:
                raise ParameterError("b values must be nonnegative")
            store[direction] = (bp, bm)
            if bp + bm == 0.0 and direction not in \
                    self.degenerate_directions:
                self.degenerate_directions.append(direction)
        self.pairs = store
        expected = randkit.stable_tail_constant(self.alpha)
        if self.c_alpha is None:
            self.c_alpha = expected
        elif not math.isclose(self.c_alpha, expected, rel_tol=1e-12):
            raise ParameterError(
                "c_alpha inconsistent with the tail-constant formula")

    def pair_at(self, theta: Direction):
        if not isinstance(theta, Direction):
            theta = Direction(theta)
        if theta in self.pairs:
            return self.pairs[theta]
        tv = theta.vector
        for direction, pair in self.pairs.items():
            if np.linalg.norm(direction.vector - tv) <= 1e-9:
                return pair
        raise ParameterError("direction not present in the stored pairs")


def stable_cf(params: StableLawParams, theta: Direction, x: float) -> complex:
    """psi(x) = exp{-|x|^alpha C_alpha^{-1} [(b+ + b-)
    - i sign(x) (b+ - b-) tan(pi alpha / 2)]}; for alpha = 1 the pair must
    be symmetric and the tangent term vanishes."""
    bp, bm = params.pair_at(theta)
    a = params.alpha
    if x == 0.0:
        return complex(1.0, 0.0)
    inv_c = 1.0 / params.c_alpha
    if a == 1.0:
        if not math.isclose(bp, bm, rel_tol=1e-9, abs_tol=1e-12):
            raise UnsupportedCaseError(
                "alpha = 1 requires a symmetric pair b(theta) = b(-theta)")
        return complex(math.exp(-abs(x) * inv_c * (bp + bm)), 0.0)
    skew = math.copysign(1.0, x) * (bp - bm) * math.tan(math.pi * a / 2.0)
    exponent = -abs(x) ** a * inv_c * complex(bp + bm, -skew)
    return complex(np.exp(exponent))


@dataclass
class CfComparison:
    """Empirical vs theoretical characteristic function on a grid."""

    grid: np.ndarray
    empirical: np.ndarray
    theoretical: np.ndarray
    sup_abs_gap: float
    mc_band: float
    direction: Direction = None
    centering: str = "none"

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.empirical = np.asarray(self.empirical, dtype=complex)
        self.theoretical = np.asarray(self.theoretical, dtype=complex)
        if np.any(np.abs(self.empirical) > 1.0 + 1e-9):
            raise ParameterError("empirical CF modulus exceeds 1")


@dataclass
class LdpScanResult:
    """Ratio P(theta'S_n > x) / (n P(|X| > x)) over a grid in the
    large-deviation region (b_n, c_n)."""

    n: int
    theta: Direction
    xs: np.ndarray
    ratios: np.ndarray
    target: float
    sup_dev: float
    counts: np.ndarray = None
    ratio_ses: np.ndarray = None
    b_n: float = 0.0
    c_n: float = 0.0
    centering: str = "none"

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float)
        self.ratios = np.asarray(self.ratios, dtype=float)
        if np.any(np.diff(self.xs) <= 0):
            raise ParameterError("xs must be strictly increasing")
        if np.any(self.ratios < 0):
            raise ParameterError("ratios must be nonnegative")


@dataclass
class GaussianCltReport:
    """Long-run covariance from regenerative blocks vs batch means."""

    sigma_hat: np.ndarray
    batch_sigma: np.ndarray
    rel_gap: float
    n_cycles: int = 0
    mean_cycle_len: float = 0.0

    def __post_init__(self):
        self.sigma_hat = np.atleast_2d(np.asarray(self.sigma_hat,
                                                  dtype=float))
        self.batch_sigma = np.atleast_2d(np.asarray(self.batch_sigma,
                                                    dtype=float))
        if not np.allclose(self.sigma_hat, self.sigma_hat.T,
                           rtol=1e-9, atol=1e-12):
            raise ParameterError("sigma_hat must be symmetric")


# ---------------------------------------------------------------------------
# shared simulation plumbing


def _map_chunks(fn, n_chunks: int, threads: int):
    """Evaluate fn(0..n_chunks-1), possibly in a thread pool; results are
    returned in index order so reductions are schedule-independent."""
    if threads <= 1 or n_chunks <= 1:
        return [fn(i) for i in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n_chunks)))


def _default_burn(spec) -> int:
    if isinstance(spec, models.Var1Spec):
        return 512
    return 2048


def _scalar_sums(spec, n: int, reps: int, stream: RngStream, burn: int,
                 threads: int) -> np.ndarray:
    """(reps,) draws of S_n for a scalar-observable model, simulated in
    fixed-size chunks on disjoint substreams."""
    chunk = max(1, _PATH_CHUNK_BUDGET // max(n + burn, 1))
    n_chunks = (reps + chunk - 1) // chunk
    sizes = [min(chunk, reps - i * chunk) for i in range(n_chunks)]

    def one(i):
        paths = models.simulate_paths_batch(spec, n, burn, sizes[i],
                                            stream.substream(i))
        return paths.sum(axis=1)

    return np.concatenate(_map_chunks(one, n_chunks, threads))


def _sum_centering(spec, n: int, alpha: float, stream: RngStream):
    """(per-step mean, label) used to center S_n when alpha > 1."""
    if alpha <= 1.0:
        return 0.0, "none"
    mean = models.stationary_mean(spec)
    if mean is not None:
        return float(np.asarray(mean).ravel()[0]), "analytic"
    pilot = models.simulate_path(
        spec, _PILOT_N, _PILOT_BURN,
        randkit.derive_stream(stream.master_seed, _PILOT_STREAM_ID))
    return float(pilot.values[:, 0].mean()), "sample"


def _survival_fn(spec, stream: RngStream):
    """P(|X| > x) for the stationary law: analytic power tail when
    available, else a Hill fit on a pilot run."""
    analytic = models.stationary_tail_constant(spec)
    if analytic is not None:
        c, alpha, scale = analytic

        def surv(x):
            return c * (np.asarray(x, dtype=float) / scale) ** (-alpha)
        return surv, "analytic"
    pilot = models.simulate_path(
        spec, _PILOT_N, _PILOT_BURN,
        randkit.derive_stream(stream.master_seed, _PILOT_STREAM_ID + 1))
    x = np.abs(pilot.values[:, 0])
    k = tailstats.default_hill_k(x.size)
    fit = tailstats.hill_estimate(x, k)
    frac = k / x.size

    def surv(xq):
        return frac * (np.asarray(xq, dtype=float)
                       / fit.threshold) ** (-fit.alpha_hat)
    return surv, "hill"


def _a_n_for(spec, n: int, stream: RngStream) -> float:
    """Normalizing a_n with n P(|X| > a_n) = 1 for the stationary law."""
    analytic = models.stationary_tail_constant(spec)
    if analytic is not None:
        c, alpha, scale = analytic
        return scale * (n * c) ** (1.0 / alpha)
    surv, _ = _survival_fn(spec, stream)
    # invert the fitted power tail
    lo, hi = 1e-6, 1e18
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if n * float(surv(mid)) > 1.0:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


def _scalar_direction_requirements(spec, theta: Direction):
    """Map a scalar observable direction (+/-1) to the tail-process
    direction: identity for scalar chains, the X coordinate (0, s) for
    the volatility recursion."""
    if isinstance(spec, models.Garch11Spec):
        if theta.dim == 1:
            return Direction([0.0, theta.theta[0]])
        return theta
    return theta


def _b_pair_for(spec, theta: Direction, stream: RngStream,
                replicas: int = 50_000, horizon: int = 64):
    """(b(theta), b(-theta)) via the closed form when available, else the
    tail-process route."""
    th = _scalar_direction_requirements(spec, theta)
    if isinstance(spec, (models.Var1Spec, models.KestenSpec)):
        up = cluster.closed_form_cluster_index(
            spec, th, replicas, stream.substream(0xB0))
        dn = cluster.closed_form_cluster_index(
            spec, th.negated(), replicas, stream.substream(0xB1))
    else:
        alpha = models.model_alpha(spec)
        up = cluster.cluster_index_tail_process(
            spec, th, alpha, horizon, replicas, stream.substream(0xB0))
        dn = cluster.cluster_index_tail_process(
            spec, th.negated(), alpha, horizon, replicas,
            stream.substream(0xB1))
    return (max(up.value, 0.0), max(dn.value, 0.0)), (up, dn)


# ---------------------------------------------------------------------------
# the three checks


def stable_check(spec, theta_grid, n: int, reps: int, stream: RngStream,
                 params: StableLawParams = None, burn_in: int = None,
                 threads: int = 1):
    """Empirical CF of a_n^{-1} theta'S_n against the stable limit CF on
    the fixed grid; one CfComparison per direction."""
    if n < 1 or reps < 1:
        raise ParameterError("n and reps must be positive")
    alpha = models.model_alpha(spec)
    if not 0 < alpha < 2:
        raise OutOfRegimeError(
            f"stable regime needs alpha in (0, 2); got {alpha:.4g}")
    theta_grid = [t if isinstance(t, Direction) else Direction(t)
                  for t in theta_grid]
    if any(t.dim != 1 for t in theta_grid):
        raise ParameterError(
            "limit checks run on the scalar observable; directions "
            "must be +1 or -1")
    if params is None:
        pairs = {}
        for i, th in enumerate(theta_grid):
            pair, _ = _b_pair_for(spec, th, stream.substream(0xC0 + i))
            pairs[th] = pair
        params = StableLawParams(alpha=alpha, pairs=pairs)
    if alpha == 1.0:
        for th in theta_grid:
            bp, bm = params.pair_at(th)
            if not math.isclose(bp, bm, rel_tol=1e-6, abs_tol=1e-9):
                raise UnsupportedCaseError(
                    "alpha = 1 requires a symmetric model")
    burn = _default_burn(spec) if burn_in is None else burn_in
    sums = _scalar_sums(spec, n, reps, stream.substream(0xD0), burn,
                        threads)
    mu, centering = _sum_centering(spec, n, alpha, stream)
    a_n = _a_n_for(spec, n, stream)
    y = (sums - n * mu) / a_n
    out = []
    for th in theta_grid:
        proj = th.theta[0] * y
        emp = np.exp(1j * np.outer(CF_GRID, proj)).mean(axis=1)
        theo = np.array([stable_cf(params, th, float(x)) for x in CF_GRID])
        gap = float(np.max(np.abs(emp - theo)))
        out.append(CfComparison(grid=CF_GRID.copy(), empirical=emp,
                                theoretical=theo, sup_abs_gap=gap,
                                mc_band=3.0 * math.sqrt(2.0 / reps),
                                direction=th, centering=centering))
    return out


def ldp_region(alpha: float, n: int, eps: float = 0.1,
               c_factor: float = 100.0):
    """Default scan region (b_n, c_n): b_n = n^{1/alpha + eps} below the
    square-integrable regime, n^{0.5 + eps} above it."""
    if not n >= 2:
        raise ParameterError("n must be at least 2")
    if alpha < 2:
        b_n = float(n) ** (1.0 / alpha + eps)
    else:
        b_n = float(n) ** (0.5 + eps)
    return b_n, c_factor * b_n


def ldp_scan(spec, theta: Direction, n: int, reps: int, stream: RngStream,
             region=None, grid_size: int = 12, eps: float = 0.1,
             target: float = None, burn_in: int = None,
             threads: int = 1) -> LdpScanResult:
    """Monte Carlo ratios P(theta'S_n > x) / (n P(|X| > x)) over a
    geometric grid in the region, compared against the cluster index."""
    if not isinstance(theta, Direction):
        theta = Direction(theta)
    if theta.dim != 1:
        raise ParameterError(
            "the ratio scan runs on the scalar observable; the direction "
            "must be +1 or -1")
    if grid_size < 1:
        raise ParameterError("grid_size must be at least 1")
    alpha = models.model_alpha(spec)
    b_n, c_n = ldp_region(alpha, n, eps) if region is None else \
        (float(region[0]), float(region[1]))
    if not 0 < b_n < c_n:
        raise ParameterError("region must satisfy 0 < b_n < c_n")
    xs = np.geomspace(b_n, c_n, grid_size + 1)[1:]
    surv, denom_kind = _survival_fn(spec, stream)
    mu, centering = _sum_centering(spec, n, alpha, stream)
    burn = _default_burn(spec) if burn_in is None else burn_in
    sums = _scalar_sums(spec, n, reps, stream.substream(0xD1), burn,
                        threads)
    sign = theta.theta[0]
    proj = sign * (sums - n * mu)
    counts = (proj[:, None] > xs[None, :]).sum(axis=0).astype(float)
    short = np.flatnonzero(counts < 50)
    if short.size:
        j = int(short[0])
        raise WidenRError(
            f"only {int(counts[j])} exceedances at grid point "
            f"x={xs[j]:.6g} (need 50); widen the replica budget")
    denom = n * np.asarray(surv(xs), dtype=float)
    ratios = counts / reps / denom
    p_hat = counts / reps
    ratio_ses = np.sqrt(p_hat * (1.0 - p_hat) / reps) / denom
    if target is None:
        (bp, _), _ = _b_pair_for(spec, theta, stream.substream(0xC9))
        target = bp
    sup_dev = float(np.max(np.abs(ratios - target)))
    return LdpScanResult(n=n, theta=theta, xs=xs, ratios=ratios,
                         target=float(target), sup_dev=sup_dev,
                         counts=counts, ratio_ses=ratio_ses, b_n=b_n,
                         c_n=c_n, centering=centering)


def gaussian_sigma(blocks) -> GaussianCltReport:
    """Long-run covariance: cycle-sum second moment over the mean cycle
    length, cross-checked against non-overlapping batch means."""
    sums = np.atleast_2d(np.asarray(blocks.block_sums, dtype=float))
    k = sums.shape[0]
    if k < 30:
        raise InsufficientCyclesError(
            f"{k} complete cycles; need at least 30")
    lengths = np.diff(np.asarray(blocks.cycle_starts, dtype=float))
    mean_len = float(np.mean(lengths))
    sigma_hat = (sums.T @ sums) / k / mean_len
    path = np.atleast_2d(np.asarray(blocks.path, dtype=float))
    if path.shape[0] < path.shape[1]:
        path = path.T
    n = path.shape[0]
    ell = max(2, int(math.isqrt(n)))
    nb = n // ell
    if nb < 2:
        raise InsufficientCyclesError("path too short for batch means")
    means = path[: nb * ell].reshape(nb, ell, -1).mean(axis=1)
    centered = means - means.mean(axis=0)
    batch_sigma = ell * (centered.T @ centered) / (nb - 1)
    gap = np.linalg.norm(sigma_hat - batch_sigma, 2)
    denom = np.linalg.norm(batch_sigma, 2)
    rel_gap = float(gap / denom) if denom > 0 else math.inf
    return GaussianCltReport(sigma_hat=sigma_hat, batch_sigma=batch_sigma,
                             rel_gap=rel_gap, n_cycles=k,
                             mean_cycle_len=mean_len)


# ---------------------------------------------------------------------------
# integral representation of the limit CF (cross-check, alpha < 1)


def cf_integral_logpsi(sigma0, sigma1, alpha: float, v: float,
                       u_lo: float = -20.0, u_hi: float = 30.0,
                       points: int = 8193) -> complex:
    """log psi(v) = integral_0^inf E[e^{i v x S0} - e^{i v x S1}]
    alpha x^{-alpha-1} dx, computed on a log grid with an analytic
    small-x correction. S0, S1 are draws (or constants) of the summed
    tail-process projections with and without the time-zero term."""
    if not 0 < alpha < 1:
        raise ParameterError("integral representation requires alpha < 1")
    if not v > 0:
        raise ParameterError("v must be positive")
    s0 = np.atleast_1d(np.asarray(sigma0, dtype=float))
    s1 = np.atleast_1d(np.asarray(sigma1, dtype=float))
    u = np.linspace(u_lo, u_hi, points)
    x = np.exp(u)
    diff = np.exp(1j * v * np.outer(x, s0)).mean(axis=1) \
        - np.exp(1j * v * np.outer(x, s1)).mean(axis=1)
    integrand = diff * alpha * x ** (-alpha)  # includes the du Jacobian
    val = complex(np.trapezoid(integrand, u))
    # small-x head: integrand ~ i v E(S0 - S1) alpha x^{-alpha}
    x_lo = math.exp(u_lo)
    head = 1j * v * float(np.mean(s0) - np.mean(s1)) \
        * alpha / (1.0 - alpha) * x_lo ** (1.0 - alpha)
    return val + head
