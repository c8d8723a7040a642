"""Cluster-index machinery: the summed and sup functionals of the spectral
tail process, closed-form model evaluations, truncated (telescoping)
differences, and the half-space limit measure they determine."""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import (ParameterError, SingularDrawError, UnsupportedCaseError)
from . import models
from .randkit import RngStream

ROUTE_TAIL_PROCESS = "tail_process"
ROUTE_LDP_RATIO = "ldp_ratio"
ROUTE_CLOSED_FORM = "closed_form"
ROUTE_TELESCOPING = "telescoping"
_ROUTES = (ROUTE_TAIL_PROCESS, ROUTE_LDP_RATIO, ROUTE_CLOSED_FORM,
           ROUTE_TELESCOPING)

_CHUNK = 1 << 16
_AUX_BURN = 256
_MATCH_TOL = 1e-9


@dataclass(frozen=True)
class Direction:
    """A unit vector on the sphere; any nonzero vector is normalized at
    construction."""

    theta: tuple

    def __init__(self, theta):
        v = np.atleast_1d(np.asarray(theta, dtype=float))
        nrm = float(np.linalg.norm(v))
        if nrm == 0.0 or not np.all(np.isfinite(v)):
            raise ParameterError("direction must be a finite nonzero vector")
        if abs(nrm - 1.0) > 1e-12:
            v = v / nrm
        object.__setattr__(self, "theta", tuple(float(c) for c in v))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.theta)

    @property
    def dim(self) -> int:
        return len(self.theta)

    def negated(self) -> "Direction":
        return Direction([-c for c in self.theta])


@dataclass
class ClusterIndexEstimate:
    """Point estimate of a cluster-index functional with Monte Carlo error
    and provenance.

    ``std_error`` is the unbiased (ddof=1) standard error of the mean,
    which coincides with the delete-one jackknife for a sample mean;
    ``plug_in_se`` is the ddof=0 variant.
    """

    value: float
    std_error: float
    route: str
    horizon: int
    replicas: int
    plug_in_se: float = 0.0

    def __post_init__(self):
        if self.route not in _ROUTES:
            raise ParameterError(f"unknown route {self.route!r}")
        if self.std_error < 0 or self.plug_in_se < 0:
            raise ParameterError("standard errors must be nonnegative")


@dataclass
class LimitMeasureEvaluator:
    """Half-space values of the limit measure: nu(t {x: theta'x > 1}) =
    t^(-alpha) b(theta).

    For integer alpha with an asymmetric pair (b(theta) != b(-theta)) the
    half-space family does not pin down a unique measure extension; such
    directions are listed in ``flagged_directions`` rather than resolved.
    """

    alpha: float
    b_values: dict
    flagged_directions: list = field(default_factory=list)

    def __post_init__(self):
        if not self.alpha > 0:
            raise ParameterError("alpha must be positive")
        store = {}
        for direction, value in self.b_values.items():
            if not isinstance(direction, Direction):
                direction = Direction(direction)
            if value < 0:
                raise ParameterError("b values must be nonnegative")
            store[direction] = float(value)
        self.b_values = store
        self.flagged_directions = list(self.flagged_directions)
        if float(self.alpha).is_integer():
            for direction, value in store.items():
                opposite = store.get(direction.negated())
                if opposite is not None and not math.isclose(
                        value, opposite, rel_tol=1e-6, abs_tol=1e-9):
                    if direction not in self.flagged_directions:
                        self.flagged_directions.append(direction)

    def b_at(self, theta: Direction) -> float:
        if not isinstance(theta, Direction):
            theta = Direction(theta)
        if theta in self.b_values:
            return self.b_values[theta]
        tv = theta.vector
        for direction, value in self.b_values.items():
            if np.linalg.norm(direction.vector - tv) <= _MATCH_TOL:
                return value
        raise ParameterError(
            "direction not present in the stored half-space values")


def nu_alpha(evaluator: LimitMeasureEvaluator, theta: Direction,
             t: float) -> float:
    """Half-space mass nu(t {x: theta'x > 1}) = t^(-alpha) b(theta)."""
    if not t > 0:
        raise ParameterError("t must be positive")
    return t ** (-evaluator.alpha) * evaluator.b_at(theta)


# ---------------------------------------------------------------------------
# Monte Carlo routes over tail-process draws


def _resolve_sampler(sampler):
    """Accept either a model spec or a callable
    (horizon, replicas, stream) -> theta array (or (theta, radii))."""
    if isinstance(sampler, (models.Var1Spec, models.KestenSpec,
                            models.Garch11Spec)):
        def draw(horizon, replicas, stream):
            theta, _ = models.sample_tail_process_batch(
                sampler, horizon, replicas, stream)
            return theta
        return draw
    if callable(sampler):
        def draw(horizon, replicas, stream):
            out = sampler(horizon, replicas, stream)
            if isinstance(out, tuple):
                out = out[0]
            return np.asarray(out, dtype=float)
        return draw
    raise ParameterError("sampler must be a model spec or a callable")


def _mc_functional(draw, reduce_paths, theta: Direction, alpha: float,
                   horizon: int, replicas: int, stream: RngStream,
                   route: str) -> ClusterIndexEstimate:
    """Chunked fixed-order accumulation of a per-path functional."""
    tv = theta.vector
    total = 0.0
    total_sq = 0.0
    done = 0
    chunk_id = 0
    while done < replicas:
        take = min(_CHUNK, replicas - done)
        paths = draw(horizon, take, stream.substream(chunk_id))
        if paths.ndim != 3 or paths.shape[0] != take \
                or paths.shape[1] != horizon + 1:
            raise ParameterError(
                "sampler must return (replicas, horizon+1, d) paths")
        if paths.shape[2] != theta.dim:
            raise ParameterError("direction dimension mismatch")
        proj = paths @ tv
        vals = reduce_paths(proj, alpha)
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals * vals))
        done += take
        chunk_id += 1
    mean = total / replicas
    var1 = max(total_sq / replicas - mean * mean, 0.0)
    se_plug = math.sqrt(var1 / replicas)
    if replicas > 1:
        se = math.sqrt(var1 * replicas / (replicas - 1) / replicas)
    else:
        se = math.inf
    return ClusterIndexEstimate(value=mean, std_error=se, route=route,
                                horizon=horizon, replicas=replicas,
                                plug_in_se=se_plug)


def _sum_difference(proj: np.ndarray, alpha: float) -> np.ndarray:
    """((sum_{t>=0})_+)^alpha - ((sum_{t>=1})_+)^alpha per path."""
    s_all = proj.sum(axis=1)
    s_tail = s_all - proj[:, 0]
    return np.maximum(s_all, 0.0) ** alpha \
        - np.maximum(s_tail, 0.0) ** alpha


def _sup_difference(proj: np.ndarray, alpha: float) -> np.ndarray:
    """((sup_{t>=0})_+)^alpha - ((sup_{t>=1})_+)^alpha per path."""
    m_all = proj.max(axis=1)
    if proj.shape[1] > 1:
        m_tail = proj[:, 1:].max(axis=1)
    else:
        m_tail = np.zeros(proj.shape[0])
    return np.maximum(m_all, 0.0) ** alpha \
        - np.maximum(m_tail, 0.0) ** alpha


def cluster_index_tail_process(sampler, theta: Direction, alpha: float,
                               horizon: int, replicas: int,
                               stream: RngStream) -> ClusterIndexEstimate:
    """Monte Carlo cluster index: mean over tail-process draws of
    ((theta' sum_{t<=T})_+)^alpha - ((theta' sum_{1<=t<=T})_+)^alpha."""
    if replicas < 100:
        raise ParameterError("replicas must be at least 100")
    if horizon < 0:
        raise ParameterError("horizon must be nonnegative")
    if not alpha > 0:
        raise ParameterError("alpha must be positive")
    draw = _resolve_sampler(sampler)
    return _mc_functional(draw, _sum_difference, theta, alpha, horizon,
                          replicas, stream, ROUTE_TAIL_PROCESS)


def telescoping_difference(sampler, theta: Direction, alpha: float, k: int,
                           replicas: int,
                           stream: RngStream) -> ClusterIndexEstimate:
    """The k-truncated difference (horizon k in the summed functional);
    converges to the cluster index as k grows."""
    if k < 1:
        raise ParameterError("k must be at least 1")
    if replicas < 100:
        raise ParameterError("replicas must be at least 100")
    if not alpha > 0:
        raise ParameterError("alpha must be positive")
    draw = _resolve_sampler(sampler)
    return _mc_functional(draw, _sum_difference, theta, alpha, k,
                          replicas, stream, ROUTE_TELESCOPING)


def extremal_index(sampler, theta: Direction, alpha: float, horizon: int,
                   replicas: int, stream: RngStream) -> ClusterIndexEstimate:
    """Sup-version of the cluster functional (the extremal-index
    analogue)."""
    if replicas < 100:
        raise ParameterError("replicas must be at least 100")
    if horizon < 0:
        raise ParameterError("horizon must be nonnegative")
    if not alpha > 0:
        raise ParameterError("alpha must be positive")
    draw = _resolve_sampler(sampler)
    return _mc_functional(draw, _sup_difference, theta, alpha, horizon,
                          replicas, stream, ROUTE_TAIL_PROCESS)


# ---------------------------------------------------------------------------
# closed forms


def closed_form_cluster_index(spec, theta: Direction, replicas: int,
                              stream: RngStream) -> ClusterIndexEstimate:
    """Model-specific closed form, Monte Carlo only over (A, Theta_0).

    Linear model: E[(theta'(I-A)^{-1} Theta_0)_+^alpha
                    - (theta'A(I-A)^{-1} Theta_0)_+^alpha].
    Scalar/matrix recurrence: E[(theta'(W+I) Theta_0)_+^alpha
                                - (theta'W Theta_0)_+^alpha] with W the
    stationary solution of W_k = (W_{k-1} + I) A_k, run in for a fixed
    number of steps.
    """
    if replicas < 1:
        raise ParameterError("replicas must be at least 1")
    alpha = models.model_alpha(spec)
    tv = theta.vector
    angles = models.sample_exceedance_angles(
        spec, replicas, stream.substream(0x0A))
    if isinstance(spec, models.Var1Spec):
        if theta.dim != spec.dim:
            raise ParameterError("direction dimension mismatch")
        if spec.a_matrix is not None:
            lead, lag, skipped = _var1_coefficients(
                [spec.a_matrix], tv, spec.dim)
            if skipped:
                raise SingularDrawError("(I - A) is singular")
            u = angles @ lead[0]
            w = angles @ lag[0]
        else:
            mats = [spec.draw_matrix(stream.substream(0x0B))
                    for _ in range(replicas)]
            lead, lag, skipped = _var1_coefficients(mats, tv, spec.dim)
            if skipped > 0.01 * replicas:
                raise SingularDrawError(
                    f"{skipped} of {replicas} draws had singular (I - A)")
            keep = [i for i in range(replicas) if lead[i] is not None]
            u = np.array([angles[i] @ lead[i] for i in keep])
            w = np.array([angles[i] @ lag[i] for i in keep])
        vals = np.maximum(u, 0.0) ** alpha - np.maximum(w, 0.0) ** alpha
        horizon = 0
    elif isinstance(spec, models.KestenSpec):
        if theta.dim != spec.dim:
            raise ParameterError("direction dimension mismatch")
        w_mat = _kesten_aux_chain(spec, replicas, stream.substream(0x0C))
        if spec.dim == 1:
            w = w_mat * angles[:, 0] * tv[0]
            u = (w_mat + 1.0) * angles[:, 0] * tv[0]
        else:
            u = np.einsum("j,rjk,rk->r", tv,
                          w_mat + np.eye(spec.dim), angles)
            w = np.einsum("j,rjk,rk->r", tv, w_mat, angles)
        vals = np.maximum(u, 0.0) ** alpha - np.maximum(w, 0.0) ** alpha
        horizon = _AUX_BURN
    else:
        raise UnsupportedCaseError(
            "closed form available for the linear and recurrence models "
            "only")
    mean = float(np.mean(vals))
    if vals.size > 1:
        se = float(np.std(vals, ddof=1) / math.sqrt(vals.size))
        se_plug = float(np.std(vals, ddof=0) / math.sqrt(vals.size))
    else:
        se = se_plug = 0.0
    return ClusterIndexEstimate(value=mean, std_error=se,
                                route=ROUTE_CLOSED_FORM, horizon=horizon,
                                replicas=replicas, plug_in_se=se_plug)


def _var1_coefficients(mats, tv, dim):
    """Per matrix: (I-A)^{-T} theta and A^T (I-A)^{-T} theta, or None for
    (numerically) singular I-A."""
    lead, lag, skipped = [], [], 0
    eye = np.eye(dim)
    for a in mats:
        m = eye - a
        try:
            cond_bad = np.linalg.cond(m) > 1e12
        except np.linalg.LinAlgError:
            cond_bad = True
        if cond_bad:
            lead.append(None)
            lag.append(None)
            skipped += 1
            continue
        x = np.linalg.solve(m.T, tv)
        lead.append(x)
        lag.append(a.T @ x)
    return lead, lag, skipped


def _kesten_aux_chain(spec: models.KestenSpec, replicas: int,
                      stream: RngStream):
    """Independent stationary draws of W = sum_{t>=1} A_1 ... A_t via the
    recursion W_k = (W_{k-1} + I) A_k run for a fixed number of steps."""
    steps = _AUX_BURN
    if spec.dim == 1:
        a = spec.draw_multipliers(stream, replicas * steps).reshape(
            replicas, steps)
        w = np.zeros(replicas)
        for t in range(steps):
            w = (w + 1.0) * a[:, t]
        return w
    w = np.zeros((replicas, spec.dim, spec.dim))
    eye = np.eye(spec.dim)
    for t in range(steps):
        mats = spec.draw_multipliers(stream, replicas)
        w = np.einsum("rij,rjk->rik", w + eye, mats)
    return w
