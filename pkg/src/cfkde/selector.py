"""Bandwidth selection and sample-size planning.

Three families of selectors are provided. ``rule_of_thumb_normal`` rescales
the asymptotically optimal bandwidth for a unit normal target by an estimated
scale. ``bound_rule`` turns the closed-form minimizers of the finite-sample
risk bounds into plug-in bandwidth rules driven by user-supplied derivative
constants. ``cv_bandwidth`` minimizes a transform-side risk criterion over a
bandwidth grid, estimating the unknown squared transform modulus either by an
unbiased pairwise statistic or by a normal parametric model.

``plan_sample_size`` inverts a minimized risk bound: given a target accuracy
it returns the smallest sample size whose certified bound falls below it.
"""

import dataclasses
import math
import warnings
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import pdist

from .bounds import _power_minimum, amise_conventional
from .charfun import Sample, make_density
from .kernels import KernelModel, make_builtin
from .risk import integrated_sq_bias

__all__ = [
    "SelectorResult",
    "PlanRequest",
    "rule_of_thumb_normal",
    "bound_rule",
    "cv_bandwidth",
    "plan_bound_constant",
    "plan_sample_size",
    "default_h_grid",
]

_DEGENERATE_SCALE = 1e-12


@dataclasses.dataclass(frozen=True)
class SelectorResult:
    """A selected bandwidth with its provenance.

    Attributes
    ----------
    method : str
        Identifier of the selection rule.
    h : float
        Selected bandwidth, always positive.
    criterion_curve : tuple of (float, float) or None
        For grid-search selectors, (h, criterion) pairs over the full grid;
        None for closed-form rules.
    metadata : dict
        Sample size, kernel name, and rule-specific constants.
    """

    method: str
    h: float
    criterion_curve: Optional[Tuple[Tuple[float, float], ...]]
    metadata: Dict[str, object]


@dataclasses.dataclass(frozen=True)
class PlanRequest:
    """Inputs for sample-size planning.

    Attributes
    ----------
    target : str
        Risk notion to control, "mise" or "max_mse".
    epsilon : float
        Required accuracy, positive.
    v2, v3 : float or None
        Upper bounds on the total variation of the second and third
        derivative of the target density (conventional-kernel routes).
    a : float or None
        Upper bound on the density's maximum (max_mse route, or the
        unimodal fallback of the spectrum-cutoff nonsmooth route).
    variation : float or None
        Upper bound on the total variation of the density itself
        (spectrum-cutoff nonsmooth route).
    vm : float or None
        Upper bound on the total variation of the m-th derivative
        (spectrum-cutoff smooth route).
    m : int or None
        Number of derivatives for the spectrum-cutoff smooth route.
    regime : str or None
        None for a conventional kernel, else "nonsmooth" or "smooth" for
        the spectrum-cutoff kernel.
    """

    target: str
    epsilon: float
    v2: Optional[float] = None
    v3: Optional[float] = None
    a: Optional[float] = None
    variation: Optional[float] = None
    vm: Optional[float] = None
    m: Optional[int] = None
    regime: Optional[str] = None


def rule_of_thumb_normal(sigma_hat: float, n: int) -> SelectorResult:
    """Normal-reference bandwidth rule for the gaussian kernel.

    The constant is recomputed from the asymptotic risk formula for a unit
    normal target each call, then rescaled by ``sigma_hat``; the selected
    bandwidth is exactly linear in the scale estimate.

    Parameters
    ----------
    sigma_hat : float
        Scale estimate, positive.
    n : int
        Sample size.

    Returns
    -------
    SelectorResult
    """
    if not sigma_hat > 0.0:
        raise ValueError("sigma_hat must be positive")
    if n < 1:
        raise ValueError("n must be at least 1")
    kernel = make_builtin("gaussian")
    h_unit, _ = amise_conventional(make_density("normal"), kernel, n)
    h = sigma_hat * h_unit
    constant = h_unit * n ** 0.2
    return SelectorResult(
        method="rot_normal",
        h=h,
        criterion_curve=None,
        metadata={"n": n, "kernel": kernel.name, "constant": constant,
                  "sigma_hat": sigma_hat},
    )


def bound_rule(kind: str, constants, k: KernelModel, n: int) -> SelectorResult:
    """Bandwidth from the closed-form minimizer of a finite-sample bound.

    Parameters
    ----------
    kind : str
        "mise_thm1" uses the integrated-risk bound for twice-differentiable
        targets and needs the third-derivative variation constant.
        "maxmse_thm3" uses the uniform pointwise-risk bound for three-times
        differentiable targets and needs the fourth-derivative variation
        constant together with a bound on the density maximum.
    constants : float or sequence
        For "mise_thm1": v2 (a float or a 1-sequence). For "maxmse_thm3":
        the pair (v3, a).
    k : KernelModel
        Kernel; must be a probability density.
    n : int
        Sample size.

    Returns
    -------
    SelectorResult
    """
    if not k.is_density:
        raise ValueError("bound_rule requires a density kernel")
    if n < 1:
        raise ValueError("n must be at least 1")
    if kind == "mise_thm1":
        if constants is None:
            raise ValueError("mise_thm1 needs the constant v2")
        v2 = float(constants[0]) if isinstance(constants, (tuple, list)) \
            else float(constants)
        if not v2 > 0.0:
            raise ValueError("v2 must be positive")
        if k.mu2 is None:
            raise ValueError("kernel lacks a second moment")
        h0 = ((5.0 * math.pi / 6.0) * k.roughness / k.mu2 ** 2) ** 0.2 \
            * v2 ** (-1.0 / 3.0)
        h = h0 * n ** -0.2
        meta = {"n": n, "kernel": k.name, "v2": v2, "h0": h0}
    elif kind == "maxmse_thm3":
        if not isinstance(constants, (tuple, list)) or len(constants) != 2:
            raise ValueError("maxmse_thm3 needs the pair (v3, a)")
        v3, a = float(constants[0]), float(constants[1])
        if not (v3 > 0.0 and a > 0.0):
            raise ValueError("v3 and a must be positive")
        if k.mu2 is None:
            raise ValueError("kernel lacks a second moment")
        if not math.isfinite(k.a_value):
            raise ValueError("kernel transform is not absolutely integrable")
        # the transform-integral factor enters here without its 1/(2 pi)
        # normalization, matching the published plug-in recipe
        h0 = ((9.0 * math.pi ** 2 / 8.0) * (2.0 * math.pi * k.a_value) * a
              / k.mu2 ** 2) ** 0.2 * v3 ** -0.3
        h = h0 * n ** -0.2
        meta = {"n": n, "kernel": k.name, "v3": v3, "a": a, "h0": h0}
    else:
        raise ValueError("unknown bound rule kind: %r" % (kind,))
    return SelectorResult(method=kind, h=h, criterion_curve=None,
                          metadata=meta)


def default_h_grid(sigma_hat: float, n: int, size: int = 60) -> np.ndarray:
    """Log-spaced bandwidth grid spanning [0.05, 3] times the n^(-1/5) scale."""
    if not sigma_hat > 0.0:
        raise ValueError("sigma_hat must be positive")
    scale = sigma_hat * n ** -0.2
    return np.geomspace(0.05 * scale, 3.0 * scale, size)


def _phi_cutoff(k: KernelModel) -> float:
    # smallest dyadic u with sup_{|t| >= u} |phi(t)| below tolerance
    if k.cf_sup_tail is not None:
        u = 1.0
        while k.cf_sup_tail(u) > 1e-10:
            u *= 2.0
            if u > 2.0 ** 40:
                raise ValueError("kernel transform tail decays too slowly")
        return u
    u = 1.0
    while u <= 2.0 ** 24:
        band = np.linspace(u, 2.0 * u, 64)
        if np.max(np.abs(k.cf(band))) <= 1e-10:
            return u
        u *= 2.0
    raise ValueError("kernel transform tail decays too slowly")


def _pairwise_curve(d: np.ndarray, k: KernelModel, grid: np.ndarray,
                    n: int) -> np.ndarray:
    # Q(h) = R/(n h) + 2/(n(n-1)h) sum_{j<k} [(K*K)(d/h) - 2 K(d/h)]
    out = np.empty(grid.size)
    for i, h in enumerate(grid):
        u = d / h
        pair = np.sum(k.selfconv(u) - 2.0 * k.eval(u))
        out[i] = k.roughness / (n * h) + 2.0 * pair / (n * (n - 1.0) * h)
    return out


def _quadrature_curve(d: np.ndarray, k: KernelModel, grid: np.ndarray,
                      n: int) -> np.ndarray:
    # (1/pi) int_0^T qhat(t) (phi(ht)^2 - 2 phi(ht)) dt + R/(n h); the
    # h-independent delta-type term of the expanded square is dropped, as in
    # the pairwise form, so both routes compute the same curve
    u_cut = _phi_cutoff(k)
    d_max = float(d.max()) if d.size else 0.0
    nodes, weights = np.polynomial.legendre.leggauss(12)
    out = np.empty(grid.size)
    for i, h in enumerate(grid):
        t_max = u_cut / h
        panels = max(16, int(math.ceil(t_max * d_max / math.pi)) + 1)
        edges = np.linspace(0.0, t_max, panels + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        t = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        w = (half[:, None] * weights[None, :]).ravel()
        qhat = 2.0 * np.cos(t[:, None] * d[None, :]).sum(axis=1) \
            / (n * (n - 1.0))
        phi = k.cf(h * t)
        integral = float(np.dot(w, qhat * (phi * phi - 2.0 * phi)))
        out[i] = integral / math.pi + k.roughness / (n * h)
    return out


def _parametric_curve(sigma: float, k: KernelModel, grid: np.ndarray,
                      n: int) -> np.ndarray:
    # plug-in model for the squared transform modulus: exp(-sigma^2 t^2)
    model = make_density("normal", sigma=sigma)
    out = np.empty(grid.size)
    for i, h in enumerate(grid):
        out[i] = integrated_sq_bias(model, k, h).value \
            + k.roughness / (n * h)
    return out


def cv_bandwidth(s: Sample, k: KernelModel,
                 h_grid: Optional[Sequence[float]] = None,
                 q_estimator: str = "unbiased",
                 sigma_hat: Optional[float] = None) -> SelectorResult:
    """Bandwidth minimizing a transform-side risk criterion over a grid.

    The criterion is the integrated risk with the unknown squared transform
    modulus replaced by an estimate: the criterion value at h is
    (2 pi)^(-1) int qhat(t) (1 - phi(ht))^2 dt + R(K)/(n h), up to an additive
    constant not depending on h.

    Parameters
    ----------
    s : Sample
        Observed sample, at least two points for the unbiased estimator.
    k : KernelModel
        Kernel whose transform phi drives the criterion.
    h_grid : sequence of float, optional
        Candidate bandwidths; defaults to a 60-point log grid scaled by the
        sample standard deviation and n^(-1/5).
    q_estimator : str
        "unbiased" for the pairwise leave-structure estimator, "parametric"
        for the normal plug-in model.
    sigma_hat : float, optional
        Scale for the parametric model; defaults to the sample standard
        deviation.

    Returns
    -------
    SelectorResult
        The grid argmin together with the full criterion curve.
    """
    if q_estimator not in ("unbiased", "parametric"):
        raise ValueError("unknown q_estimator: %r" % (q_estimator,))
    n = s.n
    if q_estimator == "unbiased" and n < 2:
        raise ValueError("unbiased criterion needs at least two points")
    values = np.asarray(s.values, dtype=float)
    sigma = s.std() if n >= 2 else 0.0
    degenerate = not sigma > _DEGENERATE_SCALE

    if h_grid is None:
        if degenerate:
            raise ValueError(
                "sample scale is degenerate; supply an explicit h_grid")
        grid = default_h_grid(sigma, n)
    else:
        grid = np.asarray(list(h_grid), dtype=float)
        if grid.size == 0:
            raise ValueError("h_grid must be nonempty")
        if not np.all(np.isfinite(grid)) or not np.all(grid > 0.0):
            raise ValueError("h_grid entries must be positive and finite")
        if degenerate and q_estimator == "unbiased":
            warnings.warn("sample scale is degenerate; criterion favors the "
                          "smallest bandwidth", stacklevel=2)

    if q_estimator == "unbiased":
        d = pdist(values[:, None]) if n > 1 else np.empty(0)
        if k.selfconv is not None:
            curve = _pairwise_curve(d, k, grid, n)
        else:
            curve = _quadrature_curve(d, k, grid, n)
        method = "ucv"
        extra = {}
    else:
        scale = sigma if sigma_hat is None else float(sigma_hat)
        if not scale > _DEGENERATE_SCALE:
            raise ValueError("parametric model needs a positive scale")
        curve = _parametric_curve(scale, k, grid, n)
        method = "cv_parametric"
        extra = {"sigma_hat": scale}

    idx = int(np.argmin(curve))
    pairs = tuple((float(h), float(q)) for h, q in zip(grid, curve))
    meta = {"n": n, "kernel": k.name, "q_estimator": q_estimator}
    meta.update(extra)
    return SelectorResult(method=method, h=float(grid[idx]),
                          criterion_curve=pairs, metadata=meta)


def plan_bound_constant(req: PlanRequest,
                        k: Optional[KernelModel] = None) -> Tuple[float, float]:
    """Constant and rate of the minimized bound used for planning.

    Returns (C, r) such that the certified accuracy at sample size n is
    C * n^(-r).

    Parameters
    ----------
    req : PlanRequest
    k : KernelModel, optional
        Required for the conventional-kernel routes (req.regime None).

    Returns
    -------
    (float, float)
    """
    if req.target not in ("mise", "max_mse"):
        raise ValueError("unknown target: %r" % (req.target,))
    if not req.epsilon > 0.0:
        raise ValueError("epsilon must be positive")

    if req.regime is None:
        if k is None or not k.is_density:
            raise ValueError("conventional planning needs a density kernel")
        if req.target == "mise":
            if req.v2 is None or not req.v2 > 0.0:
                raise ValueError("mise planning needs the constant v2")
            if k.mu2 is None or not k.zero_mean:
                raise ValueError("kernel lacks the required moments")
            c1 = 0.3 / math.pi * k.mu2 ** 2 * req.v2 ** (5.0 / 3.0)
            _, cmin = _power_minimum(c1, k.roughness, 4.0)
            return cmin, 0.8
        if req.v3 is None or req.a is None or not (req.v3 > 0.0 and req.a > 0.0):
            raise ValueError("max_mse planning needs the pair (v3, a)")
        if k.mu2 is None or not k.zero_mean:
            raise ValueError("kernel lacks the required moments")
        if not math.isfinite(k.a_value):
            raise ValueError("kernel transform is not absolutely integrable")
        c1 = 4.0 / (9.0 * math.pi ** 2) * k.mu2 ** 2 * req.v3 ** 1.5
        _, cmin = _power_minimum(c1, 2.0 * req.a * k.a_value, 4.0)
        return cmin, 0.8

    if req.regime == "nonsmooth":
        if req.target != "mise":
            raise ValueError("the nonsmooth route certifies mise only")
        if req.variation is not None and req.variation > 0.0:
            return 2.0 * req.variation / math.pi, 0.5
        if req.a is not None and req.a > 0.0:
            return 4.0 * req.a / math.pi, 0.5
        raise ValueError("nonsmooth planning needs variation or a")
    if req.regime == "smooth":
        if req.target != "mise":
            raise ValueError("the smooth route certifies mise only")
        if req.m is None or req.m < 1:
            raise ValueError("smooth planning needs m >= 1")
        if req.vm is None or not req.vm > 0.0:
            raise ValueError("smooth planning needs the constant vm")
        m = float(req.m)
        cmin = ((4.0 * (m + 1.0)) ** (1.0 / (2.0 * m + 1.0))
                * ((2.0 * m + 1.0) / m) ** (2.0 * m / (2.0 * m + 1.0))
                * req.vm ** (1.0 / (m + 1.0))) / (2.0 * math.pi)
        return cmin, 2.0 * m / (2.0 * m + 1.0)
    raise ValueError("unknown regime: %r" % (req.regime,))


def plan_sample_size(req: PlanRequest,
                     k: Optional[KernelModel] = None) -> int:
    """Smallest sample size whose minimized bound meets the accuracy target.

    Parameters
    ----------
    req : PlanRequest
    k : KernelModel, optional
        Required for the conventional-kernel routes.

    Returns
    -------
    int
        The least n with C * n^(-r) <= req.epsilon.
    """
    c, r = plan_bound_constant(req, k)
    if c <= req.epsilon:
        return 1
    n0 = max(1, math.ceil((c / req.epsilon) ** (1.0 / r)))
    while c * n0 ** -r > req.epsilon:
        n0 += 1
    while n0 > 1 and c * (n0 - 1.0) ** -r <= req.epsilon:
        n0 -= 1
    return n0
