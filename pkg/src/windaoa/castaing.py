"""Castaing lognormal-superposition densities and their maximum-likelihood fit.

The density is a zero-mean Gaussian mixture whose standard deviation is
lognormally distributed around ``sigma0`` with log-width ``lam``::

    P(x) = 1/(2 pi lam) * int_0^inf exp(-x^2 / 2 s^2) exp(-ln^2(s/sigma0) / 2 lam^2) ds / s^2

With ``s = sigma0 * exp(z)`` the integral runs over ``z`` with Gaussian weight
and is evaluated by Gauss-Legendre quadrature on ``z in [-8 lam, 8 lam]``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize

from .stats import estimate_pdf, moments

logger = logging.getLogger(__name__)

LAMBDA_BOUNDS = (0.01, 3.0)
LAMBDA_FLOOR = 0.05
SPAN = 8.0
DEFAULT_ORDER = 64
MAX_ORDER = 8192
CHUNK_ELEMENTS = 1 << 22
CONVERGENCE_RTOL = 1e-10


class CastaingError(ValueError):
    pass


class QuadratureError(CastaingError):
    pass


@dataclass(frozen=True)
class CastaingParams:
    lam: float
    sigma0: float
    tau: float | None = None

    def __post_init__(self):
        if not (self.lam > 0 and self.sigma0 > 0):
            raise CastaingError(f"lambda and sigma0 must be positive: {self}")


@dataclass(frozen=True)
class CastaingFitResult:
    params: CastaingParams
    nll: float
    kurtosis_implied: float
    converged: bool
    n: int
    normalization: float
    method: str = "mle"
    iterations: int = 0
    gradient_norm: float = float("nan")

    def as_dict(self) -> dict:
        return {
            "tau": self.params.tau,
            "lambda": self.params.lam,
            "sigma0": self.params.sigma0,
            "nll": self.nll,
            "implied_kurtosis": self.kurtosis_implied,
            "converged": self.converged,
            "n": self.n,
            "normalization": self.normalization,
            "method": self.method,
        }


@lru_cache(maxsize=16)
def _gauss_legendre(order: int):
    t, w = np.polynomial.legendre.leggauss(order)
    return SPAN * t, SPAN * w


def _mixture(lam: float, order: int):
    """Log-scale offsets and normalised mixture weights.

    Returns ``(z, weights, norm)`` where ``norm`` is the raw quadrature mass
    of the lognormal weight. It equals one up to truncation, i.e. the
    ``1/(2 pi lam)`` prefactor already normalises the density.
    """
    t, w = _gauss_legendre(order)
    z = lam * t
    raw = w * np.exp(-0.5 * t * t) / np.sqrt(2.0 * np.pi)
    norm = float(raw.sum())
    return z, raw / norm, norm


def _density(x, lam, sigma0, order):
    x = np.asarray(x, dtype=float)
    z, wts, _ = _mixture(lam, order)
    s = sigma0 * np.exp(z)
    coef = -0.5 / s ** 2
    amp = wts / (np.sqrt(2.0 * np.pi) * s)
    x2 = x.reshape(-1, 1) ** 2
    out = np.empty(x2.shape[0])
    step = max(1, CHUNK_ELEMENTS // order)
    for i in range(0, x2.shape[0], step):
        out[i:i + step] = np.exp(x2[i:i + step] * coef) @ amp
    return out.reshape(x.shape)


def auto_order(lam: float, base: int = DEFAULT_ORDER) -> int:
    """Gauss-Legendre order that resolves the density for shape ``lam``.

    The cutoff of the integrand sharpens in proportion to ``lam`` on the
    fixed ``[-8, 8]`` node interval, so the order doubles per doubling of
    ``lam`` above 0.3.
    """
    return int(base * 2 ** int(np.ceil(np.log2(max(1.0, lam / 0.3)))))


def castaing_pdf(x, params: CastaingParams, order: int | None = None, check: bool = True):
    """Castaing density at ``x``.

    The quadrature order starts at ``order`` (default :func:`auto_order`,
    never below 64). With ``check`` set it is doubled until no density
    moves by more than ``1e-10`` relative; :class:`QuadratureError` is
    raised if that does not happen by ``MAX_ORDER``.
    """
    order = max(DEFAULT_ORDER, order or auto_order(params.lam))
    p = _density(x, params.lam, params.sigma0, order)
    if not check:
        return float(p) if np.ndim(p) == 0 else p
    while True:
        if 2 * order > MAX_ORDER:
            raise QuadratureError(f"quadrature not converged by order {MAX_ORDER} (lambda={params.lam})")
        p2 = _density(x, params.lam, params.sigma0, 2 * order)
        # values below the double-precision noise floor are not checked
        mask = np.abs(p2) > 1e-280
        rel = np.abs(p - p2)[mask] / np.abs(p2)[mask]
        if rel.size == 0 or rel.max() <= CONVERGENCE_RTOL:
            break
        order *= 2
        p = p2
    return float(p) if np.ndim(p) == 0 else p


def normalization_constant(lam: float, order: int = DEFAULT_ORDER) -> float:
    """Quadrature mass of the lognormal weight; one means the prefactor is exact."""
    return _mixture(lam, order)[2]


def castaing_moment(k: int, params: CastaingParams, order: int = 128) -> float:
    """Even moment ``E[x^k]`` by quadrature over the lognormal scale.

    ``E[x^k | s] = (k-1)!! s^k`` and the remaining integrand in
    ``t = ln(s/sigma0)/lam`` is a Gaussian centred at ``k lam``, so the
    nodes are placed on ``k lam +- 12`` rather than the density's range.
    """
    if k % 2:
        return 0.0
    t, w = np.polynomial.legendre.leggauss(order)
    t = k * params.lam + 12.0 * t
    w = 12.0 * w * np.exp(-0.5 * t * t) / np.sqrt(2.0 * np.pi)
    dfact = float(np.prod(np.arange(k - 1, 0, -2))) if k > 1 else 1.0
    return float(dfact * params.sigma0 ** k * np.sum(w * np.exp(k * params.lam * t)))


def implied_kurtosis(lam: float, order: int = 128) -> float:
    """Excess kurtosis of the Castaing density with shape ``lam``."""
    if not lam > 0:
        raise CastaingError("lambda must be positive")
    p = CastaingParams(lam, 1.0)
    m2 = castaing_moment(2, p, order)
    m4 = castaing_moment(4, p, order)
    return m4 / m2 ** 2 - 3.0


def lambda_from_kurtosis(gamma: float, floor: float = LAMBDA_FLOOR) -> float:
    """Invert :func:`implied_kurtosis` numerically, clipped to the search bounds."""
    lo, hi = LAMBDA_BOUNDS
    if not np.isfinite(gamma) or gamma <= implied_kurtosis(max(floor, lo)):
        return floor
    if gamma >= implied_kurtosis(hi):
        return hi
    return float(optimize.brentq(lambda lam: implied_kurtosis(lam) - gamma, lo, hi, xtol=1e-12))


def sample_castaing(params: CastaingParams, n: int, rng=None) -> np.ndarray:
    """Draw from the density by compounding a lognormal scale with a Gaussian."""
    rng = np.random.default_rng(rng)
    s = params.sigma0 * np.exp(params.lam * rng.standard_normal(n))
    return s * rng.standard_normal(n)


def castaing_nll(samples, params: CastaingParams, order: int | None = None) -> float:
    order = order or auto_order(params.lam)
    p = _density(np.asarray(samples, dtype=float), params.lam, params.sigma0, order)
    return float(-np.sum(np.log(np.maximum(p, np.finfo(float).tiny))))


def gaussian_nll(samples) -> float:
    """Negative log-likelihood of the maximum-likelihood normal fit."""
    x = np.asarray(samples, dtype=float)
    var = x.var()
    return float(0.5 * x.size * (np.log(2 * np.pi * var) + 1.0))


def _objective_factory(samples, order, method, hist_bins):
    x = np.asarray(samples, dtype=float)
    if method == "mle":
        n = x.size

        def f(theta):
            lam, sig = np.exp(theta)
            return castaing_nll(x, CastaingParams(lam, sig), order) / n

        return f
    if method == "lsq":
        h = estimate_pdf(x, bins=hist_bins)
        keep = h.density > 0
        xc, logd = h.centers[keep], np.log(h.density[keep])

        def f(theta):
            lam, sig = np.exp(theta)
            p = _density(xc, lam, sig, order or auto_order(lam))
            return float(np.mean((np.log(np.maximum(p, 1e-300)) - logd) ** 2))

        return f
    raise CastaingError(f"unknown fit method {method!r}")


def fit_castaing(
    samples,
    tau: float | None = None,
    method: str = "mle",
    order: int | None = None,
    max_iter: int = 400,
    xtol: float = 1e-6,
    grad_tol: float = 1e-4,
    hist_bins: int = 101,
    min_samples: int = 1000,
) -> CastaingFitResult:
    """Fit ``(lambda, sigma0)`` to zero-centred increment samples.

    The optimiser works on ``log lambda`` and ``log sigma0`` so that the
    Nelder-Mead simplex tolerance ``xtol`` is a relative parameter change.
    Starting values are the sample standard deviation and the shape whose
    implied kurtosis matches the sample kurtosis.
    """
    x = np.asarray(samples, dtype=float)
    x = x[np.isfinite(x)]
    if x.size < min_samples:
        raise CastaingError(f"need at least {min_samples} samples, got {x.size}")
    m = moments(x)
    lam0 = lambda_from_kurtosis(m.gamma)
    sig0 = m.sigma
    f = _objective_factory(x, order, method, hist_bins)

    lo_l, hi_l = LAMBDA_BOUNDS
    bounds = [(np.log(lo_l), np.log(hi_l)), (np.log(1e-6 * m.sigma), np.log(1e3 * m.sigma))]
    theta0 = np.clip(np.log([lam0, sig0]), [b[0] for b in bounds], [b[1] for b in bounds])
    simplex = np.array([theta0, theta0 + [0.25, 0.0], theta0 + [0.0, 0.05]])
    simplex = np.clip(simplex, [b[0] for b in bounds], [b[1] for b in bounds])
    res = optimize.minimize(
        f,
        theta0,
        method="Nelder-Mead",
        bounds=bounds,
        options={"xatol": xtol, "fatol": 1e-12, "maxiter": max_iter, "initial_simplex": simplex},
    )
    lam, sig = np.exp(res.x)
    grad = _gradient(f, res.x, bounds)
    gnorm = float(np.linalg.norm(grad))
    converged = bool(res.success) and gnorm < grad_tol
    if not converged:
        logger.warning("Castaing fit did not converge (tau=%s): %s, |grad|=%.3g", tau, res.message, gnorm)
    params = CastaingParams(float(lam), float(sig), tau)
    return CastaingFitResult(
        params=params,
        nll=castaing_nll(x, params, order),
        kurtosis_implied=implied_kurtosis(params.lam),
        converged=converged,
        n=int(x.size),
        normalization=normalization_constant(params.lam, order or auto_order(params.lam)),
        method=method,
        iterations=int(res.nit),
        gradient_norm=gnorm,
    )


def _gradient(f, theta, bounds, h=1e-5):
    """Central differences; one-sided at an active bound, which counts as stationary."""
    g = np.zeros_like(theta)
    for i in range(theta.size):
        lo, hi = bounds[i]
        if theta[i] - h < lo or theta[i] + h > hi:
            side = theta.copy()
            if theta[i] - h < lo:
                side[i] += h
                d = (f(side) - f(theta)) / h
                g[i] = min(d, 0.0)  # pushing further into the bound is not descent
            else:
                side[i] -= h
                d = (f(theta) - f(side)) / h
                g[i] = max(d, 0.0)
            continue
        e = np.zeros_like(theta)
        e[i] = h
        g[i] = (f(theta + e) - f(theta - e)) / (2 * h)
    return g
