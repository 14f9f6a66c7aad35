"""Scale-resolved increment statistics.

Increments, moments, histograms, power-law regressions, structure
functions and the gust directional index (GDI). All estimators use the
population (1/n) form.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .wind_data import WindDataError, WindSeries


class StatsError(ValueError):
    pass


class DegenerateGdiError(StatsError):
    """A GDI denominator is zero (constant speed or direction)."""


@dataclass(frozen=True)
class IncrementSeries:
    """Increments at a single time scale ``tau`` (seconds).

    ``index`` holds the start sample of every pair, so ``t = index / rate``.
    """

    tau: float
    values: np.ndarray
    source: str = "speed"
    index: np.ndarray | None = None
    rate: float | None = None

    def __len__(self):
        return self.values.size

    @property
    def t(self) -> np.ndarray | None:
        if self.index is None or self.rate is None:
            return None
        return self.index / self.rate


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    density: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def integral(self) -> float:
        return float(np.sum(self.density * self.widths))


@dataclass(frozen=True)
class DistributionSummary:
    sigma: float
    nu: float
    gamma: float
    n: int
    mean: float = 0.0
    histogram: Histogram | None = field(default=None, repr=False)

    def as_dict(self) -> dict:
        return {"n": self.n, "mean": self.mean, "sigma": self.sigma, "skewness": self.nu, "kurtosis": self.gamma}


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    prefactor: float
    r_squared: float
    tau_range: tuple
    n_points: int

    def __call__(self, tau):
        return self.prefactor * np.power(tau, self.exponent)

    def crossing(self, level: float) -> float:
        """Scale at which the fitted law reaches ``level``."""
        if level <= 0 or self.exponent == 0:
            raise StatsError("crossing requires a positive level and nonzero exponent")
        return float((level / self.prefactor) ** (1.0 / self.exponent))

    def as_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "r_squared": self.r_squared,
            "tau_range": list(self.tau_range),
            "n_points": self.n_points,
        }


@dataclass(frozen=True)
class GdiSeries:
    tau: float
    t: np.ndarray
    gdi: np.ndarray
    max_du: float
    max_dphi: float


def wrap180(d):
    """Map angle differences to (-180, 180]."""
    d = np.asarray(d, dtype=float)
    out = 180.0 - np.mod(180.0 - d, 360.0)
    return out


def _pairs(n: int, valid, k: int):
    valid = np.ones(n, dtype=bool) if valid is None else np.asarray(valid, dtype=bool)
    if valid.size != n:
        raise StatsError("valid mask length does not match the series")
    ok = valid[:-k] & valid[k:]
    return np.flatnonzero(ok)


def _lag(tau: float, rate: float, n: int) -> int:
    k = tau * rate
    ki = int(round(k))
    if ki < 1 or abs(k - ki) > 1e-9 * max(1.0, k):
        raise StatsError(f"tau={tau} s is not a positive multiple of the sample period {1 / rate} s")
    if ki >= n:
        raise StatsError(f"tau={tau} s is not shorter than the series")
    return ki


def increments(x, tau: float, rate: float, valid=None, source: str = "speed") -> IncrementSeries:
    """Increments ``x(t + tau) - x(t)`` over pairs of valid samples."""
    x = np.asarray(x, dtype=float)
    k = _lag(tau, rate, x.size)
    idx = _pairs(x.size, valid, k)
    return IncrementSeries(float(tau), x[idx + k] - x[idx], source, idx, float(rate))


def angular_increments(phi, tau: float, rate: float, valid=None, source: str = "direction") -> IncrementSeries:
    """Direction increments wrapped to (-180, 180] degrees."""
    inc = increments(phi, tau, rate, valid, source)
    return IncrementSeries(inc.tau, wrap180(inc.values), source, inc.index, inc.rate)


def speed_increments(series: WindSeries, tau: float) -> IncrementSeries:
    return increments(series.u, tau, series.rate, series.valid, "speed")


def direction_increments(series: WindSeries, tau: float) -> IncrementSeries:
    return angular_increments(series.phi, tau, series.rate, series.valid, "direction")


def moments(values) -> DistributionSummary:
    """Biased (population) moment estimators of ``values``."""
    x = np.asarray(getattr(values, "values", values), dtype=float)
    n = x.size
    if n < 3:
        raise StatsError(f"need at least 3 values for moments, got {n}")
    mean = x.mean()
    d = x - mean
    m2 = np.mean(d * d)
    if not m2 > 0:
        raise StatsError("zero variance")
    m3 = np.mean(d ** 3)
    m4 = np.mean(d ** 4)
    return DistributionSummary(
        sigma=float(np.sqrt(m2)),
        nu=float(m3 / m2 ** 1.5),
        gamma=float(m4 / m2 ** 2 - 3.0),
        n=int(n),
        mean=float(mean),
    )


def estimate_pdf(values, bins: int = 101, width_sigmas: float = 6.0, range=None) -> Histogram:
    """Density histogram over ``mean +- width_sigmas * sigma``.

    Values outside the range are counted in the edge bins, so the density
    always integrates to one.
    """
    x = np.asarray(getattr(values, "values", values), dtype=float)
    if x.size < bins:
        raise StatsError(f"need at least {bins} values for {bins} bins")
    if range is None:
        mu, sd = x.mean(), x.std()
        lo, hi = mu - width_sigmas * sd, mu + width_sigmas * sd
    else:
        lo, hi = range
    if not hi > lo:
        raise StatsError("zero-width histogram range")
    edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(np.clip(x, lo, hi), bins=edges)
    density = counts / (x.size * np.diff(edges))
    return Histogram(edges, density)


def summarize(values, **pdf_kwargs) -> DistributionSummary:
    s = moments(values)
    return DistributionSummary(s.sigma, s.nu, s.gamma, s.n, s.mean, estimate_pdf(values, **pdf_kwargs))


def powerlaw_fit(tau, y, tau_range=None) -> PowerLawFit:
    """Least-squares line through ``(log tau, log y)`` inside ``tau_range``."""
    tau = np.asarray(tau, dtype=float)
    y = np.asarray(y, dtype=float)
    if tau_range is None:
        tau_range = (tau.min(), tau.max())
    lo, hi = tau_range
    sel = (tau >= lo * (1 - 1e-12)) & (tau <= hi * (1 + 1e-12))
    if sel.sum() < 3:
        raise StatsError("need at least 3 points inside the fit range")
    ts, ys = tau[sel], y[sel]
    if np.any(ys <= 0) or np.any(ts <= 0):
        raise StatsError("power-law fit needs positive tau and y")
    lx, ly = np.log(ts), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(float(slope), float(np.exp(intercept)), float(r2), (float(lo), float(hi)), int(sel.sum()))


def structure_function(x, order: int, tau: float, rate: float, valid=None) -> float:
    """Mean of the ``order``-th power of increments at lag ``tau``."""
    if order < 1:
        raise StatsError("structure function order must be >= 1")
    inc = increments(x, tau, rate, valid)
    if inc.values.size == 0:
        raise StatsError("no admissible increments")
    return float(np.mean(inc.values ** order))


def gdi(series: WindSeries, tau: float) -> GdiSeries:
    """Gust directional index per admissible time.

    Each term is an absolute increment normalised by the largest absolute
    increment of that quantity over the whole valid series at ``tau``.
    """
    try:
        du = speed_increments(series, tau)
    except WindDataError as exc:  # pragma: no cover - same checks as _lag
        raise StatsError(str(exc)) from exc
    dphi = direction_increments(series, tau)
    if du.values.size < 2:
        raise StatsError("GDI needs at least two valid increment pairs")
    a = np.abs(du.values)
    b = np.abs(dphi.values)
    ma, mb = a.max(), b.max()
    if ma == 0:
        raise DegenerateGdiError(f"all speed increments are zero at tau={tau} s")
    if mb == 0:
        raise DegenerateGdiError(f"all direction increments are zero at tau={tau} s")
    return GdiSeries(float(tau), du.t, a / ma + b / mb, float(ma), float(mb))


def exceedance_probability(values, threshold: float) -> float:
    x = np.asarray(getattr(values, "gdi", values), dtype=float)
    if x.size == 0:
        raise StatsError("no values")
    return float(np.count_nonzero(x >= threshold) / x.size)


def taylor_length(tau: float, u_mean: float) -> float:
    """Spatial separation ``u_mean * tau`` under frozen turbulence."""
    if not u_mean > 0:
        raise StatsError("mean speed must be positive")
    return u_mean * tau
