"""Angle-of-attack changes on a rotating blade section.

The blade section at radius ``r`` moves with tangential speed ``T`` (either
``lambda_T * r / R * u_bar`` for a fixed tip-speed-ratio rotor or
``2 pi r n_r / 60`` for a fixed-rpm rotor). The inflow reaching the rotor is
decelerated by the blockage factor and may be yawed by ``dphi`` relative to
the reference direction. With the pitch held at the reference setting, the
change in angle of attack equals the change of the inflow angle of the
apparent wind.

Angles are passed in and returned in degrees; the arithmetic is in radians.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from .stats import IncrementSeries, StatsError, moments, wrap180
from .wind_data import WindSeries, moving_average

#: Tolerance for clamping an arccos argument that drifted beyond +-1.
ARCCOS_TOL = 1e-12


class AoaError(ValueError):
    pass


class Mode(str, Enum):
    FIXED_TSR = "tsr"
    FIXED_RPM = "rpm"


@dataclass(frozen=True)
class TurbineConfig:
    mode: Mode = Mode.FIXED_TSR
    lambda_T: float = 7.0
    n_r: float = 15.0
    R: float = 40.0
    r: float = 20.0
    tau_a: float = 2.0
    blockage: float = 2.0 / 3.0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not 0 < self.r <= self.R:
            raise AoaError(f"blade station must satisfy 0 < r <= R, got r={self.r}, R={self.R}")
        if not 0 < self.blockage <= 1:
            raise AoaError(f"blockage factor must lie in (0, 1], got {self.blockage}")
        if self.mode is Mode.FIXED_TSR and not self.lambda_T > 0:
            raise AoaError("lambda_T must be positive")
        if self.mode is Mode.FIXED_RPM and not self.n_r > 0:
            raise AoaError("n_r must be positive")
        if not self.tau_a > 0:
            raise AoaError("tau_a must be positive")

    @classmethod
    def fixed_tsr(cls, lambda_T: float = 7.0, **kw) -> "TurbineConfig":
        return cls(mode=Mode.FIXED_TSR, lambda_T=lambda_T, **kw)

    @classmethod
    def fixed_rpm(cls, n_r: float, **kw) -> "TurbineConfig":
        return cls(mode=Mode.FIXED_RPM, n_r=n_r, **kw)

    @property
    def local_tsr(self) -> float:
        return self.lambda_T * self.r / self.R

    @property
    def label(self) -> str:
        if self.mode is Mode.FIXED_TSR:
            return f"lambda_T={self.lambda_T:g}"
        return f"n_rpm={self.n_r:g}"

    def as_dict(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        return d


@dataclass(frozen=True)
class RateSummary:
    tau: float
    sigma_rate: float
    max_rate: float


def delta_phi(phi_new, phi_ref):
    """Yaw change ``phi_new - phi_ref`` wrapped to (-180, 180] degrees."""
    return wrap180(np.asarray(phi_new, dtype=float) - np.asarray(phi_ref, dtype=float))


def u_rpm(n_r, r):
    """Tangential speed (m/s) of a station at radius ``r`` turning at ``n_r`` rpm."""
    n_r = np.asarray(n_r, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(n_r <= 0) or np.any(r <= 0):
        raise AoaError("rotor speed and radius must be positive")
    out = 2.0 * np.pi * r * n_r / 60.0
    return float(out) if out.ndim == 0 else out


def _safe_arccos(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + ARCCOS_TOL):
        raise AoaError("arccos argument outside [-1, 1] beyond rounding tolerance")
    return np.arccos(np.clip(x, -1.0, 1.0))


def _inflow_angle(tangential, u_new, dphi_rad, blockage):
    """Signed inflow angle of the apparent wind (radians).

    Law-of-cosines form; the arccos branch is mirrored when the axial
    component ``blockage * u_new * cos(dphi)`` is negative.
    """
    a = blockage * u_new
    s = np.sin(dphi_rad)
    num = tangential - a * s
    den = np.sqrt(tangential ** 2 + a ** 2 - 2.0 * a * tangential * s)
    with np.errstate(invalid="ignore", divide="ignore"):
        ang = _safe_arccos(np.where(den > 0, num / np.where(den > 0, den, 1.0), 1.0))
    return np.where(np.cos(dphi_rad) < 0, -ang, ang)


def _as_out(x):
    x = np.rad2deg(x)
    return float(x) if np.ndim(x) == 0 else x


def delta_aoa_fixed_tsr(u_bar, u_new, dphi, cfg: TurbineConfig):
    """AOA change for a rotor tracking a constant tip-speed ratio."""
    if cfg.mode is not Mode.FIXED_TSR:
        raise AoaError("configuration is not a fixed tip-speed-ratio rotor")
    u_bar = np.asarray(u_bar, dtype=float)
    if np.any(u_bar <= 0):
        raise AoaError("reference wind speed must be positive")
    lr = cfg.local_tsr
    # numerator and denominator divided by u_bar; the reference term
    # arctan(blockage / lr) is written in the same arccos form
    ratio = np.asarray(u_new, dtype=float) / u_bar
    new = _inflow_angle(lr, ratio, np.deg2rad(dphi), cfg.blockage)
    ref = _inflow_angle(lr, 1.0, 0.0, cfg.blockage)
    return _as_out(new - ref)


def delta_aoa_fixed_rpm(u_bar, u_new, dphi, cfg: TurbineConfig):
    """AOA change for a rotor at constant rotational speed."""
    if cfg.mode is not Mode.FIXED_RPM:
        raise AoaError("configuration is not a fixed-rpm rotor")
    ut = u_rpm(cfg.n_r, cfg.r)
    u_bar = np.asarray(u_bar, dtype=float)
    a_ref = cfg.blockage * u_bar
    new = _inflow_angle(ut, np.asarray(u_new, dtype=float), np.deg2rad(dphi), cfg.blockage)
    ref = _safe_arccos(ut / np.sqrt(ut ** 2 + a_ref ** 2))
    return _as_out(new - ref)


def delta_aoa_yaw_only_tsr(dphi, cfg: TurbineConfig):
    """Fixed tip-speed-ratio AOA change from a yaw change at constant wind speed."""
    if cfg.mode is not Mode.FIXED_TSR:
        raise AoaError("configuration is not a fixed tip-speed-ratio rotor")
    lr = cfg.local_tsr
    new = _inflow_angle(lr, 1.0, np.deg2rad(dphi), cfg.blockage)
    return _as_out(new - _inflow_angle(lr, 1.0, 0.0, cfg.blockage))


def delta_aoa_yaw_only_rpm(u_bar, dphi, cfg: TurbineConfig):
    """Fixed-rpm AOA change from a yaw change at constant wind speed ``u_bar``."""
    u_bar = np.asarray(u_bar, dtype=float)
    if np.any(u_bar <= 0):
        raise AoaError("reference wind speed must be positive")
    return delta_aoa_fixed_rpm(u_bar, u_bar, dphi, cfg)


def delta_aoa(u_ref, u_new, dphi, cfg: TurbineConfig, yaw_only: bool = False):
    """Dispatch to the formula matching ``cfg.mode``."""
    if cfg.mode is Mode.FIXED_TSR:
        if yaw_only:
            return delta_aoa_yaw_only_tsr(dphi, cfg)
        return delta_aoa_fixed_tsr(u_ref, u_new, dphi, cfg)
    if yaw_only:
        return delta_aoa_yaw_only_rpm(u_ref, dphi, cfg)
    return delta_aoa_fixed_rpm(u_ref, u_new, dphi, cfg)


def aoa_increment_series(
    series: WindSeries,
    cfg: TurbineConfig,
    tau: float,
    case: str = "b",
    yaw_only: bool = False,
) -> IncrementSeries:
    """AOA changes over ``tau`` for every admissible time index.

    Cases ``a`` and ``b`` compare the sample at ``t + tau`` with the trailing
    ``cfg.tau_a`` averages at ``t``; the two differ only through
    ``cfg.mode``. Case ``c`` uses the raw sample at ``t`` as reference.
    """
    case = case.lower()
    if case not in ("a", "b", "c"):
        raise AoaError(f"unknown case {case!r}")
    if case == "a" and cfg.mode is not Mode.FIXED_TSR:
        raise AoaError("case a needs a fixed tip-speed-ratio configuration")
    if case == "b" and cfg.mode is not Mode.FIXED_RPM:
        raise AoaError("case b needs a fixed-rpm configuration")
    k = series.lag(tau)
    n = len(series)
    if case == "c":
        u_ref, phi_ref, ref_ok = series.u, series.phi, series.valid
    else:
        avg = moving_average(series, cfg.tau_a)
        u_ref, phi_ref, ref_ok = avg.u_bar, avg.phi_bar, avg.valid & series.valid
    ok = ref_ok[: n - k] & series.valid[k:] & (np.nan_to_num(u_ref[: n - k]) > 0)
    idx = np.flatnonzero(ok)
    if idx.size == 0:
        raise AoaError(f"no admissible index for tau={tau} s")
    ur = u_ref[idx]
    dphi = delta_phi(series.phi[idx + k], phi_ref[idx])
    un = ur if yaw_only else series.u[idx + k]
    values = np.asarray(delta_aoa(ur, un, dphi, cfg, yaw_only), dtype=float)
    label = f"aoa:{case}" + (":yaw" if yaw_only else "")
    return IncrementSeries(float(tau), values, label, idx, series.rate)


def conditional_series(series: WindSeries, u_min: float, u_max: float) -> WindSeries:
    """Flag samples with speed outside ``[u_min, u_max]`` (inclusive)."""
    if not u_min < u_max:
        raise AoaError("u_min must be below u_max")
    with np.errstate(invalid="ignore"):
        inside = (series.u >= u_min) & (series.u <= u_max)
    return series.with_valid(series.valid & inside)


def rate_stats(incs: IncrementSeries) -> RateSummary:
    x = np.asarray(incs.values, dtype=float)
    if x.size == 0:
        raise AoaError("no increments")
    if not incs.tau > 0:
        raise AoaError("increments need a positive tau")
    return RateSummary(float(incs.tau), float(x.std() / incs.tau), float(np.abs(x).max() / incs.tau))


def aoa_table_row(incs: IncrementSeries, cfg: TurbineConfig) -> dict:
    """Moments of AOA increments laid out as Type / Skewness / Kurtosis / sigma."""
    try:
        m = moments(incs)
        skew, kurt, sigma = m.nu, m.gamma, m.sigma
        degenerate = False
    except StatsError:
        # constant AOA: report a zero row rather than undefined ratios
        skew, kurt, sigma, degenerate = 0.0, 0.0, 0.0, True
    return {
        "Type": cfg.label,
        "Skewness": skew,
        "Kurtosis": kurt,
        "sigma": sigma,
        "n": len(incs),
        "degenerate": degenerate,
    }
