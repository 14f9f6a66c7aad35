"""Synthetic wind series with known increment statistics.

The generators serve as verification oracles. ``gaussian`` draws i.i.d.
normal speed and direction, the Gaussian null model. ``fbm`` builds
fractional Brownian motion by circulant embedding, so the increment standard
deviation scales exactly as ``tau**H``. ``intermittent`` drives
mean-reverting speed and direction with noise modulated by a lognormal
volatility that has a fast AR(1) part and a slow, smooth part. The slow part
also sets the local mean speed, so gusty periods are windy periods and the
turbulence intensity stays constant.

Every generator is deterministic for a fixed seed.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.signal import lfilter

from .wind_data import WindSeries, wrap360

logger = logging.getLogger(__name__)

MIN_SPEED = 0.1
KINDS = ("gaussian", "fbm", "intermittent")


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class SynthSpec:
    kind: str = "intermittent"
    n: int = 100_000
    rate: float = 10.0
    seed: int = 0
    u_mean: float = 7.0
    u_sigma: float = 1.0
    hurst: float = 1.0 / 3.0
    vol_lambda: float = 0.5
    dir_sigma: float = 10.0
    dir_vol_lambda: float = 0.5
    dir_base: float = 270.0
    vol_tau: float = 1.0
    level_tau: float = 1800.0
    reversion_tau: float = 60.0
    coupling: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SynthError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if int(self.n) < 2:
            raise SynthError("n must be at least 2")
        if not self.rate > 0:
            raise SynthError("rate must be positive")
        if self.u_sigma < 0 or self.dir_sigma < 0 or self.vol_lambda < 0 or self.dir_vol_lambda < 0:
            raise SynthError("widths must be non-negative")
        if self.kind == "fbm" and not 0 < self.hurst < 1:
            raise SynthError("Hurst exponent must lie in (0, 1)")
        if not -1 <= self.coupling <= 1:
            raise SynthError("coupling must lie in [-1, 1]")
        if min(self.vol_tau, self.level_tau, self.reversion_tau) <= 0:
            raise SynthError("time constants must be positive")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "seed", int(self.seed))

    def as_dict(self) -> dict:
        return asdict(self)


def _finish(spec: SynthSpec, u: np.ndarray, phi: np.ndarray) -> WindSeries:
    clipped = int(np.count_nonzero(u < MIN_SPEED))
    if clipped:
        logger.warning("%d synthetic speeds clipped at %.1f m/s", clipped, MIN_SPEED)
    u = np.maximum(u, MIN_SPEED)
    meta = {"source": f"synth:{spec.kind}", "seed": spec.seed, "clipped": clipped, "spec": spec.as_dict()}
    return WindSeries(u, wrap360(phi), np.ones(spec.n, dtype=bool), spec.rate, meta)


def gen_gaussian(spec: SynthSpec) -> WindSeries:
    if spec.kind != "gaussian":
        raise SynthError("spec.kind must be 'gaussian'")
    rng = np.random.default_rng(spec.seed)
    u = spec.u_mean + spec.u_sigma * rng.standard_normal(spec.n)
    phi = spec.dir_base + spec.dir_sigma * rng.standard_normal(spec.n)
    return _finish(spec, u, phi)


def fgn_autocovariance(k, hurst: float) -> np.ndarray:
    """Autocovariance of unit-variance fractional Gaussian noise at lag ``k``."""
    k = np.abs(np.asarray(k, dtype=float))
    h2 = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** h2 - 2 * k ** h2 + np.abs(k - 1) ** h2)


def fgn(n: int, hurst: float, rng, size: int | None = None) -> np.ndarray:
    """Fractional Gaussian noise by Davies-Harte circulant embedding.

    Returns shape ``(n,)`` or ``(size, n)``.
    """
    m = 2 * n
    row = fgn_autocovariance(np.concatenate((np.arange(n + 1), np.arange(n - 1, 0, -1))), hurst)
    eig = np.fft.fft(row).real
    if eig.min() < -1e-10 * eig.max():
        raise SynthError(f"circulant embedding failed for H={hurst}, n={n}")
    eig = np.clip(eig, 0.0, None)
    shape = (m,) if size is None else (size, m)
    w = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(eig / m)
    return np.fft.fft(w, axis=-1)[..., :n].real


def gen_fbm(spec: SynthSpec) -> WindSeries:
    """Speed ``u_mean + u_sigma * B_H`` with ``B_H`` normalised to unit sample std.

    Direction is an independent fBm path with the same Hurst exponent,
    scaled to ``dir_sigma`` around ``dir_base``.
    """
    if spec.kind != "fbm":
        raise SynthError("spec.kind must be 'fbm'")
    rng = np.random.default_rng(spec.seed)

    def path():
        b = np.concatenate(([0.0], np.cumsum(fgn(spec.n - 1, spec.hurst, rng))))
        sd = b.std()
        return (b - b.mean()) / sd if sd > 0 else b * 0.0

    u = spec.u_mean + spec.u_sigma * path()
    phi = spec.dir_base + spec.dir_sigma * path()
    return _finish(spec, u, phi)


def _ar1(noise: np.ndarray, rho: float, x0: float = 0.0) -> np.ndarray:
    """``x[k] = rho * x[k-1] + noise[k]`` with ``x[-1] = x0``."""
    zi = np.array([rho * x0])
    return lfilter([1.0], [1.0, -rho], noise, zi=zi)[0]


def _stationary_ar1(n: int, rho: float, std: float, rng) -> np.ndarray:
    if std == 0:
        return np.zeros(n)
    innov = std * np.sqrt(1 - rho ** 2) * rng.standard_normal(n)
    return _ar1(innov, rho, std * rng.standard_normal())


def _smooth_ar1(n: int, dt: float, tau: float, std: float, rng) -> np.ndarray:
    """Stationary AR(1) on a coarse grid, linearly interpolated to ``n`` samples."""
    if std == 0:
        return np.zeros(n)
    step = tau / 4.0
    nk = int(np.ceil(n * dt / step)) + 2
    knots = _stationary_ar1(nk, np.exp(-step / tau), std, rng)
    return np.interp(np.arange(n) * dt, np.arange(nk) * step, knots)


def _log_volatility(spec: SynthSpec, width: float, rng):
    """Fast and slow parts of a log-volatility with total std ``width``."""
    dt = 1.0 / spec.rate
    part = width / np.sqrt(2.0)
    fast = _stationary_ar1(spec.n, np.exp(-dt / spec.vol_tau), part, rng)
    slow = _smooth_ar1(spec.n, dt, spec.level_tau, part, rng)
    return fast, slow, part ** 2


def gen_intermittent(spec: SynthSpec) -> WindSeries:
    if spec.kind != "intermittent":
        raise SynthError("spec.kind must be 'intermittent'")
    rng = np.random.default_rng(spec.seed)
    dt = 1.0 / spec.rate
    rho = np.exp(-dt / spec.reversion_tau)
    gain = np.sqrt(1 - rho ** 2)

    fast, slow, var = _log_volatility(spec, spec.vol_lambda, rng)
    # level has unit mean; amplitude keeps E[a^2] = 1 around it
    level = spec.u_mean * np.exp(slow - var / 2)
    amp = np.exp(fast - var)
    eps_u = rng.standard_normal(spec.n)
    x = _ar1(spec.u_sigma * gain * (level / spec.u_mean) * amp * eps_u, rho)
    u = level + x

    dfast, dslow, dvar = _log_volatility(spec, spec.dir_vol_lambda, rng)
    damp = np.exp(dfast + dslow - 2 * dvar)
    eps_d = rng.standard_normal(spec.n)
    if spec.coupling:
        eps_d = spec.coupling * eps_u + np.sqrt(1 - spec.coupling ** 2) * eps_d
    psi = _ar1(spec.dir_sigma * gain * damp * eps_d, rho)
    return _finish(spec, u, spec.dir_base + psi)


def generate(spec: SynthSpec) -> WindSeries:
    return {"gaussian": gen_gaussian, "fbm": gen_fbm, "intermittent": gen_intermittent}[spec.kind](spec)


def spec_from_dict(d: dict) -> SynthSpec:
    fields = SynthSpec.__dataclass_fields__
    unknown = set(d) - set(fields)
    if unknown:
        raise SynthError(f"unknown synth parameters: {sorted(unknown)}")
    conv = {}
    for k, v in d.items():
        if k == "kind":
            conv[k] = str(v)
        elif k in ("n", "seed"):
            conv[k] = int(float(v))
        else:
            conv[k] = float(v)
    return replace(SynthSpec(kind=conv.get("kind", "intermittent")), **conv)
