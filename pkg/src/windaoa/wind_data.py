"""Wind time series containers and their preprocessing.

A :class:`WindSeries` holds uniformly sampled speed and direction records
together with a boolean validity mask. Filters never drop samples; they only
clear validity flags so that index positions (and therefore time lags) are
preserved for increment statistics downstream.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping

import numpy as np
import pandas as pd

#: Relative tolerance on sample spacing when timestamps are supplied.
SPACING_RTOL = 1e-6


class WindDataError(ValueError):
    """Raised for wind data that cannot be read or is inconsistent."""


@dataclass(frozen=True)
class WindSample:
    t: float
    u: float
    phi: float
    valid: bool


def _readonly(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def wrap360(phi):
    """Map directions to [0, 360)."""
    out = np.mod(phi, 360.0)
    # np.mod(-1e-15, 360) rounds to 360.0
    return np.where(out >= 360.0, 0.0, out)


def circular_mean(phi, axis=None):
    """Vector mean of directions in degrees, returned in [0, 360).

    Angles are taken relative to the first direction along ``axis`` so a
    constant input is returned exactly.
    """
    phi = np.asarray(phi, dtype=float)
    ref = phi.reshape(-1)[0] if axis is None else np.expand_dims(np.take(phi, 0, axis=axis), axis)
    rad = np.deg2rad(phi - ref)
    s = np.mean(np.sin(rad), axis=axis)
    c = np.mean(np.cos(rad), axis=axis)
    ref = ref if axis is None else np.squeeze(ref, axis)
    return wrap360(ref + np.rad2deg(np.arctan2(s, c)))


@dataclass(frozen=True)
class WindSeries:
    """Uniformly sampled wind speed (m/s) and direction (deg) records.

    Arrays are stored read-only; every operation returns a new series.
    """

    u: np.ndarray
    phi: np.ndarray
    valid: np.ndarray
    rate: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.rate > 0:
            raise WindDataError(f"sampling rate must be positive, got {self.rate}")
        u = _readonly(self.u)
        phi = _readonly(self.phi)
        valid = np.array(self.valid, dtype=bool, copy=True)
        if not (u.shape == phi.shape == valid.shape) or u.ndim != 1:
            raise WindDataError("series arrays must be 1-D with equal length")
        if u.size == 0:
            raise WindDataError("empty series")
        # non-finite or out-of-range records are never valid
        valid &= np.isfinite(u) & np.isfinite(phi) & (u >= 0)
        phi = wrap360(phi)
        phi.setflags(write=False)
        valid.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "valid", valid)
        object.__setattr__(self, "rate", float(self.rate))
        object.__setattr__(self, "meta", dict(self.meta))

    def __len__(self) -> int:
        return self.u.size

    def __iter__(self) -> Iterator[WindSample]:
        for i in range(len(self)):
            yield self.sample(i)

    @property
    def dt(self) -> float:
        return 1.0 / self.rate

    @property
    def t(self) -> np.ndarray:
        return np.arange(len(self)) / self.rate

    def sample(self, i: int) -> WindSample:
        return WindSample(float(i / self.rate), float(self.u[i]), float(self.phi[i]), bool(self.valid[i]))

    def with_valid(self, valid: np.ndarray) -> "WindSeries":
        return WindSeries(self.u, self.phi, valid, self.rate, self.meta)

    def lag(self, tau: float) -> int:
        """Number of samples corresponding to the time scale ``tau``."""
        k = tau * self.rate
        ki = int(round(k))
        if ki < 1 or abs(k - ki) > 1e-9 * max(1.0, k):
            raise WindDataError(f"tau={tau} s is not a positive multiple of the sample period {self.dt} s")
        if ki >= len(self):
            raise WindDataError(f"tau={tau} s is not shorter than the series ({len(self)} samples)")
        return ki

    def summary(self, period: float = 600.0) -> dict:
        """Mean speed and turbulence intensity over valid samples.

        Turbulence intensity is the average of per-period standard deviations
        (10 min blocks by default) divided by the overall mean speed.
        """
        n_valid = int(self.valid.sum())
        out = {
            "n": len(self),
            "n_valid": n_valid,
            "rate": self.rate,
            "duration": len(self) / self.rate,
            "u_mean": None,
            "turbulence_intensity": None,
            "phi_mean": None,
            "empty_valid_set": n_valid == 0,
        }
        if n_valid == 0:
            return out
        u = self.u[self.valid]
        u_mean = float(u.mean())
        block = max(1, int(round(period * self.rate)))
        stds = []
        for start in range(0, len(self), block):
            sl = slice(start, start + block)
            ub = self.u[sl][self.valid[sl]]
            if ub.size >= 2:
                stds.append(ub.std())
        out["u_mean"] = u_mean
        if stds and u_mean > 0:
            out["turbulence_intensity"] = float(np.mean(stds) / u_mean)
        out["phi_mean"] = float(circular_mean(self.phi[self.valid]))
        return out

    def summary_json(self, **kwargs) -> str:
        return json.dumps(self.summary(**kwargs), indent=2, sort_keys=True)


@dataclass(frozen=True)
class AveragedSeries:
    """Trailing moving averages; ``valid`` is False during warm-up and sparse windows."""

    u_bar: np.ndarray
    phi_bar: np.ndarray
    valid: np.ndarray
    window: float


def components_to_polar(ux, uy):
    """Speed and meteorological direction from horizontal wind components.

    ``ux`` points east and ``uy`` north (direction of travel). The returned
    direction is where the wind blows *from*, clockwise from north, so a
    southerly wind (``ux=0, uy>0``) gives 180 degrees.
    """
    ux = np.asarray(ux, dtype=float)
    uy = np.asarray(uy, dtype=float)
    speed = np.hypot(ux, uy)
    phi = wrap360(np.rad2deg(np.arctan2(-ux, -uy)))
    return speed, phi


def _resolve(df: pd.DataFrame, key) -> pd.Series:
    if isinstance(key, int) or (isinstance(key, str) and key.isdigit() and key not in df.columns):
        return df.iloc[:, int(key)]
    if key not in df.columns:
        raise WindDataError(f"column {key!r} not found; available: {list(df.columns)}")
    return df[key]


def _sniff_delimiter(path: Path) -> str:
    with open(path, encoding="utf-8", errors="replace") as fh:
        for line in fh:
            if line.strip() and not line.lstrip().startswith("#"):
                break
        else:
            raise WindDataError(f"{path} contains no data rows")
    for cand in ("\t", ",", ";"):
        if cand in line:
            return cand
    return r"\s+"


def load_series(
    path,
    columns: Mapping[str, object] | None = None,
    rate: float | None = None,
    header: bool = True,
    sep: str | None = None,
) -> WindSeries:
    """Read a delimited text file into a :class:`WindSeries`.

    Parameters
    ----------
    path : path-like
        CSV/TSV file. Lines starting with ``#`` are treated as comments.
    columns : mapping, optional
        Maps the logical names ``t``, ``u``, ``phi``, ``ux``, ``uy`` to column
        names (or integer positions when ``header`` is False). Defaults to
        ``{"t": "t", "u": "u", "phi": "phi"}`` with ``t`` optional.
    rate : float, optional
        Sampling rate in Hz. Inferred from the ``t`` column when omitted.
    header : bool
        Whether the first non-comment line holds column names.
    sep : str, optional
        Delimiter; sniffed from the file when omitted.

    Rows whose speed or direction cannot be parsed are kept and flagged
    invalid.
    """
    path = Path(path)
    if not path.is_file():
        raise WindDataError(f"cannot read {path}")
    if sep is None:
        sep = _sniff_delimiter(path)
    try:
        df = pd.read_csv(
            path,
            sep=sep,
            comment="#",
            header=0 if header else None,
            dtype=str,
            skipinitialspace=True,
        )
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise WindDataError(f"cannot parse {path}: {exc}") from exc
    if len(df) == 0:
        raise WindDataError(f"{path} contains no data rows")
    if header:
        df.columns = [str(c).strip() for c in df.columns]

    cols = dict(columns) if columns else {}
    if not cols and not header:
        cols = {"t": 0, "u": 1, "phi": 2} if df.shape[1] >= 3 else {"u": 0, "phi": 1}
    elif not cols:
        cols = {"u": "u", "phi": "phi"}
        if header and "t" in df.columns:
            cols["t"] = "t"
        if header and "u" not in df.columns and {"ux", "uy"} <= set(df.columns):
            cols = {k: k for k in ("ux", "uy")} | ({"t": "t"} if "t" in df.columns else {})

    def num(key):
        s = _resolve(df, cols[key])
        return pd.to_numeric(s.str.strip(), errors="coerce").to_numpy(dtype=float)

    if "u" in cols and "phi" in cols:
        u = num("u")
        phi = num("phi")
    elif "ux" in cols and "uy" in cols:
        u, phi = components_to_polar(num("ux"), num("uy"))
    else:
        raise WindDataError("column map must provide (u, phi) or (ux, uy)")

    valid = np.isfinite(u) & np.isfinite(phi) & (u >= 0)

    if "t" in cols:
        t = num("t")
        good = np.isfinite(t)
        if good.sum() >= 2:
            idx = np.flatnonzero(good)
            steps = np.diff(t[idx]) / np.diff(idx)
            step = float(np.median(steps))
            if step <= 0:
                raise WindDataError("timestamps must be strictly increasing")
            expected = t[idx[0]] + (idx - idx[0]) * step
            if np.max(np.abs(t[idx] - expected)) > SPACING_RTOL * max(step, 1.0) + 1e-9:
                raise WindDataError("timestamps are not uniformly spaced")
            inferred = 1.0 / step
            if rate is None:
                rate = inferred
            elif abs(inferred - rate) > SPACING_RTOL * rate:
                raise WindDataError(f"timestamps imply {inferred} Hz but rate={rate} Hz was given")
    if rate is None:
        raise WindDataError("sampling rate unknown: supply rate= or a t column")

    return WindSeries(u, phi, valid, rate, {"source": str(path)})


def _text_float(x: float, digits: int = 9) -> str:
    return f"{x:.{digits}g}"


def save_series(series: WindSeries, path, header_meta: Mapping | None = None, digits: int = 9) -> None:
    """Write ``t,u,phi`` rows that :func:`load_series` reads back.

    Invalid samples are written as ``nan`` speed so their positions survive.
    """
    lines = []
    for k, v in (header_meta or {}).items():
        lines.append(f"# {k}={v}")
    lines.append("t,u,phi")
    t = series.t
    u = np.where(series.valid, series.u, np.nan)
    for ti, ui, pi in zip(t.tolist(), u.tolist(), series.phi.tolist()):
        lines.append(f"{_text_float(ti, 12)},{_text_float(ui, digits)},{_text_float(pi, digits)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def block_average(series: WindSeries, target_rate: float) -> WindSeries:
    """Decimate by averaging non-overlapping blocks.

    Speed is the arithmetic block mean, direction the circular block mean.
    A block containing any invalid sample is invalid. A trailing partial
    block is discarded.
    """
    ratio = series.rate / target_rate
    m = int(round(ratio))
    if m < 1 or abs(ratio - m) > 1e-9 * ratio:
        raise WindDataError(f"{series.rate} Hz is not an integer multiple of {target_rate} Hz")
    nb = len(series) // m
    if nb == 0:
        raise WindDataError("series shorter than one averaging block")
    sl = slice(0, nb * m)
    u = series.u[sl].reshape(nb, m)
    phi = series.phi[sl].reshape(nb, m)
    ok = series.valid[sl].reshape(nb, m).all(axis=1)
    u_mean = np.where(ok, np.nan_to_num(u).mean(axis=1), np.nan)
    phi_mean = np.where(ok, circular_mean(np.nan_to_num(phi), axis=1), np.nan)
    meta = dict(series.meta, block_average=m)
    return WindSeries(u_mean, phi_mean, ok, target_rate, meta)


def in_sector(phi, lo: float, hi: float) -> np.ndarray:
    """Inclusive, wrap-aware sector membership test."""
    phi = np.asarray(phi, dtype=float)
    if lo <= hi:
        return (phi >= lo) & (phi <= hi)
    return (phi >= lo) | (phi <= hi)


def apply_exclusions(series: WindSeries, sector=(40.5, 133.5), min_speed: float = 2.0) -> WindSeries:
    """Flag samples inside an excluded direction sector or below ``min_speed``."""
    if sector is not None:
        lo, hi = sector
        if not (0 <= lo < 360 and 0 <= hi < 360):
            raise WindDataError(f"sector bounds must lie in [0, 360): {sector}")
    bad = np.zeros(len(series), dtype=bool)
    with np.errstate(invalid="ignore"):
        if sector is not None:
            bad |= in_sector(series.phi, lo, hi)
        if min_speed is not None:
            bad |= series.u < min_speed
    return series.with_valid(series.valid & ~bad)


def _trailing_sum(x: np.ndarray, w: int) -> np.ndarray:
    c = np.concatenate(([0.0], np.cumsum(x)))
    out = np.full(x.size, np.nan)
    out[w - 1:] = c[w:] - c[:-w]
    return out


def moving_average(series: WindSeries, window: float) -> AveragedSeries:
    """Trailing moving average over the last ``window`` seconds.

    The window at sample ``i`` holds the ``round(window * rate)`` samples
    ending at ``i``. Speeds are averaged arithmetically over valid samples
    and directions by their vector mean. Warm-up samples and windows with
    more than half their samples invalid are flagged.
    """
    w = int(round(window * series.rate))
    if window < series.dt - 1e-12 or w < 1:
        raise WindDataError(f"window {window} s is shorter than one sample period")
    n = len(series)
    v = series.valid.astype(float)
    count = _trailing_sum(v, w) if n >= w else np.full(n, np.nan)
    ok = np.isfinite(count) & (count * 2 >= w) & (count > 0)

    u0 = float(series.u[series.valid][0]) if series.valid.any() else 0.0
    p0 = float(series.phi[series.valid][0]) if series.valid.any() else 0.0
    # subtract reference values so constant stretches average exactly
    du = np.where(series.valid, series.u - u0, 0.0)
    rad = np.deg2rad(np.where(series.valid, series.phi - p0, 0.0))
    if n >= w:
        su = _trailing_sum(du, w)
        ss = _trailing_sum(np.where(series.valid, np.sin(rad), 0.0), w)
        sc = _trailing_sum(np.where(series.valid, np.cos(rad), 0.0), w)
    else:
        su = ss = sc = np.full(n, np.nan)
    with np.errstate(invalid="ignore", divide="ignore"):
        u_bar = np.where(ok, u0 + su / count, np.nan)
        phi_bar = np.where(ok, wrap360(p0 + np.rad2deg(np.arctan2(ss, sc))), np.nan)
    return AveragedSeries(_readonly(u_bar), _readonly(phi_bar), _readonly(ok, bool), float(window))
