"""Command-line front end: ``windaoa {synth,characterize,aoa,fit}``.

Settings come from an optional ``key = value`` config file and are
overridden by flags. Exit codes: 0 success, 2 configuration error, 3 data
error, 4 Castaing fit non-convergence under ``--strict``.
"""
from __future__ import annotations

import argparse
import configparser
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .castaing import CastaingError, fit_castaing, gaussian_nll
from .export import ReportWriter, dumps, sha256_file, sha256_text, tau_tag
from .stats import (
    DegenerateGdiError,
    StatsError,
    direction_increments,
    estimate_pdf,
    exceedance_probability,
    gdi,
    moments,
    powerlaw_fit,
    speed_increments,
    structure_function,
)
from .synth import SynthError, SynthSpec, generate, spec_from_dict
from .turbine import (
    AoaError,
    Mode,
    TurbineConfig,
    aoa_increment_series,
    conditional_series,
    rate_stats,
)
from .wind_data import WindDataError, apply_exclusions, block_average, load_series, save_series

log = logging.getLogger("windaoa")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_FIT = 4

DEFAULT_TAU_GRID = (0.1, 0.2, 0.3, 0.5, 0.6, 1.0, 2.0, 3.0)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    input: str | None = None
    columns: dict = field(default_factory=dict)
    rate: float | None = None
    header: bool = True
    synth: SynthSpec | None = None
    target_rate: float | None = None
    sector: tuple | None = (40.5, 133.5)
    min_speed: float | None = 2.0
    turbines: list = field(default_factory=list)
    tau_grid: tuple = DEFAULT_TAU_GRID
    cases: tuple = ("a", "b")
    yaw_only: bool = False
    condition: tuple | None = None
    fit: bool = False
    fit_method: str = "mle"
    fit_max_samples: int = 20000
    bins: int = 101
    gdi_taus: tuple = (10.0,)
    gdi_threshold: float = 1.98
    outdir: str = "report"
    formats: tuple = ("csv", "json")
    jobs: int = 1
    strict: bool = False
    export_increments: bool = False

    def echo(self) -> dict:
        """Settings that determine the numeric output (jobs and outdir excluded)."""
        return {
            "input": self.input,
            "columns": self.columns,
            "rate": self.rate,
            "header": self.header,
            "synth": self.synth.as_dict() if self.synth else None,
            "target_rate": self.target_rate,
            "sector": list(self.sector) if self.sector else None,
            "min_speed": self.min_speed,
            "turbines": [t.as_dict() for t in self.turbines],
            "tau_grid": list(self.tau_grid),
            "cases": list(self.cases),
            "yaw_only": self.yaw_only,
            "condition": list(self.condition) if self.condition else None,
            "fit": self.fit,
            "fit_method": self.fit_method,
            "fit_max_samples": self.fit_max_samples,
            "bins": self.bins,
            "gdi_taus": list(self.gdi_taus),
            "gdi_threshold": self.gdi_threshold,
            "formats": list(self.formats),
            "strict": self.strict,
            "export_increments": self.export_increments,
        }


# ---------------------------------------------------------------------------
# config parsing


def _floats(text, n=None, name="value"):
    try:
        vals = tuple(float(v) for v in str(text).replace(";", ",").split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"{name}: expected comma-separated numbers, got {text!r}") from exc
    if n is not None and len(vals) != n:
        raise ConfigError(f"{name}: expected {n} numbers, got {text!r}")
    return vals


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def parse_turbines(text, **geometry) -> list:
    """``"tsr:7, rpm:10"`` -> list of :class:`TurbineConfig`."""
    out = []
    for item in str(text).split(","):
        item = item.strip()
        if not item:
            continue
        kind, _, val = item.partition(":")
        try:
            if kind == "tsr":
                out.append(TurbineConfig.fixed_tsr(float(val or 7.0), **geometry))
            elif kind == "rpm":
                out.append(TurbineConfig.fixed_rpm(float(val), **geometry))
            else:
                raise ConfigError(f"turbine entries look like tsr:7 or rpm:15, got {item!r}")
        except (ValueError, AoaError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad turbine entry {item!r}: {exc}") from exc
    return out


def read_config_file(path) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file {path} not found")
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string("[run]\n" + p.read_text(encoding="utf-8"))
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return dict(cp["run"])


def build_config(settings: dict) -> RunConfig:
    """Turn a flat ``key -> string`` mapping into a validated :class:`RunConfig`."""
    s = dict(settings)
    cfg = RunConfig()
    synth = {k[len("synth_"):]: v for k, v in s.items() if k.startswith("synth_")}
    try:
        if "input" in s and s["input"]:
            cfg.input = str(s["input"])
        if synth:
            cfg.synth = spec_from_dict(synth)
        if cfg.input and cfg.synth:
            raise ConfigError("give either input or synth_* settings, not both")
        if "columns" in s and s["columns"]:
            pairs = [kv.split("=", 1) for kv in str(s["columns"]).split(",") if kv.strip()]
            cfg.columns = {k.strip(): v.strip() for k, v in pairs}
        if s.get("rate"):
            cfg.rate = float(s["rate"])
        if "header" in s:
            cfg.header = _bool(s["header"])
        if s.get("target_rate"):
            cfg.target_rate = float(s["target_rate"])
        if "sector" in s:
            cfg.sector = None if str(s["sector"]).lower() in ("", "none") else _floats(s["sector"], 2, "sector")
        if "min_speed" in s:
            cfg.min_speed = None if str(s["min_speed"]).lower() in ("", "none") else float(s["min_speed"])
        if "tau_grid" in s:
            cfg.tau_grid = _floats(s["tau_grid"], name="tau_grid")
        if "cases" in s:
            cfg.cases = tuple(c.strip().lower() for c in str(s["cases"]).split(",") if c.strip())
            bad = set(cfg.cases) - {"a", "b", "c"}
            if bad:
                raise ConfigError(f"unknown cases {sorted(bad)}")
        if "yaw_only" in s:
            cfg.yaw_only = _bool(s["yaw_only"])
        if s.get("condition") and str(s["condition"]).lower() != "none":
            lo, hi = _floats(s["condition"], 2, "condition")
            if not lo < hi:
                raise ConfigError("condition: lower bound must be below upper bound")
            cfg.condition = (lo, hi)
        if "fit" in s:
            cfg.fit = _bool(s["fit"])
        if "fit_method" in s:
            cfg.fit_method = str(s["fit_method"])
            if cfg.fit_method not in ("mle", "lsq"):
                raise ConfigError("fit_method must be mle or lsq")
        if "fit_max_samples" in s:
            cfg.fit_max_samples = int(s["fit_max_samples"])
        if "bins" in s:
            cfg.bins = int(s["bins"])
        if "gdi_tau" in s:
            cfg.gdi_taus = _floats(s["gdi_tau"], name="gdi_tau")
        if "gdi_threshold" in s:
            cfg.gdi_threshold = float(s["gdi_threshold"])
        if "outdir" in s:
            cfg.outdir = str(s["outdir"])
        if "formats" in s:
            cfg.formats = tuple(f.strip() for f in str(s["formats"]).split(",") if f.strip())
            if not cfg.formats or set(cfg.formats) - {"csv", "json"}:
                raise ConfigError("formats must be a subset of csv,json")
        if "jobs" in s:
            cfg.jobs = max(1, int(s["jobs"]))
        if "strict" in s:
            cfg.strict = _bool(s["strict"])
        if "export_increments" in s:
            cfg.export_increments = _bool(s["export_increments"])
        geometry = {}
        for key in ("R", "r", "tau_a", "blockage"):
            if key in s:
                geometry[key] = float(s[key])
        cfg.turbines = parse_turbines(s.get("turbines", "tsr:7,rpm:10,rpm:20"), **geometry)
    except (ValueError, SynthError, AoaError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    if not cfg.tau_grid:
        raise ConfigError("tau_grid must not be empty")
    if any(t <= 0 for t in cfg.tau_grid):
        raise ConfigError("tau_grid entries must be positive")
    if cfg.input is None and cfg.synth is None:
        raise ConfigError("no input: give --input PATH or synth settings (--synth kind=...)")
    return cfg


def check_tau_grid(taus, rate: float, name="tau_grid"):
    for tau in taus:
        k = tau * rate
        if abs(k - round(k)) > 1e-9 * max(1.0, k) or round(k) < 1:
            raise ConfigError(f"{name}: tau={tau:g} s is not a multiple of the {1 / rate:g} s sample period")


def _check_outdir(path):
    p = Path(path)
    try:
        p.mkdir(parents=True, exist_ok=True)
        probe = p / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output directory {path} is not writable: {exc}") from exc


# ---------------------------------------------------------------------------
# pipeline pieces


def load_input(cfg: RunConfig):
    """Return ``(series, input_hash)`` after preprocessing."""
    if cfg.synth is not None:
        series = generate(cfg.synth)
        digest = sha256_text(dumps(cfg.synth.as_dict()))
    else:
        series = load_series(cfg.input, cfg.columns or None, rate=cfg.rate, header=cfg.header)
        digest = sha256_file(cfg.input)
    raw = series.summary()
    if cfg.target_rate and abs(cfg.target_rate - series.rate) > 1e-12:
        series = block_average(series, cfg.target_rate)
    series = apply_exclusions(series, cfg.sector, cfg.min_speed)
    return series, digest, raw


def _summary_row(values, tau, bins):
    m = moments(values)
    hist = estimate_pdf(values, bins=bins)
    row = {"tau": tau, "n": m.n, "mean": m.mean, "sigma": m.sigma, "skewness": m.nu, "kurtosis": m.gamma}
    return row, hist


def _fit_scaling(rows, key, tau_range):
    pts = [(r["tau"], r[key]) for r in rows if r.get(key) is not None]
    try:
        tau, y = zip(*pts)
        return powerlaw_fit(tau, y, tau_range).as_dict()
    except (ValueError, StatsError) as exc:
        return {"error": str(exc), "tau_range": list(tau_range)}


def _map(fn, items, jobs):
    if jobs <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def cmd_characterize(cfg: RunConfig) -> int:
    _check_outdir(cfg.outdir)
    series, digest, raw = load_input(cfg)
    check_tau_grid(cfg.tau_grid, series.rate)
    check_tau_grid(cfg.gdi_taus, series.rate, "gdi_tau")
    out = ReportWriter(cfg.outdir, cfg.formats)
    status = EXIT_OK

    def analyse(tau):
        res = {}
        for source, fn in (("speed", speed_increments), ("direction", direction_increments)):
            try:
                inc = fn(series, tau)
                res[source] = _summary_row(inc, tau, cfg.bins)
                if source == "speed":
                    res["S2"] = structure_function(series.u, 2, tau, series.rate, series.valid)
            except (StatsError, WindDataError) as exc:
                res[source] = ({"tau": tau, "error": str(exc)}, None)
        return tau, res

    results = _map(analyse, list(cfg.tau_grid), cfg.jobs)
    cols = ["tau", "n", "mean", "sigma", "skewness", "kurtosis", "error"]
    tables = {"speed": [], "direction": []}
    for tau, res in results:
        for source in ("speed", "direction"):
            row, hist = res[source]
            if source == "speed" and "S2" in res:
                row["S2"] = res["S2"]
            tables[source].append(row)
            if hist is not None:
                out.write_histogram(f"hist/{source}_{tau_tag(tau)}", hist, {"source": source, "tau": tau})
    out.write_table("moments_speed", tables["speed"], cols + ["S2"])
    out.write_table("moments_direction", tables["direction"], cols)

    scaling = {
        "speed_kurtosis": _fit_scaling(tables["speed"], "kurtosis", (0.1, 3.0)),
        "direction_kurtosis": _fit_scaling(tables["direction"], "kurtosis", (0.5, 3.0)),
        "speed_sigma": _fit_scaling(tables["speed"], "sigma", (0.6, 3.0)),
    }
    out.write_json("scaling.json", scaling)

    gdi_rows = []
    for tau in cfg.gdi_taus:
        try:
            g = gdi(series, tau)
            gdi_rows.append(
                {
                    "tau": tau,
                    "threshold": cfg.gdi_threshold,
                    "probability": exceedance_probability(g.gdi, cfg.gdi_threshold),
                    "n": int(g.gdi.size),
                    "max_abs_du": g.max_du,
                    "max_abs_dphi": g.max_dphi,
                    "gdi_min": float(g.gdi.min()),
                    "gdi_max": float(g.gdi.max()),
                }
            )
        except DegenerateGdiError as exc:
            gdi_rows.append({"tau": tau, "threshold": cfg.gdi_threshold, "error": str(exc)})
            log.error("GDI: %s", exc)
            status = EXIT_DATA
        except (StatsError, WindDataError) as exc:
            gdi_rows.append({"tau": tau, "threshold": cfg.gdi_threshold, "error": str(exc)})
            log.error("GDI: %s", exc)
            status = EXIT_DATA
    out.write_table(
        "gdi",
        gdi_rows,
        ["tau", "threshold", "probability", "n", "max_abs_du", "max_abs_dphi", "gdi_min", "gdi_max", "error"],
    )
    out.write_json("summary.json", {"raw": raw, "processed": series.summary()})
    out.manifest("characterize", cfg.echo(), digest, {"exit_code": status})
    return status


def _tasks(cfg: RunConfig):
    tasks = []
    for ti, turb in enumerate(cfg.turbines):
        for case in cfg.cases:
            if case == "a" and turb.mode is not Mode.FIXED_TSR:
                continue
            if case == "b" and turb.mode is not Mode.FIXED_RPM:
                continue
            variants = [(False, False)]
            if cfg.yaw_only and case in ("a", "b"):
                variants.append((True, False))
            if cfg.condition:
                variants.append((False, True))
            for yaw, cond in variants:
                for tau in cfg.tau_grid:
                    tasks.append((ti, turb, case, yaw, cond, tau))
    return tasks


def _stem(turb, case, yaw, cond, tau):
    tag = turb.label.replace("=", "")
    return f"{tag}_case{case}" + ("_yaw" if yaw else "") + ("_cond" if cond else "") + f"_{tau_tag(tau)}"


def cmd_aoa(cfg: RunConfig) -> int:
    if not cfg.turbines:
        raise ConfigError("aoa needs at least one turbine entry")
    _check_outdir(cfg.outdir)
    series, digest, raw = load_input(cfg)
    check_tau_grid(cfg.tau_grid, series.rate)
    cond_series = conditional_series(series, *cfg.condition) if cfg.condition else None
    out = ReportWriter(cfg.outdir, cfg.formats)
    tasks = _tasks(cfg)

    def run(task):
        idx, (ti, turb, case, yaw, cond, tau) = task
        src = cond_series if cond else series
        row = {
            "turbine": turb.label,
            "mode": turb.mode.value,
            "case": case,
            "yaw_only": yaw,
            "conditioned": cond,
            "tau": tau,
        }
        try:
            incs = aoa_increment_series(src, turb, tau, case, yaw)
        except (AoaError, WindDataError) as exc:
            row["error"] = str(exc)
            return row, None, None, None
        vals = incs.values
        try:
            m = moments(vals)
            row.update(Type=turb.label, Skewness=m.nu, Kurtosis=m.gamma, sigma=m.sigma, n=m.n)
            hist = estimate_pdf(vals, bins=cfg.bins)
        except StatsError:
            row.update(Type=turb.label, Skewness=0.0, Kurtosis=0.0, sigma=0.0, n=int(vals.size), degenerate=True)
            hist = None
        r = rate_stats(incs)
        row.update(sigma_rate=r.sigma_rate, max_rate=r.max_rate)
        fit = None
        if cfg.fit and hist is not None:
            x = vals
            if x.size > cfg.fit_max_samples:
                rng = np.random.default_rng(idx)
                x = np.sort(rng.choice(x, cfg.fit_max_samples, replace=False))
            try:
                res = fit_castaing(x - x.mean(), tau=tau, method=cfg.fit_method)
                fit = dict(res.as_dict(), turbine=turb.label, case=case, yaw_only=yaw, conditioned=cond)
                fit["gaussian_nll"] = gaussian_nll(x)
            except (CastaingError, StatsError) as exc:
                fit = {"tau": tau, "turbine": turb.label, "case": case, "error": str(exc), "converged": False}
        return row, hist, fit, incs

    results = _map(run, list(enumerate(tasks)), cfg.jobs)
    rows, fits = [], []
    for (ti, turb, case, yaw, cond, tau), (row, hist, fit, incs) in zip(tasks, results):
        rows.append(row)
        meta = {"case": case, "yaw_only": yaw, "conditioned": cond, "tau": tau, "turbine": turb.as_dict()}
        if cond:
            meta["condition"] = list(cfg.condition)
        stem = _stem(turb, case, yaw, cond, tau)
        if hist is not None:
            out.write_histogram(f"hist/aoa_{stem}", hist, meta)
        if cfg.export_increments and incs is not None:
            inc_rows = [{"t": t, "delta_alpha": v} for t, v in zip(incs.t.tolist(), incs.values.tolist())]
            out.write_table(f"increments/aoa_{stem}", inc_rows, ["t", "delta_alpha"], meta)
        if fit is not None:
            fits.append(fit)
    columns = [
        "turbine", "mode", "case", "yaw_only", "conditioned", "tau",
        "Type", "Skewness", "Kurtosis", "sigma", "n", "sigma_rate", "max_rate", "error",
    ]
    out.write_table("aoa_table", rows, columns)
    status = EXIT_OK
    if cfg.fit:
        out.write_json("castaing_fits.json", fits)
        bad = [f for f in fits if not f.get("converged")]
        if bad:
            log.warning("%d Castaing fit(s) did not converge", len(bad))
            if cfg.strict:
                status = EXIT_FIT
    out.write_json("summary.json", {"raw": raw, "processed": series.summary()})
    out.manifest("aoa", cfg.echo(), digest, {"exit_code": status})
    return status


def cmd_synth(spec: SynthSpec, path) -> Path:
    series = generate(spec)
    header = dict(spec.as_dict())
    header["clipped"] = series.meta["clipped"]
    save_series(series, path, header_meta=header)
    return Path(path)


def read_synth_header(path) -> SynthSpec:
    """Rebuild the generating :class:`SynthSpec` from a file written by ``synth``."""
    d = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            k, _, v = line[1:].strip().partition("=")
            d[k.strip()] = v.strip()
    d.pop("clipped", None)
    return spec_from_dict(d)


def cmd_fit(path, tau, column="delta_alpha", method="mle", max_samples=None, output=None, strict=False) -> int:
    try:
        df = pd.read_csv(path, comment="#")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise WindDataError(f"cannot read {path}: {exc}") from exc
    if column not in df.columns:
        raise ConfigError(f"column {column!r} not in {path}; available: {list(df.columns)}")
    x = pd.to_numeric(df[column], errors="coerce").to_numpy(dtype=float)
    x = x[np.isfinite(x)]
    if max_samples and x.size > max_samples:
        x = np.sort(np.random.default_rng(0).choice(x, max_samples, replace=False))
    try:
        res = fit_castaing(x - x.mean(), tau=tau, method=method)
    except (CastaingError, StatsError) as exc:
        raise WindDataError(str(exc)) from exc
    doc = res.as_dict()
    doc["gaussian_nll"] = gaussian_nll(x)
    text = dumps(doc)
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if not res.converged:
        log.warning("fit did not converge")
        if strict:
            return EXIT_FIT
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument handling


def _kv(text):
    k, sep, v = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    return k.strip(), v.strip()


def _add_run_options(p):
    p.add_argument("--config", help="key = value settings file")
    p.add_argument("--input", help="delimited wind file (t,u,phi or ux,uy)")
    p.add_argument("--synth", type=_kv, action="append", default=[], metavar="KEY=VALUE",
                   help="generate the input instead, e.g. --synth kind=intermittent --synth n=100000")
    p.add_argument("--columns", help="column map, e.g. u=speed,phi=dir,t=time")
    p.add_argument("--rate", type=float, help="sampling rate in Hz when the file has no t column")
    p.add_argument("--target-rate", type=float, help="block-average to this rate (Hz)")
    p.add_argument("--sector", help="excluded direction sector lo,hi in degrees, or none")
    p.add_argument("--min-speed", help="exclude speeds below this value (m/s), or none")
    p.add_argument("--tau-grid", help="comma-separated time scales in seconds")
    p.add_argument("--bins", type=int)
    p.add_argument("--outdir", "-o")
    p.add_argument("--formats", help="csv,json")
    p.add_argument("--jobs", type=int, help="worker threads")
    p.add_argument("--set", type=_kv, action="append", default=[], metavar="KEY=VALUE",
                   help="override any config key")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="windaoa", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("characterize", help="speed/direction increment statistics and GDI")
    _add_run_options(p)
    p.add_argument("--gdi-tau", help="comma-separated GDI time scales (s)")
    p.add_argument("--gdi-threshold", type=float)

    p = sub.add_parser("aoa", help="angle-of-attack increment statistics")
    _add_run_options(p)
    p.add_argument("--turbines", help="e.g. tsr:7,rpm:10,rpm:20")
    p.add_argument("--cases", help="subset of a,b,c")
    p.add_argument("--yaw-only", action="store_true", default=None)
    p.add_argument("--condition", help="speed band u_min,u_max (m/s)")
    p.add_argument("--fit", action="store_true", default=None, help="fit Castaing densities")
    p.add_argument("--fit-method", choices=("mle", "lsq"))
    p.add_argument("--export-increments", action="store_true", default=None)
    p.add_argument("--strict", action="store_true", default=None,
                   help="exit non-zero when a fit does not converge")

    p = sub.add_parser("synth", help="write a synthetic wind series")
    p.add_argument("output")
    p.add_argument("--config")
    p.add_argument("--synth", type=_kv, action="append", default=[], metavar="KEY=VALUE")

    p = sub.add_parser("fit", help="fit a Castaing density to exported increments")
    p.add_argument("input")
    p.add_argument("--tau", type=float)
    p.add_argument("--column", default="delta_alpha")
    p.add_argument("--method", choices=("mle", "lsq"), default="mle")
    p.add_argument("--max-samples", type=int)
    p.add_argument("--output", "-o")
    p.add_argument("--strict", action="store_true")
    return parser


_FLAG_KEYS = {
    "input": "input", "columns": "columns", "rate": "rate", "target_rate": "target_rate",
    "sector": "sector", "min_speed": "min_speed", "tau_grid": "tau_grid", "bins": "bins",
    "outdir": "outdir", "formats": "formats", "jobs": "jobs", "gdi_tau": "gdi_tau",
    "gdi_threshold": "gdi_threshold", "turbines": "turbines", "cases": "cases",
    "yaw_only": "yaw_only", "condition": "condition", "fit": "fit", "fit_method": "fit_method",
    "export_increments": "export_increments", "strict": "strict",
}


def settings_from_args(args) -> dict:
    settings = read_config_file(args.config) if getattr(args, "config", None) else {}
    for attr, key in _FLAG_KEYS.items():
        val = getattr(args, attr, None)
        if val is not None:
            settings[key] = val
    for k, v in getattr(args, "synth", []):
        settings["synth_" + k] = v
    for k, v in getattr(args, "set", []):
        settings[k] = v
    return settings


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            settings = settings_from_args(args)
            synth = {k[len("synth_"):]: v for k, v in settings.items() if k.startswith("synth_")}
            spec = spec_from_dict(synth)
            cmd_synth(spec, args.output)
            return EXIT_OK
        if args.command == "fit":
            return cmd_fit(args.input, args.tau, args.column, args.method, args.max_samples, args.output, args.strict)
        cfg = build_config(settings_from_args(args))
        if args.command == "characterize":
            return cmd_characterize(cfg)
        return cmd_aoa(cfg)
    except (ConfigError, SynthError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except (WindDataError, StatsError, AoaError) as exc:
        log.error("data error: %s", exc)
        return EXIT_DATA
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
