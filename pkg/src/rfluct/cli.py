"""Command-line surface tying the modules into reproducible runs.

Subcommands: `simulate nuclear`, `simulate index`, `estimate`, `predict`
and `stats demo`.  Every output embeds the config hash and seed in a
comment header (CSV) or top-level fields (JSON); identical config + seed
reruns are byte-identical apart from the generated_utc header line.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import EstimatorSettings, RunConfig, config_hash, load_config
from .ensembles import build_level_ladder
from .errors import (
    ConfigError,
    DegenerateInputError,
    FlatSeriesError,
    IngestError,
    ModelConsistencyError,
    NormalizationError,
    ParameterError,
    PoleError,
    ResolutionError,
    SingularDenominatorError,
    ToolkitError,
)
from .estimator import autocorr_curve, predict_day, strength_function
from .fluctuations import (
    AUTOCORR_MODES,
    MEAN_NORMALIZED,
    amplitude_autocorr,
    lorentzian_amplitude,
    lorentzian_autocorr,
    intensity_autocorr,
    normalized_intensity,
    sample_complex_bivariate,
)
from .index_model import compose_index
from .ingest import ingest_csv
from .rfunction import evaluate_spectrum
from .series import SpectrumSeries

OUT_DIR_ENV = "RFLUCT_OUT_DIR"

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_DRIFTED = 4
EXIT_WITHHELD = 5
EXIT_ESTIMATION = 6
EXIT_NUMERICAL = 7

_EXIT_DOC = """exit codes:
  0  success (predict: stable verdict)
  1  unexpected internal error
  2  configuration or parameter error
  3  input data error (ingest failed validation)
  4  predict: drifted verdict
  5  predict: verdict withheld (a window could not be estimated)
  6  estimation failed (flat or degenerate series)
  7  numerical model error (pole or singular denominator)
"""

_ERROR_CODES = (
    ((ConfigError, ParameterError, ModelConsistencyError, ResolutionError), EXIT_CONFIG),
    ((IngestError,), EXIT_INPUT),
    ((FlatSeriesError, DegenerateInputError, NormalizationError), EXIT_ESTIMATION),
    ((PoleError, SingularDenominatorError), EXIT_NUMERICAL),
)


def _fmt(x) -> str:
    """Shortest round-trip decimal for floats, plain str otherwise."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _meta_lines(meta: dict) -> list[str]:
    lines = [f"# tool=rfluct {__version__}"]
    lines.append(f"# generated_utc={datetime.now(timezone.utc).isoformat(timespec='seconds')}")
    for key, value in meta.items():
        lines.append(f"# {key}={_fmt(value)}")
    return lines


def write_table_csv(path: Path, columns: list[tuple[str, np.ndarray]], meta: dict) -> Path:
    """CSV with `# key=value` provenance header and repr-precision floats."""
    names = [name for name, _ in columns]
    arrays = [np.asarray(a) for _, a in columns]
    n = arrays[0].size
    with path.open("w", newline="") as fh:
        for line in _meta_lines(meta):
            fh.write(line + "\n")
        fh.write(",".join(names) + "\n")
        for i in range(n):
            fh.write(",".join(_fmt(float(a[i])) for a in arrays) + "\n")
    return path


def write_series_csv(path: Path, series: SpectrumSeries, meta: dict,
                     names=("abscissa", "value"), extra=None) -> Path:
    columns = [(names[0], series.abscissa), (names[1], series.values)]
    for name, values in (extra or []):
        columns.append((name, values))
    return write_table_csv(path, columns, meta)


def write_json_report(path: Path, payload: dict) -> Path:
    with path.open("w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _out_dir(args) -> Path:
    out = args.out_dir or os.environ.get(OUT_DIR_ENV) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_run_config(args, default=None) -> RunConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    if default is not None:
        return default
    raise ConfigError("--config is required for this command")


def _estimator_settings(cfg: RunConfig, args) -> EstimatorSettings:
    settings = cfg.estimator
    updates = {}
    if getattr(args, "max_lag", None):
        updates["max_lag"] = args.max_lag
    if getattr(args, "threshold", None) is not None:
        updates["threshold"] = args.threshold
    if getattr(args, "autocorr_mode", None):
        updates["autocorr_mode"] = args.autocorr_mode
    if getattr(args, "no_detrend", False):
        updates["detrend"] = False
    if getattr(args, "min_prominence", None) is not None:
        updates["min_prominence"] = args.min_prominence
    if getattr(args, "train_window", None) is not None:
        updates["train_seconds"] = args.train_window
    if updates:
        settings = dataclasses.replace(settings, **updates)
    return settings


def _overrides(args, keys) -> dict:
    return {k: getattr(args, k, None) for k in keys if getattr(args, k, None) is not None}


def _estimate_payload(est) -> dict:
    return {
        "gamma_hat": est.gamma_hat,
        "d_hat": est.d_hat,
        "ratio": est.ratio,
        "fit_residual": est.fit_residual,
        "window": list(est.window),
        "n_lags_used": est.n_lags_used,
        "flags": list(est.flags),
    }


def _settings_payload(settings: EstimatorSettings) -> dict:
    return dataclasses.asdict(settings)


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate_nuclear(args) -> int:
    cfg = _load_run_config(args)
    cfg.require_mode("nuclear")
    if cfg.ensemble is None or cfg.reaction is None:
        raise ConfigError("nuclear simulation needs [ensemble] and [reaction] sections")
    espec = cfg.ensemble
    if args.seed is not None:
        espec = dataclasses.replace(espec, seed=args.seed)
    seed = espec.seed

    levels = build_level_ladder(espec)
    spectrum = evaluate_spectrum(levels, cfg.reaction, workers=args.workers)

    digest = config_hash(cfg.sections, _overrides(args, ("seed", "workers")))
    meta = {
        "config_hash": digest,
        "seed": seed,
        "n_levels": espec.n_levels,
        "mean_spacing": espec.mean_spacing,
        "mean_width_main": espec.mean_width_main,
        "eliminated_width": espec.eliminated_width,
        "width_dof": espec.width_dof,
        "window_lo": espec.window[0],
        "window_hi": espec.window[1],
        "mean_width_over_spacing": espec.strength_ratio,
    }
    out = _out_dir(args)
    spectrum_path = write_series_csv(out / "spectrum.csv", spectrum, meta)
    write_table_csv(
        out / "levels.csv",
        [
            ("position", np.array([lv.position for lv in levels])),
            ("width_elastic", np.array([lv.width_elastic for lv in levels])),
            ("width_inelastic", np.array([lv.width_inelastic for lv in levels])),
            ("width_eliminated", np.array([lv.width_eliminated for lv in levels])),
            ("width_total", np.array([lv.width_total for lv in levels])),
        ],
        meta,
    )
    print(f"wrote {spectrum_path} and {out / 'levels.csv'}")
    if args.plot:
        from . import plots

        fig = plots.save_spectrum_figure(
            spectrum, out / "spectrum.png",
            title=f"width/spacing = {espec.strength_ratio:g}, seed {seed}",
        )
        print(f"wrote {fig}")
    return EXIT_OK


def cmd_simulate_index(args) -> int:
    cfg = _load_run_config(args)
    cfg.require_mode("index")
    if cfg.index_model is None:
        raise ConfigError("index simulation needs [index] / [component.*] sections")
    seed = args.seed if args.seed is not None else cfg.require_seed()
    rng = np.random.default_rng(seed)
    composed, parts = compose_index(cfg.index_model, rng=rng, return_components=True)

    digest = config_hash(cfg.sections, _overrides(args, ("seed",)))
    meta = {
        "config_hash": digest,
        "seed": seed,
        "baseline": cfg.index_model.baseline,
        "resolution_seconds": cfg.index_model.resolution,
        "session_seconds": cfg.index_model.session_length,
        "components": ",".join(spec.label for spec, _ in parts),
    }
    out = _out_dir(args)
    extra = None
    if args.component_columns:
        extra = [(spec.label, part.values) for spec, part in parts]
    session_path = write_series_csv(out / "session.csv", composed, meta,
                                    names=("timestamp_seconds", "index_value"), extra=extra)
    written = [session_path]
    for spec, part in parts:
        comp_meta = dict(meta)
        comp_meta.update({
            "component": spec.label,
            "mean_spacing_seconds": spec.mean_spacing,
            "mean_width_seconds": spec.mean_width,
            "width_dof": spec.width_dof,
            "amplitude_scale": spec.amplitude_scale,
            "component_seed": spec.seed,
            "mean_width_over_spacing": spec.strength_ratio,
        })
        written.append(write_series_csv(
            out / f"component_{spec.label}.csv", part, comp_meta,
            names=("timestamp_seconds", "index_value"),
        ))
    print("wrote " + ", ".join(str(p) for p in written))
    if args.plot:
        from . import plots

        fig = plots.save_session_figure(composed, parts, out / "session.png",
                                        title=f"synthetic session, seed {seed}")
        print(f"wrote {fig}")
    return EXIT_OK


def cmd_estimate(args) -> int:
    cfg = _load_run_config(args, default=RunConfig())
    settings = _estimator_settings(cfg, args)
    ingested = ingest_csv(args.input, time_column=args.time_column,
                          value_column=args.value_column)
    series = ingested.series
    est = strength_function(
        series,
        max_lag=settings.max_lag,
        detrend=settings.detrend,
        mode=settings.autocorr_mode,
        min_prominence=settings.min_prominence,
        residual_ceiling=settings.residual_ceiling,
    )
    digest = config_hash(cfg.sections, _overrides(
        args, ("max_lag", "autocorr_mode", "no_detrend", "min_prominence")))
    payload = {
        "tool": "rfluct",
        "version": __version__,
        "config_hash": digest,
        "seed": cfg.seed,
        "input": str(args.input),
        "cadence": ingested.cadence,
        "n_interpolated": ingested.n_interpolated,
        "estimate": _estimate_payload(est),
        "settings": _settings_payload(settings),
    }
    out = _out_dir(args)
    report = write_json_report(out / "estimate.json", payload)

    lags, measured = autocorr_curve(series, max_lag=settings.max_lag,
                                    detrend=settings.detrend, mode=settings.autocorr_mode)
    lag_units = lags * series.step
    fitted = lorentzian_autocorr(lag_units, est.gamma_hat)
    write_table_csv(
        out / "autocorr_fit.csv",
        [("lag", lag_units), ("autocorr_normalized", measured), ("lorentzian_fit", fitted)],
        {"config_hash": digest, "seed": cfg.seed, "gamma_hat": est.gamma_hat,
         "fit_residual": est.fit_residual},
    )
    print(f"wrote {report} and {out / 'autocorr_fit.csv'}")
    if args.plot:
        from . import plots

        fig = plots.save_autocorr_fit_figure(lag_units, measured, fitted, est.gamma_hat,
                                             out / "autocorr_fit.png", unit="abscissa units")
        print(f"wrote {fig}")
    return EXIT_OK


def cmd_predict(args) -> int:
    cfg = _load_run_config(args, default=RunConfig())
    settings = _estimator_settings(cfg, args)
    if settings.train_seconds is None:
        raise ConfigError("predict needs --train-window (or estimator.train_seconds in config)")
    ingested = ingest_csv(args.input, time_column=args.time_column,
                          value_column=args.value_column)
    series = ingested.series
    report = predict_day(
        series,
        train_seconds=settings.train_seconds,
        threshold=settings.threshold,
        max_lag=settings.max_lag,
        detrend=settings.detrend,
        mode=settings.autocorr_mode,
        min_prominence=settings.min_prominence,
    )
    digest = config_hash(cfg.sections, _overrides(
        args, ("train_window", "threshold", "max_lag", "autocorr_mode", "no_detrend",
               "min_prominence")))
    payload = {
        "tool": "rfluct",
        "version": __version__,
        "config_hash": digest,
        "seed": cfg.seed,
        "input": str(args.input),
        "cadence": ingested.cadence,
        "n_interpolated": ingested.n_interpolated,
        "train_seconds": settings.train_seconds,
        "threshold": report.threshold,
        "relative_drift": report.relative_drift,
        "verdict": report.verdict,
        "train_estimate": None if report.train_estimate is None
        else _estimate_payload(report.train_estimate),
        "holdout_estimate": None if report.holdout_estimate is None
        else _estimate_payload(report.holdout_estimate),
        "settings": _settings_payload(settings),
    }
    out = _out_dir(args)
    path = write_json_report(out / "prediction.json", payload)
    print(f"wrote {path} (verdict: {report.verdict})")
    if args.plot:
        from . import plots

        fig = plots.save_prediction_figure(series, settings.train_seconds, report,
                                           out / "prediction.png")
        print(f"wrote {fig}")
    if report.verdict == "drifted":
        return EXIT_DRIFTED
    if report.verdict == "withheld":
        return EXIT_WITHHELD
    return EXIT_OK


def cmd_run(args) -> int:
    """Dispatch on the config's mode: nuclear, index or stats."""
    cfg = _load_run_config(args)
    mode = args.mode or cfg.mode
    if mode is None:
        raise ConfigError("config has no mode; pass --mode or add one to [run]")
    if mode == "nuclear":
        args.workers = getattr(args, "workers", 1)
        return cmd_simulate_nuclear(args)
    if mode == "index":
        args.component_columns = getattr(args, "component_columns", False)
        return cmd_simulate_index(args)
    if mode == "stats":
        args.n_samples = getattr(args, "n_samples", 100)
        args.autocorr_mode = getattr(args, "autocorr_mode", None)
        return cmd_stats_demo(args)
    raise ConfigError(f"unknown mode {mode!r}")


def cmd_stats_demo(args) -> int:
    cfg = _load_run_config(args, default=RunConfig())
    seed = args.seed if args.seed is not None else cfg.seed
    if seed is None:
        raise ConfigError("stats demo samples randomness; pass --seed or configure one")
    mode = args.autocorr_mode or cfg.estimator.autocorr_mode

    root = np.random.SeedSequence(seed)
    small_rng, big_rng = (np.random.default_rng(s) for s in root.spawn(2))

    digest = config_hash(cfg.sections, _overrides(args, ("seed", "n_samples", "autocorr_mode")))
    out = _out_dir(args)

    # small ensemble: the spread of normalized intensities
    n_small = args.n_samples
    w_small = normalized_intensity(sample_complex_bivariate(1.0, n_small, small_rng))
    ratio = float(w_small.max() / w_small.min())
    meta = {"config_hash": digest, "seed": seed, "n_samples": n_small,
            "max_over_min": ratio}
    write_table_csv(out / "intensity_samples.csv",
                    [("index", np.arange(n_small)), ("w", w_small)], meta)

    # large ensemble: histogram against the unit-mean exponential
    z = sample_complex_bivariate(1.0, 100_000, big_rng)
    w = normalized_intensity(z)
    edges = np.linspace(0.0, float(np.quantile(w, 0.999)), 41)
    hist, _ = np.histogram(w, bins=edges, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    write_table_csv(
        out / "intensity_histogram.csv",
        [("w_bin_center", centers), ("empirical_density", hist),
         ("exponential_density", np.exp(-centers))],
        {"config_hash": digest, "seed": seed, "n_samples": w.size},
    )

    # the coherence identity: intensity form vs squared amplitude form
    gamma = 1.0
    deltas = np.linspace(-8.0, 8.0, 1000)
    c_form = lorentzian_autocorr(deltas, gamma)
    a_sq = np.abs(lorentzian_amplitude(deltas, gamma)) ** 2
    write_table_csv(
        out / "lorentzian_identity.csv",
        [("offset", deltas), ("intensity_form", c_form), ("amplitude_form_sq", a_sq),
         ("abs_difference", np.abs(c_form - a_sq))],
        {"config_hash": digest, "seed": seed, "gamma": gamma,
         "max_abs_difference": float(np.abs(c_form - a_sq).max())},
    )

    # short decorrelation table for i.i.d. amplitudes, mode-controlled
    lags = np.arange(0, 11)
    amp_corr = np.array([abs(amplitude_autocorr(z, int(k), mode=mode)) for k in lags])
    inten_corr = np.array([
        intensity_autocorr(w, int(k), mode=MEAN_NORMALIZED) for k in lags
    ])
    write_table_csv(
        out / "iid_decorrelation.csv",
        [("lag", lags.astype(float)), ("amplitude_autocorr_abs", amp_corr),
         ("intensity_autocorr", inten_corr)],
        {"config_hash": digest, "seed": seed, "autocorr_mode": mode},
    )

    print(f"wrote intensity_samples.csv, intensity_histogram.csv, "
          f"lorentzian_identity.csv, iid_decorrelation.csv in {out}")
    if args.plot:
        from . import plots

        fig1 = plots.save_intensity_histogram(w, out / "intensity_histogram.png")
        fig2 = plots.save_lorentzian_identity_figure(deltas, c_form, a_sq,
                                                     out / "lorentzian_identity.png")
        print(f"wrote {fig1} and {fig2}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_common(parser, config_required=False):
    parser.add_argument("--config", required=config_required,
                        help="run configuration file (INI or JSON)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--out-dir", default=None,
                        help=f"output directory (default: ${OUT_DIR_ENV} or cwd)")
    parser.add_argument("--plot", action="store_true",
                        help="also render figures next to the delimited output")


def _add_estimator_flags(parser):
    parser.add_argument("--input", required=True, help="input series CSV")
    parser.add_argument("--time-column", default=0, type=_column,
                        help="timestamp column index or header name (default 0)")
    parser.add_argument("--value-column", default=1, type=_column,
                        help="value column index or header name (default 1)")
    parser.add_argument("--max-lag", type=int, default=None,
                        help="largest autocorrelation lag in samples (default: length/8)")
    parser.add_argument("--autocorr-mode", choices=AUTOCORR_MODES, default=None,
                        help="autocorrelation normalization")
    parser.add_argument("--no-detrend", action="store_true",
                        help="skip linear detrending before autocorrelation")
    parser.add_argument("--min-prominence", type=float, default=None,
                        help="peak prominence as a fraction of the value range")


def _column(text):
    try:
        return int(text)
    except ValueError:
        return text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rfluct",
        description="Simulate fluctuating resonance spectra and synthetic index "
                    "sessions, and estimate coherence widths and strength functions.",
        epilog=_EXIT_DOC,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"rfluct {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate synthetic series",
                         epilog=_EXIT_DOC, formatter_class=argparse.RawDescriptionHelpFormatter)
    sim_sub = sim.add_subparsers(dest="target", required=True)

    nuc = sim_sub.add_parser("nuclear", help="cross-section spectrum from a level ladder")
    _add_common(nuc, config_required=True)
    nuc.add_argument("--workers", type=int, default=1,
                     help="parallel grid evaluation (bitwise-identical to serial)")
    nuc.set_defaults(func=cmd_simulate_nuclear)

    idx = sim_sub.add_parser("index", help="synthetic intraday index session")
    _add_common(idx, config_required=True)
    idx.add_argument("--component-columns", action="store_true",
                     help="append per-component columns to session.csv")
    idx.set_defaults(func=cmd_simulate_index)

    run = sub.add_parser("run", help="dispatch a simulation by the config's mode",
                         epilog=_EXIT_DOC, formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_common(run, config_required=True)
    run.add_argument("--mode", choices=("nuclear", "index", "stats"), default=None,
                     help="override the mode recorded in the config")
    run.set_defaults(func=cmd_run)

    est = sub.add_parser("estimate", help="estimate coherence width and strength function",
                         epilog=_EXIT_DOC, formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_common(est)
    _add_estimator_flags(est)
    est.set_defaults(func=cmd_estimate)

    pre = sub.add_parser("predict", help="first-window stability protocol",
                         epilog=_EXIT_DOC, formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_common(pre)
    _add_estimator_flags(pre)
    pre.add_argument("--train-window", type=float, default=None,
                     help="training window length in seconds")
    pre.add_argument("--threshold", type=float, default=None,
                     help="relative drift threshold for the stable verdict")
    pre.set_defaults(func=cmd_predict)

    stats = sub.add_parser("stats", help="statistics demonstrations",
                           epilog=_EXIT_DOC, formatter_class=argparse.RawDescriptionHelpFormatter)
    stats_sub = stats.add_subparsers(dest="target", required=True)
    demo = stats_sub.add_parser("demo", help="intensity distribution and coherence identity tables")
    _add_common(demo)
    demo.add_argument("--n-samples", type=int, default=100,
                      help="size of the small intensity sample (default 100)")
    demo.add_argument("--autocorr-mode", choices=AUTOCORR_MODES, default=None,
                      help="normalization for the i.i.d. decorrelation table")
    demo.set_defaults(func=cmd_stats_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ToolkitError as exc:
        for types, code in _ERROR_CODES:
            if isinstance(exc, types):
                print(f"error: {exc}", file=sys.stderr)
                return code
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - defensive
        print(f"unexpected error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
