"""
Reproducible experiment commands behind the CLI.

Each command reads an ExperimentConfig, prints staged progress to the console,
writes its artifacts into `config.output_dir` and returns an ExperimentResult
listing the written paths and the tables it produced.
"""
import os
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from src.simulation.capacity import (
    CovarianceMode,
    capacity_loss,
    cdf_table,
    empirical_cdf,
    gain_table,
    independent_gain_stderr,
    max_mean_capacity_over_alpha,
    mean_capacity,
    paired_gain_stderr,
    samples_table,
    snr_sweep_samples,
    sweep_table,
)
from src.simulation.channel import sample_channels
from src.splitting.icc import IccVariant, sweep_both_variants
from src.splitting.toeplitz_split import dense_of_toeplitz, split, split_to_document, toeplitz_from_dense
from src.utils.config import ExperimentConfig, load_reference, reference_covariance
from src.utils.plot_engine import LineSeries, cdf_series, render_png, render_svg
from src.utils.report_writer import write_csv, write_json, write_workbook

RULE = "-" * 72


@dataclass
class ExperimentResult:
    paths: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)

    def merge(self, other: "ExperimentResult") -> "ExperimentResult":
        self.paths.extend(other.paths)
        self.tables.update(other.tables)
        return self


def _banner(stage: int, total: int, text: str):
    print(f"\n[{stage}/{total}]  {text}")


def _path(config: ExperimentConfig, name: str) -> str:
    return os.path.join(str(config.output_dir), name)


def _metadata(config: ExperimentConfig, **extra) -> dict:
    meta = {"seed": config.channel.seed, "trials": config.channel.trials}
    meta.update(extra)
    return meta


def _emit_table(config: ExperimentConfig, result: ExperimentResult, name: str, df: pd.DataFrame, **meta):
    result.tables[name] = df
    if "csv" in config.formats:
        result.paths.append(write_csv(df, _path(config, f"{name}.csv"), _metadata(config, **meta)))


def _emit_plot(config: ExperimentConfig, result: ExperimentResult, name: str, series: list, **labels):
    if "svg" in config.formats:
        result.paths.append(render_svg(series, _path(config, f"{name}.svg"), **labels))
    if "png" in config.formats:
        result.paths.append(render_png(series, _path(config, f"{name}.png"), **labels))


def _split_pair(config: ExperimentConfig):
    return split(toeplitz_from_dense(config.covariance, hermitian=config.covariance_hermitian))


def _is_reference_covariance(config: ExperimentConfig) -> bool:
    reference = dense_of_toeplitz(reference_covariance())
    return config.covariance.shape == reference.shape and np.allclose(config.covariance, reference, atol=1e-12)


# --- split ------------------------------------------------------------------

def cmd_split(config: ExperimentConfig) -> ExperimentResult:
    """Splits the configured Toeplitz covariance and writes split.json."""
    result = ExperimentResult()
    _banner(1, 2, "Splitting the transmit covariance into circulant + skew-circulant parts...")
    pair = _split_pair(config)
    document = split_to_document(pair)

    print(f"\n{' j':<4} | {'a_j':<26} | {'b_j'}")
    print("-" * 60)
    for j, (a, b) in enumerate(zip(pair.a.first_row, pair.b.first_row)):
        print(f" {j:<3} | {a.real:>+.4f} {a.imag:>+.4f}i{'':<9} | {b.real:>+.4f} {b.imag:>+.4f}i")
    print(f"\n Reconstruction residual max|A + B - R| = {document['reconstruction_residual']:.3e}")

    _banner(2, 2, "Writing split document...")
    result.paths.append(write_json(document, _path(config, "split.json")))
    for path in result.paths:
        print(f" Saved {path}")
    return result


# --- icc-table --------------------------------------------------------------

def bound_table(records: dict, primary: IccVariant) -> pd.DataFrame:
    as_printed = records[IccVariant.AS_PRINTED]
    cscs = records[IccVariant.CSCS]
    main = records[primary]
    return pd.DataFrame({
        "alpha": [r.alpha for r in main],
        "sigma": [r.sigma for r in main],
        "rho_as_printed": [r.rho for r in as_printed],
        "rho_cscs": [r.rho for r in cscs],
        "dist_identity": [r.distance_to_identity for r in main],
        "converged": [r.converged for r in main],
    }, columns=["alpha", "sigma", "rho_as_printed", "rho_cscs", "dist_identity", "converged"])


def variant_table(records: list) -> pd.DataFrame:
    return pd.DataFrame([{
        "alpha": r.alpha,
        "sigma": r.sigma,
        "rho": r.rho,
        "variant": r.variant.value,
        "dist_identity": r.distance_to_identity,
        "converged": r.converged,
    } for r in records], columns=["alpha", "sigma", "rho", "variant", "dist_identity", "converged"])


def correlation_table(records: dict) -> pd.DataFrame:
    """Residual off-diagonal correlation of the Hermitian part of R(alpha), per variant."""
    return pd.DataFrame([{
        "alpha": r.alpha,
        "variant": r.variant.value,
        "correlation": r.correlation,
        "status": r.status,
    } for variant_records in records.values() for r in variant_records],
        columns=["alpha", "variant", "correlation", "status"])


def bound_table_diff(table: pd.DataFrame, reference_rows: list) -> pd.DataFrame:
    """Side-by-side comparison with the published bound table, joined on alpha."""
    ref = pd.DataFrame(reference_rows).rename(columns={"sigma": "sigma_ref", "rho": "rho_ref", "status": "status_ref"})
    ref["alpha"] = ref["alpha"].astype(float)
    diff = table.merge(ref, on="alpha", how="left")
    diff["status"] = np.where(diff["converged"], "zero correlations", "correlations exist")
    diff["delta_sigma"] = diff["sigma"] - diff["sigma_ref"]
    diff["delta_as_printed"] = diff["rho_as_printed"] - diff["rho_ref"]
    diff["delta_cscs"] = diff["rho_cscs"] - diff["rho_ref"]
    return diff[["alpha", "sigma", "sigma_ref", "delta_sigma", "rho_as_printed", "rho_cscs", "rho_ref",
                 "delta_as_printed", "delta_cscs", "status", "status_ref"]]


def cmd_icc_table(config: ExperimentConfig) -> ExperimentResult:
    """Evaluates sigma(alpha) and rho(R(alpha)) over the alpha grid for both variants."""
    result = ExperimentResult()
    _banner(1, 3, f"Sweeping {len(config.alpha_grid)} alpha values for both ICC variants...")
    pair = _split_pair(config)
    records = sweep_both_variants(pair, config.alpha_grid, config.eps_conv)
    table = bound_table(records, config.variant)

    print(f"\n{' ALPHA':<10} | {'SIGMA':>8} | {'RHO AS-PRINTED':>14} | {'RHO CSCS':>8} | {'DIST(I)':>10} | STATUS")
    print(RULE)
    for row, record in zip(table.itertuples(index=False), records[config.variant]):
        print(f" {row.alpha:<9g} | {row.sigma:>8.4f} | {row.rho_as_printed:>14.4f} | {row.rho_cscs:>8.4f} | "
              f"{row.dist_identity:>10.3e} | {record.status}")

    _banner(2, 3, "Comparing with the published bound table...")
    meta = {"variant": config.variant.value, "eps_conv": config.eps_conv}
    _emit_table(config, result, "table2", table, **meta)
    for variant, variant_records in records.items():
        _emit_table(config, result, f"icc_{variant.value}", variant_table(variant_records), variant=variant.value)
    _emit_table(config, result, "icc_correlation", correlation_table(records), eps_conv=config.eps_conv)

    if _is_reference_covariance(config):
        diff = bound_table_diff(table, load_reference()["bound_table"]["rows"])
        print(f"\n{' ALPHA':<10} | {'D SIGMA':>9} | {'D AS-PRINTED':>12} | {'D CSCS':>9}")
        print("-" * 50)
        for row in diff.itertuples(index=False):
            print(f" {row.alpha:<9g} | {row.delta_sigma:>+9.4f} | {row.delta_as_printed:>+12.4f} | {row.delta_cscs:>+9.4f}")
        _emit_table(config, result, "table2_diff", diff, **meta)
    else:
        print(" Custom covariance: no published values to compare against.")

    _banner(3, 3, "Bound table written.")
    for path in result.paths:
        print(f" Saved {path}")
    return result


# --- capacity ---------------------------------------------------------------

def _published_gains(reference: dict, alphas) -> dict:
    gains = reference["capacity"]["gains_over_correlated"]
    published = {"iid": reference["capacity"]["loss_iid_minus_correlated"]}
    for alpha in alphas:
        key = f"{alpha:g}"
        if key in gains:
            for variant in IccVariant:
                published[CovarianceMode.icc(alpha, variant).label] = gains[key]
    return published


def cmd_capacity(config: ExperimentConfig) -> ExperimentResult:
    """
    Monte Carlo capacity of the i.i.d., correlated and ICC transmit covariances.

    All modes, alphas and SNRs share one H_w stack, so gains are differences
    of coupled estimators.
    """
    result = ExperimentResult()
    channel, raw = config.channel, config.raw_covariance
    pair = _split_pair(config)
    meta = {"snr_db": channel.snr_db, "raw_covariance": raw}

    _banner(1, 4, f"Drawing {channel.trials} channel realizations ({channel.n_r}x{channel.n_t}, seed {channel.seed})...")
    channels = sample_channels(channel)

    baseline = CovarianceMode.fixed(config.covariance)
    modes = [CovarianceMode.iid(), baseline]
    for variant in (config.variant,) + tuple(v for v in IccVariant if v is not config.variant):
        modes += [CovarianceMode.icc(alpha, variant) for alpha in config.capacity_alphas]

    _banner(2, 4, f"Mean capacity at {channel.snr_db:g} dB...")
    iid = mean_capacity(channel, modes[0], pair, raw, channels)
    correlated = mean_capacity(channel, baseline, pair, raw, channels)
    best_alpha, per_alpha = max_mean_capacity_over_alpha(channel, pair, config.capacity_alphas, config.variant, raw, channels)
    at_snr = {s.covariance_label: s for s in [iid, correlated] + per_alpha}

    loss = capacity_loss(iid, correlated)
    print(f"\n{' MODE':<28} | {'MEAN':>8} | {'STDERR':>8} | {'GAIN':>7} | {'PAIRED SE':>9} | {'INDEP SE':>9}")
    print(RULE)
    for label, s in at_snr.items():
        gain = s.mean - correlated.mean
        print(f" {label:<27} | {s.mean:>8.4f} | {s.stderr:>8.4f} | {gain:>+7.3f} | "
              f"{paired_gain_stderr(correlated, s):>9.4f} | {independent_gain_stderr(correlated, s):>9.4f}")
    print(f"\n Capacity lost to transmit correlation: {loss:.3f} bps/Hz")
    print(f" Best alpha ({config.variant.value}): {best_alpha:g}")

    _banner(3, 4, f"SNR sweep over {len(config.snr_grid)} points...")
    snrs = sorted(set(config.snr_grid) | {channel.snr_db})
    sweep = snr_sweep_samples(channel, snrs, modes, pair, raw, channels)
    gains = gain_table(sweep, baseline.label, channel.snr_db, _published_gains(load_reference(), config.capacity_alphas))
    for row in gains[gains["reading"] == "at_snr"].itertuples(index=False):
        delta = "" if np.isnan(row.delta) else f" (published {row.reference:g}, delta {row.delta:+.3f})"
        print(f" {row.mode:<27} gain {row.gain:+.3f} +/- {row.stderr:.3f}{delta}")

    _banner(4, 4, "Writing capacity artifacts...")
    n_cdf = min(config.cdf_trials, channel.trials)
    plotted = [iid.covariance_label, correlated.covariance_label] + [s.covariance_label for s in per_alpha]
    cdf_plot = []
    for (snr_db, label), samples in sweep.items():
        if snr_db != channel.snr_db:
            continue
        _emit_table(config, result, f"samples_{label}", samples_table(samples), **meta)
        # substream t only depends on (seed, t): the first n_cdf samples are an n_cdf-trial run
        cdf = empirical_cdf(samples.values[:n_cdf])
        _emit_table(config, result, f"cdf_{label}", cdf_table(cdf), **dict(meta, cdf_trials=n_cdf))
        if label in plotted:
            cdf_plot.append(cdf_series(label, cdf))
    _emit_table(config, result, "snr_sweep", sweep_table(sweep), raw_covariance=raw)
    _emit_table(config, result, "gains", gains, **dict(meta, baseline=baseline.label))

    sweep_df = result.tables["snr_sweep"]
    sweep_plot = [
        LineSeries(label, tuple(rows["snr_db"]), tuple(rows["mean"]))
        for label in plotted
        for rows in [sweep_df[sweep_df["mode"] == label]]
    ]
    _emit_plot(config, result, "cdf", cdf_plot, title=f"Capacity CDF at {channel.snr_db:g} dB",
               x_label="Capacity (bps/Hz)", y_label="CDF", y_range=(0.0, 1.0))
    _emit_plot(config, result, "snr_sweep", sweep_plot, title="Mean capacity vs SNR",
               x_label="SNR (dB)", y_label="Mean capacity (bps/Hz)")

    for path in result.paths:
        print(f" Saved {path}")
    return result


# --- reproduce-all ----------------------------------------------------------

def reproduce_all(config: ExperimentConfig) -> ExperimentResult:
    result = ExperimentResult()
    for name, command in (("split", cmd_split), ("icc-table", cmd_icc_table), ("capacity", cmd_capacity)):
        print("\n" + "=" * 60)
        print(f" --- {name.upper()} ---")
        print("=" * 60)
        result.merge(command(config))
    return result


COMMANDS = {
    "split": cmd_split,
    "icc-table": cmd_icc_table,
    "capacity": cmd_capacity,
    "reproduce-all": reproduce_all,
}


def run_command(name: str, config: ExperimentConfig) -> ExperimentResult:
    """Runs one command and, when requested, collects its tables into results.xlsx."""
    result = COMMANDS[name](config)
    if "xlsx" in config.formats and result.tables:
        path = write_workbook(result.tables, _path(config, "results.xlsx"))
        result.paths.append(path)
        print(f" Saved {path}")
    return result
