"""
Instantaneous and Monte Carlo mean capacity of semi-correlated Rayleigh MIMO.

    C = log2 det(I + (gamma0 / N_t) H_w R_t H_w^H)      (R_t = I for i.i.d.)

All modes evaluated by one sweep share the same H_w realizations (common random
numbers), so capacity gains are differences of coupled estimators.
"""
from dataclasses import dataclass, replace

import numpy as np
import pandas as pd

from src.core.errors import ComparisonError, DefinitenessError, PreconditionError, ShapeError, attach_context
from src.core.linalg import (
    as_matrix,
    identity,
    log2_abs_det,
    log2_det_hermitian_pd,
    log2_det_hermitian_pd_stack,
    mat_mul,
    conj_transpose,
    psd_project,
)
from src.simulation.channel import ChannelConfig, ChannelRealization, sample_channels
from src.splitting.icc import IccVariant, iteration_matrix
from src.splitting.toeplitz_split import SplitPair, dense_of_toeplitz

MODE_KINDS = ("iid", "fixed", "icc")


@dataclass(frozen=True, eq=False)
class CovarianceMode:
    kind: str
    alpha: float = None
    variant: IccVariant = None
    matrix: np.ndarray = None
    name: str = None

    def __post_init__(self):
        if self.kind not in MODE_KINDS:
            raise PreconditionError(f"unknown covariance mode '{self.kind}'")
        if self.kind == "icc":
            if self.alpha is None or not self.alpha > 0:
                raise PreconditionError(f"ICC covariance needs alpha > 0, got {self.alpha}")
            object.__setattr__(self, "variant", IccVariant.parse(self.variant or IccVariant.AS_PRINTED))

    @classmethod
    def iid(cls):
        return cls("iid")

    @classmethod
    def fixed(cls, matrix=None, name="correlated"):
        return cls("fixed", matrix=None if matrix is None else as_matrix(matrix), name=name)

    @classmethod
    def icc(cls, alpha, variant=IccVariant.AS_PRINTED):
        return cls("icc", alpha=float(alpha), variant=variant)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == "icc":
            return f"icc_{self.variant.value}_a{self.alpha:g}"
        return "iid" if self.kind == "iid" else "correlated"


@dataclass(frozen=True, eq=False)
class CapacitySamples:
    values: np.ndarray
    config: ChannelConfig
    covariance_label: str
    mode: CovarianceMode = None

    @property
    def trials(self) -> int:
        return int(self.values.size)

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def std(self) -> float:
        return float(np.std(self.values, ddof=1)) if self.trials > 1 else 0.0

    @property
    def stderr(self) -> float:
        return self.std / np.sqrt(self.trials)


@dataclass(frozen=True)
class EmpiricalCdf:
    points: tuple

    @property
    def capacities(self) -> list:
        return [c for c, _ in self.points]

    @property
    def probabilities(self) -> list:
        return [p for _, p in self.points]


def _log2_det_capacity(gram: np.ndarray, gamma0: float, n_t: int, raw: bool = False) -> float:
    m = identity(gram.shape[0]) + (gamma0 / n_t) * gram
    return log2_abs_det(m) if raw else log2_det_hermitian_pd(m)


def instantaneous_capacity(h: ChannelRealization, gamma0: float, n_t: int) -> float:
    if not gamma0 > 0:
        raise PreconditionError(f"gamma0 must be positive, got {gamma0}")
    return _log2_det_capacity(mat_mul(h.h, conj_transpose(h.h)), gamma0, n_t)


def instantaneous_capacity_correlated(hw: ChannelRealization, r_t, gamma0: float, n_t: int, raw: bool = False) -> float:
    """
    Capacity with transmit covariance r_t. By default r_t is replaced by its
    Hermitian part with negative eigenvalues clamped to zero; `raw=True`
    keeps r_t as given and takes log2 |det| instead.
    """
    if not gamma0 > 0:
        raise PreconditionError(f"gamma0 must be positive, got {gamma0}")
    r_t = as_matrix(r_t)
    if r_t.shape != (n_t, n_t):
        raise ShapeError(f"transmit covariance must be {n_t}x{n_t}, got {r_t.shape[0]}x{r_t.shape[1]}")
    effective = r_t if raw else psd_project(r_t)
    gram = mat_mul(mat_mul(hw.h, effective), conj_transpose(hw.h))
    return _log2_det_capacity(gram, gamma0, n_t, raw)


def resolve_covariance(mode: CovarianceMode, n_t: int, pair: SplitPair = None, raw: bool = False):
    """
    Returns:
        np.ndarray or None: the transmit covariance entering the determinant
        (None for i.i.d.), projected onto the Hermitian PSD cone unless `raw`.
    """
    if mode.kind == "iid":
        return None
    if mode.kind == "fixed" and mode.matrix is not None:
        r = mode.matrix
    elif pair is None:
        raise PreconditionError(f"covariance mode '{mode.label}' needs a split covariance")
    elif mode.kind == "fixed":
        r = dense_of_toeplitz(pair.source)
    else:
        r = iteration_matrix(pair, mode.alpha, mode.variant)

    if r.shape != (n_t, n_t):
        raise ShapeError(f"covariance for '{mode.label}' is {r.shape[0]}x{r.shape[1]}, config has n_t={n_t}")
    return r if raw else psd_project(r)


def _capacity_stack(channels: np.ndarray, r, gamma0: float, n_t: int, raw: bool) -> np.ndarray:
    hw_h = channels.conj().transpose(0, 2, 1)
    gram = channels @ hw_h if r is None else (channels @ r) @ hw_h
    m = identity(channels.shape[1]) + (gamma0 / n_t) * gram
    if raw:
        return np.array([log2_abs_det(x) for x in m])
    try:
        return log2_det_hermitian_pd_stack(m)
    except DefinitenessError as e:
        raise attach_context(e, trial=e.index) from e


def _check_channels(channels: np.ndarray, config: ChannelConfig):
    expected = (config.trials, config.n_r, config.n_t)
    if channels.shape != expected:
        raise ShapeError(f"channel stack has shape {channels.shape}, config expects {expected}")


def mean_capacity(config: ChannelConfig, mode: CovarianceMode, r_source: SplitPair = None,
                  raw: bool = False, channels: np.ndarray = None) -> CapacitySamples:
    """
    Monte Carlo capacity samples, one per trial in trial order.

    `channels` lets callers pass a pre-drawn H_w stack (from `sample_channels`)
    to couple several modes on the same realizations.
    """
    if channels is None:
        channels = sample_channels(config)
    _check_channels(channels, config)
    r = resolve_covariance(mode, config.n_t, r_source, raw)
    values = _capacity_stack(channels, r, config.gamma0, config.n_t, raw)
    return CapacitySamples(values, config, mode.label, mode)


def max_mean_capacity_over_alpha(config: ChannelConfig, pair: SplitPair, alphas,
                                 variant=IccVariant.AS_PRINTED, raw: bool = False, channels=None):
    """
    Returns:
        tuple: (best alpha by mean capacity, ties to the smaller alpha;
        CapacitySamples per alpha in input order).
    """
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise PreconditionError("alpha grid is empty")
    if channels is None:
        channels = sample_channels(config)

    per_alpha = [mean_capacity(config, CovarianceMode.icc(a, variant), pair, raw, channels) for a in alphas]
    best_alpha, best_mean = None, None
    for alpha, samples in sorted(zip(alphas, per_alpha), key=lambda item: item[0]):
        if best_mean is None or samples.mean > best_mean:
            best_alpha, best_mean = alpha, samples.mean
    return best_alpha, per_alpha


def _check_comparable(base: CapacitySamples, improved: CapacitySamples):
    a, b = base.config, improved.config
    if (a.n_t, a.n_r, a.snr_db) != (b.n_t, b.n_r, b.snr_db):
        raise ComparisonError(
            f"cannot compare {base.covariance_label} ({a.n_r}x{a.n_t}, {a.snr_db} dB) "
            f"with {improved.covariance_label} ({b.n_r}x{b.n_t}, {b.snr_db} dB)"
        )


def capacity_gain(base: CapacitySamples, improved: CapacitySamples) -> float:
    _check_comparable(base, improved)
    return improved.mean - base.mean


def paired_gain_stderr(base: CapacitySamples, improved: CapacitySamples) -> float:
    """Standard error of the gain when both runs share their channel realizations."""
    _check_comparable(base, improved)
    if base.trials != improved.trials:
        raise ComparisonError("paired comparison needs equal trial counts")
    if base.trials < 2:
        return 0.0
    diff = improved.values - base.values
    return float(np.std(diff, ddof=1) / np.sqrt(diff.size))


def independent_gain_stderr(base: CapacitySamples, improved: CapacitySamples) -> float:
    _check_comparable(base, improved)
    return float(np.hypot(base.stderr, improved.stderr))


def empirical_cdf(samples) -> EmpiricalCdf:
    values = np.sort(np.asarray(getattr(samples, "values", samples), dtype=float))
    n = values.size
    if n == 0:
        raise PreconditionError("empirical CDF of an empty sample")
    return EmpiricalCdf(tuple((float(c), (i + 1) / n) for i, c in enumerate(values)))


def snr_sweep_samples(config_template: ChannelConfig, snrs_db, modes, pair: SplitPair = None,
                      raw: bool = False, channels: np.ndarray = None) -> dict:
    """
    Evaluates every (snr, mode) pair on one shared H_w stack, drawn from
    `config_template` unless `channels` is given.

    Returns:
        dict: {(snr_db, mode label): CapacitySamples}, in sweep order.
    """
    snrs_db, modes = list(snrs_db), list(modes)
    if not snrs_db or not modes:
        raise PreconditionError("SNR sweep needs at least one SNR and one mode")

    if channels is None:
        channels = sample_channels(config_template)
    _check_channels(channels, config_template)
    covariances = [(mode, resolve_covariance(mode, config_template.n_t, pair, raw)) for mode in modes]
    results = {}
    for snr_db in snrs_db:
        config = replace(config_template, snr_db=float(snr_db))
        for mode, r in covariances:
            values = _capacity_stack(channels, r, config.gamma0, config.n_t, raw)
            results[(float(snr_db), mode.label)] = CapacitySamples(values, config, mode.label, mode)
    return results


def sweep_table(samples: dict) -> pd.DataFrame:
    rows = []
    for (snr_db, label), s in samples.items():
        rows.append({
            "snr_db": snr_db,
            "mode": label,
            "alpha": s.mode.alpha if s.mode is not None and s.mode.kind == "icc" else np.nan,
            "mean": s.mean,
            "stderr": s.stderr,
            "trials": s.trials,
            "seed": s.config.seed,
        })
    return pd.DataFrame(rows, columns=["snr_db", "mode", "alpha", "mean", "stderr", "trials", "seed"])


def snr_sweep(config_template: ChannelConfig, snrs_db, modes, pair: SplitPair = None,
              raw: bool = False, channels: np.ndarray = None) -> pd.DataFrame:
    return sweep_table(snr_sweep_samples(config_template, snrs_db, modes, pair, raw, channels))


def gain_table(samples: dict, baseline_label: str, at_snr_db: float, reference: dict = None) -> pd.DataFrame:
    """
    Gains of every mode over the baseline, read two ways: at `at_snr_db`, and
    averaged over all swept SNRs. `reference` maps mode labels to published
    gains; the delta column is measured minus reference.
    """
    reference = reference or {}
    snrs = sorted({snr for snr, _ in samples})
    labels = list(dict.fromkeys(label for _, label in samples if label != baseline_label))

    rows = []
    for label in labels:
        per_snr = [(samples[(snr, baseline_label)], samples[(snr, label)]) for snr in snrs]
        mode = per_snr[0][1].mode
        readings = []
        if float(at_snr_db) in snrs:
            base, improved = samples[(float(at_snr_db), baseline_label)], samples[(float(at_snr_db), label)]
            readings.append(("at_snr", float(at_snr_db), capacity_gain(base, improved), paired_gain_stderr(base, improved)))
        gains = [capacity_gain(b, i) for b, i in per_snr]
        errors = [paired_gain_stderr(b, i) for b, i in per_snr]
        readings.append(("snr_average", np.nan, float(np.mean(gains)), float(np.sqrt(np.sum(np.square(errors)))) / len(errors)))

        ref = reference.get(label, np.nan)
        for reading, snr_db, gain, stderr in readings:
            rows.append({
                "mode": label,
                "alpha": mode.alpha if mode is not None and mode.kind == "icc" else np.nan,
                "variant": mode.variant.value if mode is not None and mode.kind == "icc" else "",
                "reading": reading,
                "snr_db": snr_db,
                "gain": gain,
                "stderr": stderr,
                "reference": ref,
                "delta": gain - ref,
            })
    return pd.DataFrame(rows, columns=["mode", "alpha", "variant", "reading", "snr_db", "gain", "stderr", "reference", "delta"])


def capacity_loss(iid: CapacitySamples, correlated: CapacitySamples) -> float:
    """Capacity lost to transmit correlation: mean(iid) - mean(correlated)."""
    return capacity_gain(correlated, iid)


def samples_table(samples: CapacitySamples) -> pd.DataFrame:
    return pd.DataFrame({"trial": np.arange(samples.trials), "capacity": samples.values})


def cdf_table(cdf: EmpiricalCdf) -> pd.DataFrame:
    return pd.DataFrame(list(cdf.points), columns=["capacity", "probability"])
