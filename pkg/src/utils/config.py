import json
import os
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from dotenv import load_dotenv

from src.core.errors import ConfigError, ValidationError
from src.simulation.channel import ChannelConfig
from src.splitting.icc import DEFAULT_EPS_CONV, IccVariant
from src.splitting.toeplitz_split import (
    ToeplitzCovariance,
    dense_of_toeplitz,
    matrix_from_pairs,
    toeplitz_from_document,
)

REFERENCE_PATH = Path(__file__).with_name("paper_reference.json")
OUTPUT_FORMATS = ("csv", "svg", "png", "xlsx")

DEFAULT_SNR_GRID = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
DEFAULT_CAPACITY_ALPHAS = (5.0, 10.0, 20.0, 30.0)
DEFAULT_CDF_TRIALS = 1_000


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Everything one reproducible run needs; built by `load_config`."""
    covariance: np.ndarray
    covariance_hermitian: bool
    channel: ChannelConfig
    snr_grid: tuple
    cdf_trials: int
    variant: IccVariant
    alpha_grid: tuple
    capacity_alphas: tuple
    eps_conv: float
    raw_covariance: bool
    output_dir: Path
    formats: tuple


def load_reference() -> dict:
    """Published golden values (worked example, bound table, capacity figures)."""
    with open(REFERENCE_PATH, "r", encoding="utf-8") as f:
        return json.load(f)


def reference_covariance() -> ToeplitzCovariance:
    return toeplitz_from_document(load_reference()["reference_covariance"])


def reference_alpha_grid() -> tuple:
    return tuple(float(row["alpha"]) for row in load_reference()["bound_table"]["rows"])


def _parse_covariance(entry, base_dir: Path):
    """
    Returns:
        tuple: (dense matrix, hermitian flag) for any accepted covariance form.
    """
    if entry is None or entry == "reference":
        r = reference_covariance()
        return dense_of_toeplitz(r), r.hermitian
    if not isinstance(entry, dict):
        raise ConfigError(f"covariance must be 'reference' or an object, got {entry!r}")
    if "file" in entry:
        path = Path(entry["file"])
        if not path.is_absolute():
            path = base_dir / path
        try:
            with open(path, "r", encoding="utf-8") as f:
                doc = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read covariance file {path}: {e}") from e
        return _parse_covariance(doc, path.parent)
    if "dense" in entry:
        return matrix_from_pairs(entry["dense"]), bool(entry.get("hermitian", False))
    r = toeplitz_from_document(entry)
    return dense_of_toeplitz(r), r.hermitian


def _floats(values, name: str) -> tuple:
    if isinstance(values, str):
        values = [v for v in values.split(",") if v.strip()]
    try:
        parsed = tuple(float(v) for v in values)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name} must be a list of numbers: {e}") from e
    if not parsed:
        raise ConfigError(f"{name} is empty")
    return parsed


def _positive_grid(values, name: str) -> tuple:
    grid = _floats(values, name)
    bad = [a for a in grid if not a > 0]
    if bad:
        raise ConfigError(f"{name} must be strictly positive, got {bad}")
    return grid


def _formats(values) -> tuple:
    if isinstance(values, str):
        values = values.split(",")
    if not isinstance(values, (list, tuple)) or not all(isinstance(v, str) for v in values):
        raise ConfigError(f"formats must be a list of names, got {values!r}")
    formats = tuple(dict.fromkeys(v.strip().lower() for v in values if v.strip()))
    unknown = [f for f in formats if f not in OUTPUT_FORMATS]
    if unknown:
        raise ConfigError(f"unknown output format(s) {unknown}; choose from {', '.join(OUTPUT_FORMATS)}")
    return formats


def _int(value, name: str) -> int:
    if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    try:
        return int(value)
    except (TypeError, ValueError, OverflowError) as e:
        raise ConfigError(f"{name} must be an integer, got {value!r}") from e


def _float(value, name: str) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    try:
        parsed = float(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name} must be a number, got {value!r}") from e
    if not np.isfinite(parsed):
        raise ConfigError(f"{name} must be finite, got {value!r}")
    return parsed


def _section(doc: dict, key: str) -> dict:
    section = doc.get(key, {})
    if not isinstance(section, dict):
        raise ConfigError(f"config section '{key}' must be an object, got {type(section).__name__}")
    return section


def _env_overrides() -> dict:
    load_dotenv()
    names = {
        "seed": "ICC_SEED",
        "trials": "ICC_TRIALS",
        "out": "ICC_OUTPUT_DIR",
        "formats": "ICC_FORMATS",
        "variant": "ICC_VARIANT",
    }
    return {key: os.getenv(var) for key, var in names.items() if os.getenv(var)}


def load_config(path=None, overrides: dict = None) -> ExperimentConfig:
    """
    Builds an ExperimentConfig from defaults, the optional JSON file at `path`,
    ICC_* environment variables (a local .env is honoured) and `overrides`
    (command-line flags: seed, trials, alpha, variant, out, formats), in that
    order of precedence. An `alpha` override replaces both the bound-table grid
    and the capacity alphas.
    """
    doc = {}
    base_dir = Path.cwd()
    if path is not None:
        path = Path(path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                doc = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        if not isinstance(doc, dict):
            raise ConfigError(f"config {path} must be a JSON object, got {type(doc).__name__}")
        base_dir = path.parent

    flat = {**_env_overrides(), **{k: v for k, v in (overrides or {}).items() if v is not None}}
    channel_doc = _section(doc, "channel")
    icc_doc = _section(doc, "icc")
    capacity_doc = _section(doc, "capacity")

    try:
        covariance, hermitian = _parse_covariance(doc.get("covariance"), base_dir)
        channel = ChannelConfig(
            n_t=_int(channel_doc.get("n_t", covariance.shape[0]), "channel.n_t"),
            n_r=_int(channel_doc.get("n_r", 4), "channel.n_r"),
            snr_db=_float(channel_doc.get("snr_db", 30.0), "channel.snr_db"),
            trials=_int(flat.get("trials", channel_doc.get("trials", 10_000)), "trials"),
            seed=_int(flat.get("seed", channel_doc.get("seed", 0)), "seed"),
        )
        variant = IccVariant.parse(flat.get("variant", icc_doc.get("variant", IccVariant.AS_PRINTED.value)))
    except ValidationError as e:
        raise ConfigError(str(e)) from e

    alpha_grid = _positive_grid(flat.get("alpha", icc_doc.get("alpha_grid", reference_alpha_grid())), "alpha grid")
    eps_conv = _float(icc_doc.get("eps_conv", DEFAULT_EPS_CONV), "icc.eps_conv")
    if not eps_conv > 0:
        raise ConfigError(f"eps_conv must be positive, got {eps_conv}")

    cdf_trials = _int(flat.get("cdf_trials", capacity_doc.get("cdf_trials", DEFAULT_CDF_TRIALS)), "cdf_trials")
    if cdf_trials < 1:
        raise ConfigError(f"cdf_trials must be at least 1, got {cdf_trials}")

    output_dir = flat.get("out", doc.get("output_dir", "output"))
    if not isinstance(output_dir, (str, os.PathLike)):
        raise ConfigError(f"output_dir must be a path, got {output_dir!r}")
    output_dir = Path(output_dir)
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"cannot create output directory {output_dir}: {e}") from e
    if not os.access(output_dir, os.W_OK):
        raise ConfigError(f"output directory {output_dir} is not writable")

    return ExperimentConfig(
        covariance=covariance,
        covariance_hermitian=hermitian,
        channel=channel,
        snr_grid=_floats(capacity_doc.get("snr_grid", DEFAULT_SNR_GRID), "snr grid"),
        cdf_trials=cdf_trials,
        variant=variant,
        alpha_grid=alpha_grid,
        capacity_alphas=_positive_grid(flat.get("alpha", capacity_doc.get("alphas", DEFAULT_CAPACITY_ALPHAS)), "capacity alphas"),
        eps_conv=eps_conv,
        raw_covariance=bool(flat.get("raw_covariance", capacity_doc.get("raw_covariance", False))),
        output_dir=output_dir,
        formats=_formats(flat.get("formats", doc.get("formats", ("csv", "svg")))),
    )


def with_overrides(config: ExperimentConfig, **changes) -> ExperimentConfig:
    return replace(config, **changes)
