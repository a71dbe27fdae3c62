import json
import os

import numpy as np
import pandas as pd

SIGNIFICANT_DIGITS = 6


def format_decimal(value: float, digits: int = SIGNIFICANT_DIGITS) -> str:
    """Plain decimal notation (never an exponent) rounded to `digits` significant digits; NaN becomes empty."""
    if pd.isna(value):
        return ""
    return np.format_float_positional(float(value), precision=digits, unique=False, fractional=False, trim="-")


def _metadata_lines(metadata: dict) -> str:
    return "".join(f"# {key}: {value}\n" for key, value in (metadata or {}).items())


def write_csv(df: pd.DataFrame, path, metadata: dict = None, digits: int = SIGNIFICANT_DIGITS) -> str:
    """
    Writes a table as UTF-8 CSV with LF line endings. Float columns are written
    in decimal notation with `digits` significant digits. Every `metadata`
    entry becomes a leading `# key: value` line, followed by the column row.

    Returns:
        str: The path to the saved file.
    """
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    out = df.copy()
    for column in out.columns:
        if pd.api.types.is_float_dtype(out[column]):
            out[column] = out[column].map(lambda v: format_decimal(v, digits))
    body = out.to_csv(index=False, lineterminator="\n")
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(_metadata_lines(metadata))
        f.write(body)
    return str(path)


def read_csv(path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def write_json(payload: dict, path) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(payload, f, ensure_ascii=False, indent=2)
        f.write("\n")
    return str(path)


def write_workbook(tables: dict, path) -> str:
    """
    One sheet per table, sheet names truncated to Excel's 31 characters.

    Returns:
        str: The path to the saved workbook, or None when `tables` is empty.
    """
    if not tables:
        return None
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with pd.ExcelWriter(path, engine="openpyxl") as writer:
        for name, df in tables.items():
            df.to_excel(writer, sheet_name=name[:31], index=False)
    return str(path)
