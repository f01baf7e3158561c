"""
Count datasets on disk.

Dataset CSV: comma separated, one row per observation, an optional single
header line (detected when no cell of the first line is empty or numeric), UNIX newlines.
Wide tables (one row per unit, one column per variable) come as CSV or Excel.
"""
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from app.domain.errors import InputError
from app.domain.mixtures.schemas import Dataset

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _is_header(first: pd.Series) -> bool:
    """A header line has no empty cell and no cell that reads as a number."""
    cells = first.str.strip()
    if (cells == "").any():
        return False
    return bool(pd.to_numeric(cells, errors="coerce").isna().all())


def _integer_frame(frame: pd.DataFrame, first_line: int) -> np.ndarray:
    """Validate that every cell is a nonnegative integer; first_line is the file line of frame row 0."""
    values = np.empty(frame.shape, dtype=np.int64)
    for j, column in enumerate(frame.columns):
        raw = frame[column].astype(str).str.strip()
        parsed = pd.to_numeric(raw, errors="coerce")
        bad = parsed.isna() | ~np.isfinite(parsed) | (parsed != np.round(parsed))
        if bad.any():
            i = int(np.flatnonzero(bad.to_numpy())[0])
            raise InputError(f"not an integer: {raw.iloc[i]!r}", row=first_line + i, column=str(column))
        negative = parsed < 0
        if negative.any():
            i = int(np.flatnonzero(negative.to_numpy())[0])
            raise InputError(f"negative count: {raw.iloc[i]}", row=first_line + i, column=str(column))
        values[:, j] = parsed.to_numpy().astype(np.int64)
    return values


def read_dataset(path: PathLike) -> Dataset:
    try:
        frame = pd.read_csv(path, header=None, dtype=str, keep_default_na=False, skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        raise InputError(f"{path}: file is empty")
    except pd.errors.ParserError as error:
        raise InputError(f"{path}: malformed CSV: {error}")

    first_line = 1
    if _is_header(frame.iloc[0]):
        frame.columns = [c.strip() for c in frame.iloc[0]]
        frame = frame.iloc[1:].reset_index(drop=True)
        first_line = 2
    else:
        frame.columns = [str(j + 1) for j in range(frame.shape[1])]
    if frame.empty:
        raise InputError(f"{path}: no data rows")
    return Dataset(_integer_frame(frame, first_line))


def dataset_csv(dataset: Dataset, columns: Optional[Sequence[str]] = None) -> str:
    frame = pd.DataFrame(dataset.values, columns=list(columns) if columns else None)
    return frame.to_csv(index=False, header=columns is not None, lineterminator="\n")


def write_dataset(dataset: Dataset, path: PathLike, columns: Optional[Sequence[str]] = None) -> None:
    Path(path).write_text(dataset_csv(dataset, columns))


def read_wide_table(path: PathLike) -> pd.DataFrame:
    suffix = Path(path).suffix.lower()
    try:
        if suffix in (".xlsx", ".xlsm"):
            frame = pd.read_excel(path, dtype=str, engine="openpyxl")
        else:
            frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise InputError(f"{path}: file is empty")
    except (pd.errors.ParserError, ValueError) as error:
        raise InputError(f"{path}: cannot read table: {error}")
    frame.columns = [str(c).strip() for c in frame.columns]
    return frame


def ingest_wide(path: PathLike, columns: List[str]) -> Dataset:
    """Counts of the chosen columns, in the given order, as an n x d dataset."""
    frame = read_wide_table(path)
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise InputError(f"{path}: no such column", column=missing[0])
    if frame.empty:
        raise InputError(f"{path}: no data rows")
    selected = frame[columns].fillna("")
    logger.info("ingesting %d rows x %d columns from %s", selected.shape[0], len(columns), path)
    return Dataset(_integer_frame(selected, first_line=2))

