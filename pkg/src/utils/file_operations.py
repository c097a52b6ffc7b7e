# src/utils/file_operations.py

import aiofiles
import asyncio
import numpy as np
import pandas as pd
from pathlib import Path
from typing import Iterable

from src.learning.dataset import Dataset
from src.models.mixture import Gmm
from src.utils.errors import DatasetFormatError
from src.utils.logging import Logger
from src.utils.serialization import gmm_from_json, gmm_to_json
from config.config import config

# Initialize Logger
logger = Logger.get_logger(
    "FileOperationsLogger", config.paths.log_dir / "file_operations.log"
)

BINARY_SUFFIXES = {".bin", ".f64"}
# two little-endian uint64 values: m, d
BINARY_HEADER = np.dtype("<u8")


def _is_binary(path: Path) -> bool:
    return path.suffix.lower() in BINARY_SUFFIXES


def _parse_csv(path: Path) -> np.ndarray:
    try:
        frame = pd.read_csv(path, header=None, dtype=str, skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        raise DatasetFormatError(f"{path}: no data rows") from None
    except pd.errors.ParserError as e:
        raise DatasetFormatError(f"{path}: {e}") from e
    values = frame.apply(lambda column: pd.to_numeric(column.str.strip(), errors="coerce"))
    bad = np.argwhere(values.isna().to_numpy())
    if bad.size:
        row, col = bad[0]
        raw = frame.iat[row, col]
        what = "missing value" if pd.isna(raw) else f"cannot parse {raw!r} as a number"
        raise DatasetFormatError(f"{path}: line {row + 1}, field {col + 1}: {what}")
    return values.to_numpy(dtype=np.float64)


def _write_csv(path: Path, points: np.ndarray):
    pd.DataFrame(points).to_csv(path, header=False, index=False, float_format="%.17g")


def _parse_binary(path: Path, raw: bytes) -> np.ndarray:
    header_size = 2 * BINARY_HEADER.itemsize
    if len(raw) < header_size:
        raise DatasetFormatError(f"{path}: truncated header ({len(raw)} bytes)")
    m, d = (int(v) for v in np.frombuffer(raw[:header_size], dtype=BINARY_HEADER))
    expected = header_size + 8 * m * d
    if len(raw) != expected:
        raise DatasetFormatError(
            f"{path}: header declares m={m}, d={d} ({expected} bytes), file has {len(raw)}"
        )
    return np.frombuffer(raw[header_size:], dtype="<f8").reshape(m, d).astype(np.float64)


def _binary_bytes(points: np.ndarray) -> bytes:
    header = np.array(points.shape, dtype=BINARY_HEADER).tobytes()
    return header + np.ascontiguousarray(points, dtype="<f8").tobytes()


class FileOperations:
    @staticmethod
    async def read_file_async(file_path: Path) -> str:
        """Asynchronously read a file's content."""
        try:
            async with aiofiles.open(file_path, "r", encoding="utf-8") as f:
                content = await f.read()
            logger.debug(f"Read file asynchronously: {file_path}")
            return content
        except Exception as e:
            logger.error(
                f"Failed to read file asynchronously {file_path}: {e}", exc_info=True
            )
            raise

    @staticmethod
    async def write_file_async(file_path: Path, content: str):
        """Asynchronously write content to a file."""
        try:
            async with aiofiles.open(file_path, "w", encoding="utf-8") as f:
                await f.write(content)
            logger.debug(f"Wrote file asynchronously: {file_path}")
        except Exception as e:
            logger.error(
                f"Failed to write file asynchronously {file_path}: {e}", exc_info=True
            )
            raise

    @staticmethod
    async def append_lines_async(file_path: Path, lines: Iterable[str]):
        """Append newline-terminated records, e.g. JSON lines."""
        try:
            async with aiofiles.open(file_path, "a", encoding="utf-8") as f:
                for line in lines:
                    await f.write(line + "\n")
            logger.debug(f"Appended records to {file_path}")
        except Exception as e:
            logger.error(f"Failed to append to {file_path}: {e}", exc_info=True)
            raise

    @staticmethod
    async def ensure_directory(directory: Path):
        """Ensure that a directory exists asynchronously."""
        try:
            await asyncio.to_thread(directory.mkdir, parents=True, exist_ok=True)
            logger.debug(f"Ensured existence of directory: {directory}")
        except Exception as e:
            logger.error(f"Failed to create directory {directory}: {e}", exc_info=True)
            raise

    @staticmethod
    async def load_dataset(file_path: Path) -> Dataset:
        """Read a headerless CSV, or a binary f64 file with an (m, d) uint64 header."""
        try:
            if _is_binary(file_path):
                async with aiofiles.open(file_path, "rb") as f:
                    raw = await f.read()
                points = _parse_binary(file_path, raw)
            else:
                points = await asyncio.to_thread(_parse_csv, file_path)
            dataset = Dataset.from_points(points)
            logger.debug(f"Loaded {dataset.m}x{dataset.d} dataset from {file_path}")
            return dataset
        except DatasetFormatError:
            raise
        except ValueError as e:
            raise DatasetFormatError(f"{file_path}: {e}") from e
        except Exception as e:
            logger.error(f"Failed to load dataset {file_path}: {e}", exc_info=True)
            raise

    @staticmethod
    async def save_dataset(dataset: Dataset, file_path: Path):
        try:
            if _is_binary(file_path):
                async with aiofiles.open(file_path, "wb") as f:
                    await f.write(_binary_bytes(dataset.points))
            else:
                await asyncio.to_thread(_write_csv, file_path, dataset.points)
            logger.debug(f"Saved {dataset.m}x{dataset.d} dataset to {file_path}")
        except Exception as e:
            logger.error(f"Failed to save dataset {file_path}: {e}", exc_info=True)
            raise

    @staticmethod
    async def load_gmm(file_path: Path) -> Gmm:
        content = await FileOperations.read_file_async(file_path)
        return gmm_from_json(content, source=str(file_path))

    @staticmethod
    async def save_gmm(g: Gmm, file_path: Path):
        await FileOperations.write_file_async(file_path, gmm_to_json(g) + "\n")
