"""File formats and chunked ingestion: CSV reading, Gram accumulation, and
JSON round-trips for the core value types.

The Gram accumulator keeps only X'X, X'Y, Y'Y and the row count, which is
all the fitting pipeline needs, so chunks of any size (from any number of
machines) can be summed and merged in any grouping.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SparseProjError
from .types import (CredibleRegion, Dataset, FitConfig, NormSelector, PosteriorDraw,
                    PriorConfig, SparseDraw, validate_dataset)


class CsvFormatError(SparseProjError):
    """Malformed CSV input: ragged row, non-numeric cell, or bad header."""


@dataclass(frozen=True)
class GramAccumulator:
    """Running cross products over ingested rows.

    Merging accumulators adds fields elementwise, so merge is associative
    and commutative up to float rounding regardless of chunk boundaries.
    """

    p: int
    sum_xtx: np.ndarray
    sum_xty: np.ndarray
    sum_yy: float
    count: int

    def __post_init__(self):
        xtx = np.array(self.sum_xtx, dtype=float, copy=True)
        xty = np.array(self.sum_xty, dtype=float, copy=True).ravel()
        if xtx.shape != (self.p, self.p) or xty.shape != (self.p,):
            raise DimensionMismatch("accumulator fields disagree with p")
        xtx.setflags(write=False)
        xty.setflags(write=False)
        object.__setattr__(self, "sum_xtx", xtx)
        object.__setattr__(self, "sum_xty", xty)

    @classmethod
    def empty(cls, p: int) -> "GramAccumulator":
        return cls(p=p, sum_xtx=np.zeros((p, p)), sum_xty=np.zeros(p),
                   sum_yy=0.0, count=0)

    def merge(self, other: "GramAccumulator") -> "GramAccumulator":
        if other.p != self.p:
            raise DimensionMismatch(f"cannot merge p = {self.p} with p = {other.p}")
        return GramAccumulator(p=self.p,
                               sum_xtx=self.sum_xtx + other.sum_xtx,
                               sum_xty=self.sum_xty + other.sum_xty,
                               sum_yy=self.sum_yy + other.sum_yy,
                               count=self.count + other.count)


def ingest_chunk(acc: GramAccumulator, X_chunk: np.ndarray,
                 Y_chunk: np.ndarray) -> GramAccumulator:
    """Fold a block of rows into the accumulator; empty chunks are no-ops."""
    X = np.atleast_2d(np.asarray(X_chunk, dtype=float))
    Y = np.asarray(Y_chunk, dtype=float).ravel()
    if X.size == 0 and Y.size == 0:
        return acc
    if X.shape[1] != acc.p:
        raise DimensionMismatch(f"chunk has {X.shape[1]} columns, expected {acc.p}")
    if X.shape[0] != Y.shape[0]:
        raise DimensionMismatch("chunk X and Y row counts differ")
    return GramAccumulator(p=acc.p,
                           sum_xtx=acc.sum_xtx + X.T @ X,
                           sum_xty=acc.sum_xty + X.T @ Y,
                           sum_yy=acc.sum_yy + float(Y @ Y),
                           count=acc.count + X.shape[0])


def read_csv(path: str, response: str,
             standardize: bool = False) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Read a UTF-8 CSV with a header row into (X, Y, predictor_names).

    The named response column becomes Y; every other column is a predictor,
    in header order.  No intercept column is added.  Ragged rows and
    non-numeric cells are rejected with the offending row number.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: empty file, header row required") from None
        header = [h.strip() for h in header]
        if response not in header:
            raise CsvFormatError(f"{path}: response column {response!r} not in header {header}")
        y_col = header.index(response)
        width = len(header)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise CsvFormatError(f"{path}, row {lineno}: expected {width} cells, got {len(row)}")
            try:
                rows.append([float(cell) for cell in row])
            except ValueError:
                bad = next(c for c in row if not _is_number(c))
                raise CsvFormatError(f"{path}, row {lineno}: non-numeric cell {bad!r}") from None
    if not rows:
        raise CsvFormatError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    Y = data[:, y_col]
    X = np.delete(data, y_col, axis=1)
    names = [h for i, h in enumerate(header) if i != y_col]
    if standardize:
        mu = X.mean(axis=0)
        sd = X.std(axis=0)
        if np.any(sd == 0):
            flat = names[int(np.argmax(sd == 0))]
            raise CsvFormatError(f"{path}: cannot standardize constant column {flat!r}")
        X = (X - mu) / sd
    return X, Y, names


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def dataset_from_csv(path: str, response: str, standardize: bool = False,
                     chunk_rows: int = 4096) -> tuple[Dataset, list[str]]:
    """Read a CSV and build a Dataset, running the rows through the chunked
    Gram accumulator (whose sums are checked against the dataset's)."""
    X, Y, names = read_csv(path, response, standardize=standardize)
    acc = GramAccumulator.empty(X.shape[1])
    for start in range(0, X.shape[0], chunk_rows):
        acc = ingest_chunk(acc, X[start:start + chunk_rows], Y[start:start + chunk_rows])
    ds = validate_dataset(X, Y)
    scale = max(1.0, float(np.abs(ds.gram).max()))
    if float(np.abs(acc.sum_xtx / acc.count - ds.gram).max()) > 1e-10 * scale:
        raise SparseProjError("accumulated Gram disagrees with direct computation")
    return ds, names


# ---------------------------------------------------------------------------
# JSON round-trips for the core types

def to_jsonable(obj) -> dict:
    """Lossless dict encoding of any core value type (float bits preserved
    through Python's repr-based JSON formatting)."""
    if isinstance(obj, Dataset):
        return {"type": "Dataset", "n": obj.n, "p": obj.p,
                "X": obj.X.tolist(), "Y": obj.Y.tolist(),
                "gram": obj.gram.tolist(), "xty": obj.xty.tolist()}
    if isinstance(obj, PriorConfig):
        return {"type": "PriorConfig", "a_n": obj.a_n, "b1": obj.b1, "b2": obj.b2}
    if isinstance(obj, FitConfig):
        return {"type": "FitConfig", "lambda_n": obj.lambda_n, "draws": obj.draws,
                "seed": obj.seed, "level": obj.level,
                "target_coverage": obj.target_coverage}
    if isinstance(obj, PosteriorDraw):
        return {"type": "PosteriorDraw", "theta": obj.theta.tolist(), "sigma": obj.sigma}
    if isinstance(obj, SparseDraw):
        return {"type": "SparseDraw", "theta_star": obj.theta_star.tolist(),
                "support": sorted(obj.support), "kkt_residual": obj.kkt_residual}
    if isinstance(obj, NormSelector):
        return {"type": "NormSelector", "kind": obj.kind, "index": obj.index,
                "indices": list(obj.indices) if obj.indices is not None else None}
    if isinstance(obj, CredibleRegion):
        return {"type": "CredibleRegion", "selector": to_jsonable(obj.selector),
                "center": obj.center.tolist(), "radius": obj.radius,
                "level": obj.level,
                "intervals": [list(iv) for iv in obj.intervals] if obj.intervals is not None else None,
                "degenerate": obj.degenerate}
    raise TypeError(f"no JSON encoding for {type(obj).__name__}")


def from_jsonable(data: dict):
    """Inverse of to_jsonable."""
    kind = data.get("type")
    if kind == "Dataset":
        return Dataset(n=data["n"], p=data["p"], X=np.asarray(data["X"], dtype=float),
                       Y=np.asarray(data["Y"], dtype=float),
                       gram=np.asarray(data["gram"], dtype=float),
                       xty=np.asarray(data["xty"], dtype=float))
    if kind == "PriorConfig":
        return PriorConfig(a_n=data["a_n"], b1=data["b1"], b2=data["b2"])
    if kind == "FitConfig":
        return FitConfig(lambda_n=data["lambda_n"], draws=data["draws"],
                         seed=data["seed"], level=data["level"],
                         target_coverage=data["target_coverage"])
    if kind == "PosteriorDraw":
        return PosteriorDraw(theta=np.asarray(data["theta"], dtype=float),
                             sigma=data["sigma"])
    if kind == "SparseDraw":
        return SparseDraw(theta_star=np.asarray(data["theta_star"], dtype=float),
                          support=frozenset(data["support"]),
                          kkt_residual=data["kkt_residual"])
    if kind == "NormSelector":
        return NormSelector(kind=data["kind"], index=data["index"],
                            indices=tuple(data["indices"]) if data["indices"] is not None else None)
    if kind == "CredibleRegion":
        return CredibleRegion(selector=from_jsonable(data["selector"]),
                              center=np.asarray(data["center"], dtype=float),
                              radius=data["radius"], level=data["level"],
                              intervals=tuple(tuple(iv) for iv in data["intervals"])
                              if data["intervals"] is not None else None,
                              degenerate=data["degenerate"])
    raise TypeError(f"cannot decode type tag {kind!r}")


def json_roundtrip(obj):
    """Encode to a JSON string and decode back; used to certify identity."""
    return from_jsonable(json.loads(json.dumps(to_jsonable(obj))))
