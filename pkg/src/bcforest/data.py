"""Dataset container, CSV ingestion, and cross-validation fold assignment."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, IngestionError, UsageError

DEFAULT_MISSING_MARKERS = ("",)


@dataclass(frozen=True)
class Dataset:
    """Immutable training data: an n x p feature matrix plus n responses.

    All values are finite float64; arrays are marked read-only so a
    Dataset can be shared freely across threads.
    """

    features: np.ndarray
    responses: np.ndarray
    feature_names: tuple[str, ...] = ()
    dropped_rows: int = 0

    def __post_init__(self) -> None:
        X = np.ascontiguousarray(np.asarray(self.features, dtype=np.float64))
        y = np.ascontiguousarray(np.asarray(self.responses, dtype=np.float64))
        if X.ndim != 2:
            raise UsageError(f"features must be a 2-d matrix, got ndim={X.ndim}")
        if y.ndim != 1:
            raise UsageError(f"responses must be a 1-d vector, got ndim={y.ndim}")
        if X.shape[0] != y.shape[0]:
            raise UsageError(
                f"feature rows ({X.shape[0]}) != response length ({y.shape[0]})"
            )
        if X.shape[0] < 1 or X.shape[1] < 1:
            raise UsageError("dataset needs at least one row and one feature")
        if not np.isfinite(X).all():
            raise UsageError("features contain non-finite values")
        if not np.isfinite(y).all():
            raise UsageError("responses contain non-finite values")
        names = tuple(self.feature_names) or tuple(f"x{j}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise UsageError(
                f"{len(names)} feature names for {X.shape[1]} features"
            )
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "responses", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    def subset(self, rows: np.ndarray) -> "Dataset":
        """New Dataset holding the given rows (copies, original order kept)."""
        rows = np.asarray(rows, dtype=np.intp)
        return Dataset(self.features[rows], self.responses[rows], self.feature_names)


def _parse_cell(cell: str) -> float | None:
    """float value, or None when the token is non-numeric."""
    try:
        v = float(cell)
    except ValueError:
        return None
    # 'nan'/'inf' parse as floats but are not admissible values
    if not np.isfinite(v):
        return None
    return v


def _resolve_column(ref: str | int, names: list[str], what: str) -> int:
    if isinstance(ref, (int, np.integer)):
        j = int(ref)
        if not 0 <= j < len(names):
            raise ConfigError(f"{what} column index {j} out of range (p={len(names)})")
        return j
    if ref in names:
        return names.index(ref)
    if isinstance(ref, str) and ref.lstrip("-").isdigit():
        return _resolve_column(int(ref), names, what)
    raise ConfigError(f"{what} column {ref!r} not found among {names}")


def load_csv(
    path: str,
    target: str | int,
    *,
    header: bool = True,
    drop: tuple[str | int, ...] = (),
    missing_markers: tuple[str, ...] = DEFAULT_MISSING_MARKERS,
) -> Dataset:
    """Load a CSV file into a Dataset.

    Parameters
    ----------
    path : str
        File to read (UTF-8, comma-separated, decimal-point reals).
    target : str or int
        Response column, by name (requires a header) or position.
    header : bool
        Whether the first row holds column names.  Without a header,
        columns are named ``x0..x{p-1}`` and referenced by index.
    drop : tuple
        Columns to discard before anything else, by name or position.
    missing_markers : tuple of str
        Cell tokens treated as missing.  Rows containing a missing cell
        in a retained column are dropped and counted in
        ``Dataset.dropped_rows``.  Any other non-numeric token in a
        column that is otherwise numeric is an ingestion error.

    A retained column whose every non-missing cell is non-numeric is
    treated as categorical and integer-encoded by the sorted order of
    its distinct values.
    """
    try:
        with open(path, "r", encoding="utf-8-sig", newline="") as fh:
            rows = [row for row in csv.reader(fh)]
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc

    rows = [row for row in rows if row]  # ignore completely blank lines
    if not rows:
        raise IngestionError(f"{path}: file is empty")

    if header:
        names = [cell.strip() for cell in rows[0]]
        body = rows[1:]
    else:
        names = [f"x{j}" for j in range(len(rows[0]))]
        body = rows
    if not body:
        raise IngestionError(f"{path}: no data rows")

    width = len(names)
    for r, row in enumerate(body, start=1):
        if len(row) != width:
            raise IngestionError(
                f"{path}: row {r} has {len(row)} cells, expected {width}"
            )

    drop_idx = {_resolve_column(d, names, "drop") for d in drop}
    target_idx = _resolve_column(target, names, "target")
    if target_idx in drop_idx:
        raise ConfigError(f"target column {target!r} is in the drop list")
    kept = [j for j in range(width) if j not in drop_idx]

    markers = set(missing_markers)
    cells = [[body[r][j].strip() for j in kept] for r in range(len(body))]
    missing = [[c in markers for c in row] for row in cells]

    # Column typing: numeric unless every non-missing cell fails to parse.
    columns: list[np.ndarray] = []
    for cj in range(len(kept)):
        vals = [cells[r][cj] for r in range(len(body))]
        parsed = [None if missing[r][cj] else _parse_cell(vals[r]) for r in range(len(body))]
        tokens = [vals[r] for r in range(len(body)) if not missing[r][cj]]
        numbers = [v for v in parsed if v is not None]
        col = np.full(len(body), np.nan)
        if tokens and not numbers:
            # categorical: stable integer codes by sorted distinct value
            codes = {v: float(i) for i, v in enumerate(sorted(set(tokens)))}
            for r in range(len(body)):
                if not missing[r][cj]:
                    col[r] = codes[vals[r]]
        else:
            for r in range(len(body)):
                if missing[r][cj]:
                    continue
                if parsed[r] is None:
                    raise IngestionError(
                        f"{path}: non-numeric cell {vals[r]!r} at data row {r + 1}, "
                        f"column {names[kept[cj]]!r}"
                    )
                col[r] = parsed[r]
        columns.append(col)

    keep_row = np.array([not any(m) for m in missing], dtype=bool)
    dropped = int((~keep_row).sum())
    if not keep_row.any():
        raise IngestionError(f"{path}: every row has missing values")

    table = np.column_stack(columns)[keep_row]
    tpos = kept.index(target_idx)
    responses = table[:, tpos]
    feature_cols = [j for j in range(len(kept)) if j != tpos]
    if not feature_cols:
        raise ConfigError(f"{path}: no feature columns left besides the target")
    features = table[:, feature_cols]
    fnames = tuple(names[kept[j]] for j in feature_cols)
    return Dataset(features, responses, fnames, dropped_rows=dropped)


@dataclass(frozen=True)
class FoldAssignment:
    """Equal-sized fold assignment over the first n' = k*floor(n/k) rows.

    ``retained[i]`` is the original row index of retained observation i,
    and ``assignment[i]`` its fold in [0, k).  ``dropped`` holds the
    trailing rows (of the original order, or of the permuted order in
    shuffle mode) left out to equalize fold sizes.
    """

    k: int
    assignment: np.ndarray
    retained: np.ndarray
    dropped: np.ndarray

    def __post_init__(self) -> None:
        for name in ("assignment", "retained", "dropped"):
            arr = np.asarray(getattr(self, name), dtype=np.intp)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        counts = np.bincount(self.assignment, minlength=self.k)
        if len(set(counts.tolist())) != 1:
            raise ConfigError(f"folds are not equal-sized: {counts}")

    @property
    def n_retained(self) -> int:
        return int(self.retained.shape[0])

    def fold_rows(self, i: int) -> np.ndarray:
        """Original row indices held out by fold i."""
        return self.retained[self.assignment == i]

    def train_rows(self, i: int) -> np.ndarray:
        """Original row indices trained on for fold i (dropped rows excluded)."""
        return self.retained[self.assignment != i]


def make_folds(
    n: int,
    k: int,
    mode: str = "contiguous",
    seed: int | None = None,
) -> FoldAssignment:
    """Assign n observations to k equal folds, dropping the trailing remainder.

    ``contiguous`` assigns rows [i*s, (i+1)*s) to fold i where s = n // k.
    ``shuffle`` (alias ``seeded-shuffle``) permutes rows with the given
    seed first, then assigns contiguously over the permuted order.
    """
    n, k = int(n), int(k)
    if k < 2:
        raise ConfigError(f"need at least 2 folds, got k={k}")
    if n < k:
        raise ConfigError(f"cannot split n={n} observations into k={k} folds")
    s = n // k
    n_prime = k * s
    assignment = np.repeat(np.arange(k, dtype=np.intp), s)
    if mode == "contiguous":
        order = np.arange(n, dtype=np.intp)
    elif mode in ("shuffle", "seeded-shuffle"):
        rng = np.random.default_rng(0 if seed is None else int(seed))
        order = rng.permutation(n).astype(np.intp)
    else:
        raise ConfigError(f"unknown fold mode {mode!r}")
    return FoldAssignment(
        k=k,
        assignment=assignment,
        retained=order[:n_prime],
        dropped=order[n_prime:],
    )
