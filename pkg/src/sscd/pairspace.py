"""Data matrices, ordered-pair indexing and label assignments.

Ordered pairs ``(i, j)`` with ``i != j`` are the objects of the learning task.
They are linearised row-major with the diagonal skipped::

    k(i, j) = i * (p - 1) + j - (j > i)

so ``m = p * (p - 1)`` and ``(i, j)`` and ``(j, i)`` never share an index.
"""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, IncompleteLabels


class Label(enum.IntEnum):
    UNLABELLED = -1
    NONCAUSAL = 0
    CAUSAL = 1


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DataMatrix:
    """An ``n x p`` matrix of finite measurements with named columns."""

    values: np.ndarray
    variable_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise DataError(f"expected a 2-d matrix, got shape {values.shape}")
        n, p = values.shape
        if n < 2 or p < 2:
            raise DataError(f"need n >= 2 and p >= 2, got n={n}, p={p}")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise DataError(f"non-finite value at row {bad[0]}, column {bad[1]}")
        names = tuple(str(s) for s in self.variable_names) or tuple(f"V{j}" for j in range(p))
        if len(names) != p:
            raise DataError(f"{len(names)} variable names for {p} columns")
        if len(set(names)) != p:
            raise DataError("variable names must be unique")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "variable_names", names)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.variable_names.index(name)]

    def subset_rows(self, rows) -> "DataMatrix":
        return DataMatrix(self.values[rows], self.variable_names)

    def subset_columns(self, cols: Sequence[int]) -> "DataMatrix":
        cols = list(cols)
        return DataMatrix(self.values[:, cols], [self.variable_names[c] for c in cols])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.variable_names)
            for row in self.values:
                w.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path) -> "DataMatrix":
        """Read a header-plus-rows CSV; NaN/Inf and ragged rows are rejected."""
        path = Path(path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        rows = [r for r in rows if r]
        if not rows:
            raise DataError(f"{path}: empty file")
        header, body = rows[0], rows[1:]
        try:
            values = np.array([[float(v) for v in r] for r in body], dtype=float)
        except ValueError as exc:
            raise DataError(f"{path}: {exc}") from None
        if any(len(r) != len(header) for r in body):
            raise DataError(f"{path}: ragged rows")
        try:
            return cls(values.reshape(len(body), len(header)), [h.strip() for h in header])
        except DataError as exc:
            raise DataError(f"{path}: {exc}") from None


def pair_count(p: int) -> int:
    return p * (p - 1)


def pair_index(i: int, j: int, p: int) -> int:
    """Linear index of the ordered pair ``(i, j)``."""
    if not (0 <= i < p and 0 <= j < p):
        raise IndexError(f"pair ({i}, {j}) out of range for p={p}")
    if i == j:
        raise IndexError(f"diagonal pair ({i}, {j}) has no index")
    return i * (p - 1) + j - (j > i)


def pair_unindex(k: int, p: int) -> tuple[int, int]:
    if not 0 <= k < pair_count(p):
        raise IndexError(f"pair index {k} out of range for p={p}")
    i, r = divmod(k, p - 1)
    return i, r + (r >= i)


class PairIndex:
    """Vectorised view of the bijection between ordered pairs and ``0..m-1``.

    ``rows[k]`` and ``cols[k]`` give ``(i(k), j(k))``.
    """

    def __init__(self, p: int):
        if p < 2:
            raise ValueError("p must be at least 2")
        self.p = p
        self.m = pair_count(p)
        i, j = np.nonzero(~np.eye(p, dtype=bool))
        self.rows = _frozen(i)
        self.cols = _frozen(j)

    def __len__(self):
        return self.m

    def index(self, i: int, j: int) -> int:
        return pair_index(i, j, self.p)

    def unindex(self, k: int) -> tuple[int, int]:
        return pair_unindex(k, self.p)

    def names(self, variable_names: Sequence[str]) -> list[tuple[str, str]]:
        return [(variable_names[i], variable_names[j]) for i, j in zip(self.rows, self.cols)]


def as_adjacency(A) -> np.ndarray:
    """Validate a ``p x p`` binary adjacency matrix with zero diagonal."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {A.shape}")
    if not np.isin(A, (0, 1)).all():
        raise ValueError("adjacency entries must be 0 or 1")
    if np.any(np.diag(A) != 0):
        raise ValueError("adjacency diagonal must be zero")
    return A.astype(np.int8)


@dataclass(frozen=True)
class LabelAssignment:
    """Per-pair label state over ``K``: 1 causal, 0 non-causal, -1 unlabelled."""

    states: np.ndarray
    p: int

    def __post_init__(self):
        states = np.asarray(self.states, dtype=np.int8)
        if states.shape != (pair_count(self.p),):
            raise ValueError(f"expected {pair_count(self.p)} states, got shape {states.shape}")
        if not np.isin(states, (-1, 0, 1)).all():
            raise ValueError("label states must be in {-1, 0, 1}")
        object.__setattr__(self, "states", _frozen(states))

    @property
    def m(self) -> int:
        return self.states.size

    @property
    def labelled(self) -> np.ndarray:
        return np.flatnonzero(self.states != Label.UNLABELLED)

    @property
    def unlabelled(self) -> np.ndarray:
        return np.flatnonzero(self.states == Label.UNLABELLED)

    @property
    def m_L(self) -> int:
        return int(np.count_nonzero(self.states != Label.UNLABELLED))

    @property
    def m_U(self) -> int:
        return self.m - self.m_L

    def one_hot(self) -> np.ndarray:
        """``m x 2`` label matrix (columns: non-causal, causal); unlabelled rows are zero."""
        Y = np.zeros((self.m, 2))
        Y[self.states == Label.NONCAUSAL, 0] = 1.0
        Y[self.states == Label.CAUSAL, 1] = 1.0
        return Y

    def swapped(self) -> "LabelAssignment":
        """Same labelled set with causal and non-causal exchanged."""
        s = self.states.copy()
        lab = s != Label.UNLABELLED
        s[lab] = 1 - s[lab]
        return LabelAssignment(s, self.p)


def labels_from_adjacency(A, observed: Iterable[tuple[int, int]] | np.ndarray | None) -> LabelAssignment:
    """Reveal the entries of ``A`` at the ``observed`` pairs; everything else is unlabelled.

    ``observed`` is either an iterable of ``(i, j)`` pairs or a boolean mask of
    length ``m``. ``None`` means every pair is observed.
    """
    A = as_adjacency(A)
    p = A.shape[0]
    idx = PairIndex(p)
    truth = A[idx.rows, idx.cols]
    if observed is None:
        mask = np.ones(idx.m, dtype=bool)
    elif isinstance(observed, np.ndarray) and observed.dtype == bool:
        if observed.shape != (idx.m,):
            raise ValueError("observed mask has wrong length")
        mask = observed
    else:
        mask = np.zeros(idx.m, dtype=bool)
        for i, j in observed:
            mask[pair_index(int(i), int(j), p)] = True
    states = np.where(mask, truth, Label.UNLABELLED)
    return LabelAssignment(states, p)


def graph_from_labels(labels, p: int | None = None) -> np.ndarray:
    """Adjacency matrix with ``A[i, j] = 1`` iff pair ``k(i, j)`` is causal."""
    if isinstance(labels, LabelAssignment):
        p = labels.p
        labels = labels.states
    labels = np.asarray(labels)
    if p is None:
        raise ValueError("p is required for a raw label vector")
    if labels.shape != (pair_count(p),):
        raise ValueError(f"expected {pair_count(p)} labels, got shape {labels.shape}")
    if np.any(labels == Label.UNLABELLED):
        raise IncompleteLabels(f"{int(np.sum(labels == Label.UNLABELLED))} unlabelled pair(s)")
    idx = PairIndex(p)
    A = np.zeros((p, p), dtype=np.int8)
    A[idx.rows, idx.cols] = labels == Label.CAUSAL
    return A


def read_label_csv(path, variable_names: Sequence[str]) -> LabelAssignment:
    """Read ``from,to,label`` rows; names must match ``variable_names``."""
    path = Path(path)
    pos = {name: c for c, name in enumerate(variable_names)}
    p = len(variable_names)
    states = np.full(pair_count(p), Label.UNLABELLED, dtype=np.int8)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"from", "to", "label"} <= set(reader.fieldnames):
            raise DataError(f"{path}: expected columns from,to,label")
        for line, row in enumerate(reader, start=2):
            try:
                i, j = pos[row["from"].strip()], pos[row["to"].strip()]
            except KeyError as exc:
                raise DataError(f"{path}:{line}: unknown variable {exc}") from None
            lab = row["label"].strip()
            if lab not in ("0", "1"):
                raise DataError(f"{path}:{line}: label must be 0 or 1, got {lab!r}")
            try:
                states[pair_index(i, j, p)] = int(lab)
            except IndexError as exc:
                raise DataError(f"{path}:{line}: {exc}") from None
    return LabelAssignment(states, p)


def write_label_csv(path, labels: LabelAssignment, variable_names: Sequence[str]) -> None:
    idx = PairIndex(labels.p)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["from", "to", "label"])
        for k in labels.labelled:
            w.writerow([variable_names[idx.rows[k]], variable_names[idx.cols[k]], int(labels.states[k])])
