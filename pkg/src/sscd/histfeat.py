"""Bivariate histogram featurisation of variable pairs.

Each ordered pair ``(i, j)`` is summarised by a fixed-grid histogram of the
standardised, clamped scatter of columns ``i`` and ``j``. The flattened bin
masses form one row of the pair-feature matrix, optionally compressed by PCA.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConstantVariable, EmptyData, GridError
from .pairspace import DataMatrix, PairIndex

DEFAULT_H = 0.2
DEFAULT_BOUND = 3.0
DEFAULT_D_TARGET = 100

RAW = "raw"
PCA = "pca"


def standardize_truncate(X: DataMatrix, bound: float = DEFAULT_BOUND) -> DataMatrix:
    """Centre and scale each column (sample sd, ``ddof=1``), then clamp to ``[-bound, bound]``.

    Raises
    ------
    ConstantVariable
        If any column has fewer than two distinct values.
    """
    v = X.values
    const = [X.variable_names[c] for c in range(X.p) if np.all(v[:, c] == v[0, c])]
    if const:
        raise ConstantVariable(const)
    z = (v - v.mean(axis=0)) / v.std(axis=0, ddof=1)
    return DataMatrix(np.clip(z, -bound, bound), X.variable_names)


def grid_size(h: float, lo: float, hi: float) -> int:
    """Number of bins per axis; ``(hi - lo) / h`` must be a positive integer."""
    if h <= 0 or hi <= lo:
        raise GridError(f"invalid grid: h={h}, domain=[{lo}, {hi}]")
    ratio = (hi - lo) / h
    nb = int(round(ratio))
    if nb < 1 or abs(ratio - nb) > 1e-9 * max(1.0, ratio):
        raise GridError(f"domain width {hi - lo} is not a multiple of bin width {h}")
    return nb


def snap_bin_width(h: float, lo: float = -DEFAULT_BOUND, hi: float = DEFAULT_BOUND) -> float:
    """Nearest bin width to ``h`` that tiles ``[lo, hi]`` exactly."""
    nb = max(1, int(round((hi - lo) / h)))
    return (hi - lo) / nb


def _bin_index(x: np.ndarray, lo: float, hi: float, nb: int) -> np.ndarray:
    # half-open bins, except the last one which also holds x == hi
    idx = np.floor((x - lo) * (nb / (hi - lo))).astype(np.intp)
    return np.clip(idx, 0, nb - 1)


@dataclass(frozen=True)
class HistogramDensity:
    """Piecewise-constant density on ``[lo, hi]^2``; ``mass`` holds bin proportions."""

    mass: np.ndarray
    h: float
    lo: float
    hi: float
    n: int

    @property
    def bins(self) -> int:
        return self.mass.shape[0]

    @property
    def density(self) -> np.ndarray:
        return self.mass / self.h**2

    def same_grid(self, other: "HistogramDensity") -> bool:
        return self.mass.shape == other.mass.shape and np.isclose(self.h, other.h) and (
            np.isclose(self.lo, other.lo) and np.isclose(self.hi, other.hi)
        )

    def evaluate(self, x, y) -> np.ndarray:
        """Density value at points ``(x, y)`` inside the domain."""
        nb = self.bins
        return self.density[_bin_index(np.asarray(x), self.lo, self.hi, nb),
                            _bin_index(np.asarray(y), self.lo, self.hi, nb)]


def histogram_estimate(S, h: float = DEFAULT_H, domain: tuple[float, float] = (-DEFAULT_BOUND, DEFAULT_BOUND)) -> HistogramDensity:
    """Histogram density estimate of an ``n x 2`` scatter.

    ``mass[a, b]`` is the fraction of points whose first coordinate falls in
    bin ``a`` and second in bin ``b``.
    """
    S = np.asarray(S, dtype=float)
    lo, hi = map(float, domain)
    nb = grid_size(h, lo, hi)
    if S.ndim != 2 or S.shape[1] != 2:
        raise ValueError(f"scatter must have shape (n, 2), got {S.shape}")
    n = S.shape[0]
    if n == 0:
        raise EmptyData("empty scatter")
    if np.any(S < lo) or np.any(S > hi) or not np.all(np.isfinite(S)):
        raise ValueError(f"scatter has points outside [{lo}, {hi}]^2")
    a = _bin_index(S[:, 0], lo, hi, nb)
    b = _bin_index(S[:, 1], lo, hi, nb)
    counts = np.bincount(a * nb + b, minlength=nb * nb)
    return HistogramDensity(counts.reshape(nb, nb) / n, (hi - lo) / nb, lo, hi, n)


@dataclass(frozen=True)
class PairFeatureMatrix:
    """One feature row per ordered pair.

    For ``kind == "raw"`` rows are flattened bin-mass grids. For ``"pca"`` rows
    are coordinates in ``basis`` (``d_raw x d``, orthonormal columns) after
    subtracting ``mean``.
    """

    features: np.ndarray
    kind: str
    h: float
    lo: float
    hi: float
    variable_names: tuple[str, ...] = ()
    basis: np.ndarray | None = None
    mean: np.ndarray | None = None

    @property
    def m(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def pair_names(self) -> list[str]:
        p = len(self.variable_names)
        if p * (p - 1) != self.m:
            return [str(k) for k in range(self.m)]
        return [f"{a}→{b}" for a, b in PairIndex(p).names(self.variable_names)]

    def grid(self, k: int) -> np.ndarray:
        """Bin-mass grid of pair ``k`` (reconstructed from the basis for PCA rows)."""
        nb = grid_size(self.h, self.lo, self.hi)
        row = self.features[k]
        if self.kind == PCA:
            row = self.mean + self.basis @ row
        return row.reshape(nb, nb)

    def to_csv(self, path) -> None:
        names = self.pair_names()
        with open(path, "w") as fh:
            fh.write("pair," + ",".join(f"f{c}" for c in range(self.d)) + "\n")
            for name, row in zip(names, self.features):
                fh.write(name + "," + ",".join(repr(float(v)) for v in row) + "\n")

    def save(self, path) -> None:
        """Write ``<path>.bin`` (little-endian float64, row-major) and ``<path>.json``."""
        meta = {
            "kind": self.kind,
            "shape": list(self.features.shape),
            "h": self.h,
            "domain": [self.lo, self.hi],
            "variable_names": list(self.variable_names),
        }
        arrays = {"features": self.features}
        if self.kind == PCA:
            arrays["basis"] = self.basis
            arrays["mean"] = self.mean
            meta["basis_shape"] = list(self.basis.shape)
        _write_binary(path, arrays, meta)

    @classmethod
    def load(cls, path) -> "PairFeatureMatrix":
        arrays, meta = _read_binary(path)
        return cls(
            arrays["features"], meta["kind"], meta["h"], *meta["domain"],
            variable_names=tuple(meta["variable_names"]),
            basis=arrays.get("basis"), mean=arrays.get("mean"),
        )


def _write_binary(path, arrays: dict, meta: dict) -> None:
    path = Path(path)
    offsets = {}
    pos = 0
    with open(path.with_suffix(".bin"), "wb") as fh:
        for name, arr in arrays.items():
            arr = np.ascontiguousarray(arr, dtype="<f8")
            offsets[name] = {"offset": pos, "shape": list(arr.shape)}
            fh.write(arr.tobytes())
            pos += arr.size
    meta = dict(meta, dtype="float64", byteorder="little", arrays=offsets)
    path.with_suffix(".json").write_text(json.dumps(meta, indent=2, sort_keys=True))


def _read_binary(path) -> tuple[dict, dict]:
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    flat = np.fromfile(path.with_suffix(".bin"), dtype="<f8")
    arrays = {}
    for name, spec in meta["arrays"].items():
        size = int(np.prod(spec["shape"]))
        arrays[name] = flat[spec["offset"]:spec["offset"] + size].reshape(spec["shape"])
    return arrays, meta


def pair_features(X_std: DataMatrix, h: float = DEFAULT_H, bound: float = DEFAULT_BOUND) -> PairFeatureMatrix:
    """Raw histogram features for every ordered pair of an already standardised matrix.

    Row ``k`` is the flattened mass grid of columns ``(i(k), j(k))`` with the
    first variable on the first grid axis.
    """
    lo, hi = -bound, bound
    nb = grid_size(h, lo, hi)
    v = X_std.values
    if np.any(v < lo) or np.any(v > hi):
        raise ValueError(f"data not truncated to [{lo}, {hi}]")
    bins = _bin_index(v, lo, hi, nb)
    idx = PairIndex(X_std.p)
    codes = bins[:, idx.rows] * nb + bins[:, idx.cols]  # n x m
    # offset each pair's codes into its own block so one bincount fills all rows
    offsets = np.arange(idx.m) * (nb * nb)
    counts = np.bincount((codes + offsets).ravel(), minlength=idx.m * nb * nb)
    F = counts.reshape(idx.m, nb * nb) / X_std.n
    return PairFeatureMatrix(F, RAW, (hi - lo) / nb, lo, hi, X_std.variable_names)


def pca_reduce(F: PairFeatureMatrix, d_target: int = DEFAULT_D_TARGET) -> PairFeatureMatrix:
    """Project centred feature rows onto their top principal directions.

    Uses the thin SVD of the centred matrix; directions with numerically zero
    singular value are dropped, so the output dimension is
    ``min(d_target, rank)``.
    """
    if d_target < 1:
        raise ValueError("d_target must be >= 1")
    if F.kind != RAW:
        raise ValueError("pca_reduce expects raw histogram features")
    mean = F.features.mean(axis=0)
    C = F.features - mean
    _, s, Vt = np.linalg.svd(C, full_matrices=False)
    tol = s[0] * max(C.shape) * np.finfo(float).eps if s.size and s[0] > 0 else 0.0
    rank = int(np.count_nonzero(s > tol))
    d = max(1, min(d_target, rank))
    basis = Vt[:d].T
    return PairFeatureMatrix(C @ basis, PCA, F.h, F.lo, F.hi, F.variable_names, basis, mean)
