"""Parameter vectors and bivariate sample container."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["BgwParams", "EwParams", "BivariateSample"]


def _check_positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be a finite positive number, got {value!r}")


@dataclass(frozen=True)
class BgwParams:
    """Four-parameter vector of the bivariate generalized Weibull law.

    ``a`` is the common shape, ``b1``/``b2`` the rates of X and Y, and
    ``theta`` in (0, 1] the dependence parameter (theta = 1 is independence).
    Validation happens here, once, so the evaluation routines can stay free
    of per-call parameter checks.
    """

    a: float
    b1: float
    b2: float
    theta: float

    def __post_init__(self):
        _check_positive("a", self.a)
        _check_positive("b1", self.b1)
        _check_positive("b2", self.b2)
        if not (isinstance(self.theta, (int, float)) and 0 < self.theta <= 1):
            raise ValueError(f"theta must lie in (0, 1], got {self.theta!r}")

    def z(self, x, y):
        """Combined exponent b1*x**a + b2*y**a."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return self.b1 * x**self.a + self.b2 * y**self.a

    def as_tuple(self):
        return (self.a, self.b1, self.b2, self.theta)


@dataclass(frozen=True)
class EwParams:
    """Exponentiated-Weibull triple (shape ``a``, rate ``b``, exponent ``theta``)."""

    a: float
    b: float
    theta: float

    def __post_init__(self):
        _check_positive("a", self.a)
        _check_positive("b", self.b)
        if not (isinstance(self.theta, (int, float)) and 0 < self.theta <= 1):
            raise ValueError(f"theta must lie in (0, 1], got {self.theta!r}")


@dataclass
class BivariateSample:
    """Ordered sequence of strictly positive (x, y) pairs.

    ``k_truncated`` counts simulated pairs whose latent trial count hit the
    sampler's cap; it is 0 for observed data.
    """

    x: np.ndarray
    y: np.ndarray
    k_truncated: int = 0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.ndim != 1 or self.y.ndim != 1 or self.x.size != self.y.size:
            raise ValueError("x and y must be 1-D arrays of equal length")
        if self.x.size < 1:
            raise ValueError("sample must contain at least one pair")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))):
            raise ValueError("sample contains non-finite values")
        if np.any(self.x <= 0) or np.any(self.y <= 0):
            raise ValueError("sample values must be strictly positive")

    @property
    def n(self) -> int:
        return int(self.x.size)

    def scaled(self, factor: float) -> "BivariateSample":
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return BivariateSample(self.x * factor, self.y * factor, self.k_truncated)

    @classmethod
    def from_pairs(cls, pairs) -> "BivariateSample":
        arr = np.asarray(pairs, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("pairs must be an (n, 2) array-like")
        return cls(arr[:, 0], arr[:, 1])

    @classmethod
    def from_csv(cls, path) -> "BivariateSample":
        """Read a comma-separated file with a mandatory ``x,y`` header."""
        path = Path(path)
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ValueError(f"{path}: empty file") from None
            if [h.strip().lower() for h in header[:2]] != ["x", "y"]:
                raise ValueError(f"{path}: expected header 'x,y', got {header!r}")
            xs, ys = [], []
            for lineno, row in enumerate(reader, start=2):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                if len(row) < 2:
                    raise ValueError(f"{path}:{lineno}: expected two columns")
                try:
                    xs.append(float(row[0]))
                    ys.append(float(row[1]))
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: non-numeric entry {row!r}") from None
        if not xs:
            raise ValueError(f"{path}: no data rows")
        return cls(np.array(xs), np.array(ys))

    def to_csv(self, path_or_file) -> None:
        """Write ``x,y`` header plus one row per pair."""
        own = isinstance(path_or_file, (str, Path))
        fh = open(path_or_file, "w", newline="", encoding="utf-8") if own else path_or_file
        try:
            writer = csv.writer(fh)
            writer.writerow(["x", "y"])
            for xi, yi in zip(self.x, self.y):
                writer.writerow([repr(float(xi)), repr(float(yi))])
        finally:
            if own:
                fh.close()
