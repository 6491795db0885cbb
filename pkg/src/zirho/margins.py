"""Zero-inflated discrete margins on the nonnegative integers.

A margin is stored as a finite pmf. Poisson bases are truncated at the first
point whose base survival drops below ``eps``; the residual tail is lumped onto
that point so every cdf value below the truncation point is exact.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

DEFAULT_EPS = 1e-12


@dataclass(frozen=True)
class DiscretePmf:
    """Finite pmf on nonnegative integers.

    ``tail_eps`` records how much mass was lumped onto the last support point
    during truncation (0 for explicit pmfs).
    """

    support: np.ndarray
    probs: np.ndarray
    tail_eps: float = 0.0
    _cdf: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        support = np.asarray(self.support, dtype=np.int64)
        probs = np.asarray(self.probs, dtype=float)
        if support.ndim != 1 or support.shape != probs.shape or support.size == 0:
            raise ValueError("support and probs must be non-empty 1-d arrays of equal length")
        if support[0] < 0 or np.any(np.diff(support) <= 0):
            raise ValueError("support must be strictly increasing and nonnegative")
        if np.any(probs < 0):
            raise ValueError("probabilities must be nonnegative")
        if abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")
        cdf = np.cumsum(probs)
        # the top of the cdf is 1 by definition; do not let rounding leave it at 1 - ulp
        cdf[-1] = 1.0
        np.minimum(cdf, 1.0, out=cdf)
        support.setflags(write=False)
        probs.setflags(write=False)
        cdf.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "_cdf", cdf)

    def __len__(self):
        return self.support.size

    @property
    def cdf_values(self) -> np.ndarray:
        """Cdf evaluated at each support point."""
        return self._cdf

    @property
    def mass_at_zero(self) -> float:
        return float(self.probs[0]) if self.support[0] == 0 else 0.0

    def pmf(self, x) -> np.ndarray | float:
        x = np.asarray(x)
        idx = np.searchsorted(self.support, x)
        idx_c = np.minimum(idx, self.support.size - 1)
        out = np.where(self.support[idx_c] == x, self.probs[idx_c], 0.0)
        return out if out.ndim else float(out)

    def cdf(self, x) -> np.ndarray | float:
        return cdf(self, x)

    def quantile(self, u) -> np.ndarray | int:
        return quantile(self, u)

    def dense(self, upper: int | None = None) -> np.ndarray:
        """Probabilities on 0..upper (default: max support) as a dense vector."""
        upper = int(self.support[-1]) if upper is None else upper
        out = np.zeros(upper + 1)
        keep = self.support <= upper
        out[self.support[keep]] = self.probs[keep]
        return out

    @classmethod
    def from_dense(cls, probs: Sequence[float], tail_eps: float = 0.0) -> "DiscretePmf":
        """Build from probabilities on 0..len-1, dropping zero-mass points."""
        probs = np.asarray(probs, dtype=float)
        support = np.flatnonzero(probs > 0)
        if support.size == 0:
            raise ValueError("pmf has no positive mass")
        return cls(support, probs[support], tail_eps)

    @classmethod
    def point_mass(cls, x: int = 0) -> "DiscretePmf":
        return cls(np.array([x]), np.array([1.0]))


@dataclass(frozen=True)
class PoissonSpec:
    lam: float

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError(f"Poisson lambda must be positive, got {self.lam!r}")


@dataclass(frozen=True)
class ZeroInflatedMarginSpec:
    """Extra mass ``inflation`` at zero on top of ``base``."""

    inflation: float
    base: Union[PoissonSpec, DiscretePmf]

    def __post_init__(self):
        if not 0.0 <= self.inflation <= 1.0:
            raise ValueError(f"inflation must lie in [0, 1], got {self.inflation!r}")
        if not isinstance(self.base, (PoissonSpec, DiscretePmf)):
            raise TypeError("base must be a PoissonSpec or a DiscretePmf")


def poisson_pmf(lam: float, eps: float = DEFAULT_EPS) -> DiscretePmf:
    """Truncated Poisson pmf via the forward recurrence p(k+1) = p(k) lam / (k+1)."""
    PoissonSpec(lam)
    probs = [math.exp(-lam)]
    acc = probs[0]
    # stop at the first K with survival 1 - F(K) <= eps; also stop once the
    # recurrence has passed the mode and terms underflow
    k = 0
    while 1.0 - acc > eps:
        nxt = probs[-1] * lam / (k + 1)
        if nxt == 0.0 and k > lam:
            break
        probs.append(nxt)
        acc += nxt
        k += 1
    probs = np.array(probs)
    tail = max(0.0, 1.0 - probs.sum())
    probs[-1] += 1.0 - probs.sum()
    return DiscretePmf(np.arange(probs.size), probs, tail)


def build_margin(spec: ZeroInflatedMarginSpec, eps: float = DEFAULT_EPS) -> DiscretePmf:
    """Pmf of ``p * delta_0 + (1 - p) * base``, truncated at base survival <= eps."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    if isinstance(spec.base, PoissonSpec):
        base = poisson_pmf(spec.base.lam, eps)
    else:
        base = spec.base
    p = spec.inflation
    if p == 1.0:
        return DiscretePmf.point_mass(0)
    dense = (1.0 - p) * base.dense()
    dense[0] += p
    # lump rounding residue onto the last point, keeping lower cdf values exact
    dense[-1] += 1.0 - dense.sum()
    return DiscretePmf.from_dense(dense, tail_eps=(1.0 - p) * base.tail_eps)


def zip_margin(lam: float, p: float, eps: float = DEFAULT_EPS) -> DiscretePmf:
    """Shorthand for a zero-inflated Poisson margin."""
    return build_margin(ZeroInflatedMarginSpec(p, PoissonSpec(lam)), eps)


def cdf(m: DiscretePmf, x):
    """F(x) = P(X <= x); zero below the support, so F(-1) = 0."""
    idx = np.searchsorted(m.support, np.asarray(x), side="right")
    out = np.where(idx > 0, m.cdf_values[np.maximum(idx - 1, 0)], 0.0)
    return out if out.ndim else float(out)


def survival(m: DiscretePmf, x):
    out = 1.0 - np.asarray(cdf(m, x))
    return out if out.ndim else float(out)


def quantile(m: DiscretePmf, u):
    """Generalized inverse: smallest support value x with F(x) >= u."""
    u = np.asarray(u, dtype=float)
    if np.any((u < 0) | (u > 1)):
        raise ValueError("u must lie in [0, 1]")
    idx = np.searchsorted(m.cdf_values, u, side="left")
    out = m.support[np.minimum(idx, m.support.size - 1)]
    return out if out.ndim else int(out)


def read_pmf_csv(path: str | Path) -> DiscretePmf:
    """Read a ``value,prob`` CSV (header optional) into a pmf."""
    values, probs = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or not "".join(row).strip():
                continue
            try:
                v, pr = int(row[0]), float(row[1])
            except (ValueError, IndexError):
                if not values:
                    continue  # header
                raise ValueError(f"{path}: malformed pmf row {row!r}")
            values.append(v)
            probs.append(pr)
    if not values:
        raise ValueError(f"{path}: no pmf rows")
    order = np.argsort(values)
    return DiscretePmf(np.asarray(values)[order], np.asarray(probs)[order])


def parse_margin(text: str, eps: float = DEFAULT_EPS) -> DiscretePmf:
    """Parse ``zip:lambda=<float>,p=<float>`` or ``pmf:<path>``."""
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind == "zip":
        params = {}
        for item in rest.split(","):
            key, sep, val = item.partition("=")
            if not sep:
                raise ValueError(f"bad margin parameter {item!r} in {text!r}")
            params[key.strip().lower()] = float(val)
        unknown = set(params) - {"lambda", "p"}
        if unknown or "lambda" not in params:
            raise ValueError(f"zip margin needs lambda= and optional p=, got {text!r}")
        return zip_margin(params["lambda"], params.get("p", 0.0), eps)
    if kind == "pmf":
        if not rest:
            raise ValueError("pmf: margin needs a path")
        return read_pmf_csv(rest)
    raise ValueError(f"unknown margin spec {text!r}")
