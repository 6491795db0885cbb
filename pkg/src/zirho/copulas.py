"""Frechet-family copulas, discrete joint pmfs built from them, and sampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .margins import DiscretePmf, quantile

CLAMP_TOL = 1e-12


class InternalConsistencyError(RuntimeError):
    """A computed probability is negative beyond floating-point noise."""


@dataclass(frozen=True)
class CopulaSpec:
    """One of ``frechet`` (with ``alpha``), ``m``, ``w`` or ``indep``.

    ``m`` and ``indep`` are stored as Frechet(1) and Frechet(0) so the two
    spellings evaluate identically.
    """

    kind: str
    alpha: float = 0.0

    def __post_init__(self):
        kind = self.kind.lower()
        if kind == "m":
            kind, alpha = "frechet", 1.0
        elif kind in ("indep", "independence", "pi"):
            kind, alpha = "frechet", 0.0
        else:
            alpha = float(self.alpha)
        if kind not in ("frechet", "w"):
            raise ValueError(f"unknown copula {self.kind!r}")
        if kind == "frechet" and not 0.0 <= alpha <= 1.0:
            raise ValueError(f"Frechet alpha must lie in [0, 1], got {alpha!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "alpha", alpha if kind == "frechet" else 0.0)

    @classmethod
    def frechet(cls, alpha: float) -> "CopulaSpec":
        return cls("frechet", alpha)

    @classmethod
    def upper(cls) -> "CopulaSpec":
        return cls("m")

    @classmethod
    def lower(cls) -> "CopulaSpec":
        return cls("w")

    @classmethod
    def independence(cls) -> "CopulaSpec":
        return cls("indep")

    @classmethod
    def parse(cls, text: str) -> "CopulaSpec":
        """``frechet:alpha=<float>``, ``m``, ``w`` or ``indep``."""
        kind, _, rest = text.strip().partition(":")
        if kind.lower() == "frechet":
            key, sep, val = rest.partition("=")
            if key.strip().lower() != "alpha" or not sep:
                raise ValueError(f"expected frechet:alpha=<float>, got {text!r}")
            return cls.frechet(float(val))
        if rest:
            raise ValueError(f"copula {kind!r} takes no parameters")
        return cls(kind)

    def __str__(self):
        if self.kind == "w":
            return "w"
        return f"frechet:alpha={self.alpha:g}"


def copula_cdf(c: CopulaSpec, u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if c.kind == "w":
        out = np.maximum(u + v - 1.0, 0.0)
    elif c.alpha == 1.0:
        out = np.minimum(u, v)
    elif c.alpha == 0.0:
        out = u * v
    else:
        out = (1.0 - c.alpha) * u * v + c.alpha * np.minimum(u, v)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class JointPmf:
    """Bivariate pmf on a finite grid ``x_support x y_support``."""

    x_support: np.ndarray
    y_support: np.ndarray
    mass: np.ndarray
    x_margin: DiscretePmf = field(init=False, repr=False, compare=False)
    y_margin: DiscretePmf = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        xs = np.asarray(self.x_support, dtype=np.int64)
        ys = np.asarray(self.y_support, dtype=np.int64)
        mass = np.array(self.mass, dtype=float)
        if mass.shape != (xs.size, ys.size):
            raise ValueError(f"mass shape {mass.shape} does not match supports ({xs.size}, {ys.size})")
        if np.any(mass < 0):
            raise ValueError("joint mass must be nonnegative")
        total = mass.sum()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"joint mass sums to {total!r}, not 1")
        for s in (xs, ys):
            if s.size == 0 or s[0] < 0 or np.any(np.diff(s) <= 0):
                raise ValueError("supports must be non-empty, nonnegative and strictly increasing")
        for arr in (xs, ys, mass):
            arr.setflags(write=False)
        object.__setattr__(self, "x_support", xs)
        object.__setattr__(self, "y_support", ys)
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "x_margin", _margin(xs, mass.sum(axis=1)))
        object.__setattr__(self, "y_margin", _margin(ys, mass.sum(axis=0)))

    @classmethod
    def from_dense(cls, grid) -> "JointPmf":
        """Grid indexed by (x, y) starting at 0 on both axes."""
        grid = np.asarray(grid, dtype=float)
        return cls(np.arange(grid.shape[0]), np.arange(grid.shape[1]), grid / grid.sum())

    @property
    def x_cdf(self) -> np.ndarray:
        """F at each x support point (including points with zero row mass)."""
        return np.minimum(np.cumsum(self.mass.sum(axis=1)), 1.0)

    @property
    def y_cdf(self) -> np.ndarray:
        return np.minimum(np.cumsum(self.mass.sum(axis=0)), 1.0)

    def transpose(self) -> "JointPmf":
        return JointPmf(self.y_support, self.x_support, self.mass.T)

    def quadrant_masses(self) -> tuple[float, float, float, float]:
        """(p00, p01, p10, p11) with p_ab = P(1(X>0)=a, 1(Y>0)=b)."""
        xpos = self.x_support > 0
        ypos = self.y_support > 0
        h = self.mass
        p11 = float(h[np.ix_(xpos, ypos)].sum())
        p10 = float(h[np.ix_(xpos, ~ypos)].sum())
        p01 = float(h[np.ix_(~xpos, ypos)].sum())
        p00 = float(h[np.ix_(~xpos, ~ypos)].sum())
        return p00, p01, p10, p11


def _margin(support: np.ndarray, probs: np.ndarray) -> DiscretePmf:
    keep = probs > 0
    if not keep.any():
        raise ValueError("margin has no positive mass")
    probs = probs[keep]
    return DiscretePmf(support[keep], probs / probs.sum())


def joint_pmf(F: DiscretePmf, G: DiscretePmf, c: CopulaSpec) -> JointPmf:
    """Rectangle masses of H(x, y) = C(F(x), G(y)) on the product of supports."""
    fu = np.concatenate(([0.0], F.cdf_values))
    gv = np.concatenate(([0.0], G.cdf_values))
    H = copula_cdf(c, fu[:, None], gv[None, :])
    mass = np.diff(np.diff(H, axis=0), axis=1)
    mass = _clamp(mass)
    return JointPmf(F.support, G.support, mass)


def _clamp(mass: np.ndarray) -> np.ndarray:
    low = mass.min()
    if low < -CLAMP_TOL:
        raise InternalConsistencyError(f"rectangle mass {low!r} is negative beyond rounding")
    if low < 0:
        mass = np.where(mass < 0, 0.0, mass)
        mass /= mass.sum()
    return mass


@dataclass(frozen=True)
class PairedSample:
    """Observed nonnegative integer pairs."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x)
        y = np.asarray(self.y)
        if x.ndim != 1 or x.shape != y.shape:
            raise ValueError("x and y must be 1-d arrays of equal length")
        if x.size < 1:
            raise ValueError("a sample needs at least one pair")
        for arr in (x, y):
            if arr.dtype.kind not in "iu":
                if not np.all(np.equal(np.mod(arr, 1), 0)):
                    raise ValueError("sample values must be integers")
        x = x.astype(np.int64)
        y = y.astype(np.int64)
        if x.min() < 0 or y.min() < 0:
            raise ValueError("sample values must be nonnegative")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_pairs(cls, pairs) -> "PairedSample":
        arr = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1])

    @property
    def n(self) -> int:
        return int(self.x.size)

    def __len__(self):
        return self.n

    @property
    def pairs(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])


def pair_stream(seed: int, *path: int) -> np.random.Generator:
    """Philox generator keyed by (seed, *path).

    Philox is counter based: draw i of the returned generator depends only on
    the key and i, never on how many other streams exist or run concurrently.
    """
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *map(int, path)])
    return np.random.Generator(np.random.Philox(ss))


def sample_pairs(F: DiscretePmf, G: DiscretePmf, alpha: float, n: int, seed: int,
                 stream: tuple[int, ...] = ()) -> PairedSample:
    """Draw ``n`` pairs from C_alpha(F, G) through the mixture representation.

    Pair i consumes row i of an (n, 3) block of uniforms: a Bernoulli(alpha)
    selector and two uniforms. Comonotone pairs reuse the first uniform for
    both coordinates; independent pairs use both.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
    draws = pair_stream(seed, *stream).random((n, 3))
    como = draws[:, 0] < alpha
    u = draws[:, 1]
    v = np.where(como, u, draws[:, 2])
    # random() yields [0, 1); 1 - U lies in (0, 1] so quantile never sees u = 0
    x = quantile(F, 1.0 - u)
    y = quantile(G, 1.0 - v)
    return PairedSample(x, y)
