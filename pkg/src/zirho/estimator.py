"""Sample estimator of Spearman's rho for zero-inflated counts.

Each population quantity in the zero-inflation identity is replaced by its
empirical counterpart. The positive-quadrant rho uses the classical mid-rank
Spearman coefficient; the three cross terms use sign U-statistics over triples
(i, j, k) with i in the positive quadrant.

All counting is done by sorting: for a fixed i the triple sum factorises into
(sum_j sign(x_i - x_j)) * (sum_k sign(y_i - y_k)), and each factor is a
difference of two ``searchsorted`` counts. The naive loops live in the test
suite and must agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .copulas import PairedSample
from .exact import DecompositionSummary, theorem1_eval

__all__ = [
    "PairedSample", "EstimateResult", "DegenerateStatisticError", "InsufficientDataError",
    "mid_ranks", "spearman_midrank", "split_by_zero", "estimate_p_star_dagger",
    "estimate_rho_ab", "estimate_rho_A",
]


class DegenerateStatisticError(ValueError):
    """The statistic is undefined for this input (e.g. a constant coordinate)."""


class InsufficientDataError(ValueError):
    pass


def mid_ranks(values) -> np.ndarray:
    """1-based ranks with ties given the average of the positions they occupy."""
    v = np.asarray(values)
    if v.size == 0:
        raise ValueError("mid_ranks needs at least one value")
    sv = np.sort(v)
    # positions (1-based) of the first and last element of each value's tie group
    first = np.searchsorted(sv, v, side="left") + 1
    last = np.searchsorted(sv, v, side="right")
    return (first + last) / 2.0


def spearman_midrank(s: PairedSample) -> float:
    """Pearson correlation of the two mid-rank vectors."""
    if s.n < 2:
        raise DegenerateStatisticError("need at least two pairs")
    rx = mid_ranks(s.x)
    ry = mid_ranks(s.y)
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    sxx = rx @ rx
    syy = ry @ ry
    if sxx == 0 or syy == 0:
        raise DegenerateStatisticError("a coordinate is constant")
    r = (rx @ ry) / np.sqrt(sxx * syy)
    return float(min(1.0, max(-1.0, r)))


def split_by_zero(s: PairedSample) -> dict[str, np.ndarray]:
    """Index sets ``a11`` (x>0, y>0), ``b10`` (x>0, y=0), ``b01`` (x=0, y>0), ``z00``."""
    xp = s.x > 0
    yp = s.y > 0
    return {
        "a11": np.flatnonzero(xp & yp),
        "b10": np.flatnonzero(xp & ~yp),
        "b01": np.flatnonzero(~xp & yp),
        "z00": np.flatnonzero(~xp & ~yp),
    }


def _sign_sums(points: np.ndarray, against: np.ndarray) -> np.ndarray:
    """For each point, #{against < point} - #{against > point} (exact integers)."""
    srt = np.sort(against)
    below = np.searchsorted(srt, points, side="left")
    above = srt.size - np.searchsorted(srt, points, side="right")
    return below - above


def _gt_eq_counts(a: np.ndarray, b: np.ndarray) -> tuple[int, int]:
    """(#{(j, i): a_j > b_i}, #{(j, i): a_j = b_i})."""
    srt = np.sort(b)
    lo = np.searchsorted(srt, a, side="left")
    hi = np.searchsorted(srt, a, side="right")
    return int(lo.sum()), int((hi - lo).sum())


def estimate_p_star_dagger(s: PairedSample, sets: dict | None = None):
    """Empirical (p1*, p1-dagger, p2*, p2-dagger) and the set of degenerate names.

    p1* compares x over the (x>0, y=0) group against x over the positive
    quadrant; p2* does the same for y with the (x=0, y>0) group.
    """
    sets = split_by_zero(s) if sets is None else sets
    a11, b10, b01 = sets["a11"], sets["b10"], sets["b01"]
    degenerate = set()
    out = []
    for coord, grp, names in ((s.x, b10, ("p1_star", "p1_dagger")),
                              (s.y, b01, ("p2_star", "p2_dagger"))):
        if grp.size == 0 or a11.size == 0:
            out.extend((0.0, 0.0))
            degenerate.update(names)
            continue
        gt, eq = _gt_eq_counts(coord[grp], coord[a11])
        denom = grp.size * a11.size
        out.extend((gt / denom, eq / denom))
    return tuple(out), degenerate


def estimate_rho_ab(s: PairedSample, sets: dict | None = None):
    """Empirical (rho_s11, rho_s10, rho_s01, rho_s00) and the set of degenerate names.

    For the cross terms the X2 slot is drawn from the (x>0, y=0) group for
    s10/s00 and from the positive quadrant minus i for s01; the Y3 slot from
    the (x=0, y>0) group for s01/s00 and from the positive quadrant minus i for
    s10. Excluding i changes only the denominator since sign(0) = 0.
    """
    sets = split_by_zero(s) if sets is None else sets
    a11, b10, b01 = sets["a11"], sets["b10"], sets["b01"]
    n11 = a11.size
    degenerate = set()

    rho11 = 0.0
    if n11 >= 2:
        try:
            rho11 = spearman_midrank(PairedSample(s.x[a11], s.y[a11]))
        except DegenerateStatisticError:
            degenerate.add("rho_s11")
    else:
        degenerate.add("rho_s11")

    xa, ya = s.x[a11], s.y[a11]
    # per-i sign sums for each slot source; counts of the source
    x_from_b10 = (_sign_sums(xa, s.x[b10]), b10.size)
    x_from_a11 = (_sign_sums(xa, xa), n11 - 1)
    y_from_b01 = (_sign_sums(ya, s.y[b01]), b01.size)
    y_from_a11 = (_sign_sums(ya, ya), n11 - 1)

    rhos = {"rho_s11": rho11}
    for name, (xs, nx), (ys, ny) in (("rho_s10", x_from_b10, y_from_a11),
                                     ("rho_s01", x_from_a11, y_from_b01),
                                     ("rho_s00", x_from_b10, y_from_b01)):
        denom = n11 * nx * ny
        if denom <= 0:
            rhos[name] = 0.0
            degenerate.add(name)
        else:
            rhos[name] = 3.0 * int(xs @ ys) / denom
    return (rhos["rho_s11"], rhos["rho_s10"], rhos["rho_s01"], rhos["rho_s00"]), degenerate


@dataclass
class EstimateResult:
    rho_a: float
    components: DecompositionSummary
    n11: int
    n10: int
    n01: int
    n00: int
    degenerate_flags: set = field(default_factory=set)

    @property
    def n(self) -> int:
        return self.n11 + self.n10 + self.n01 + self.n00

    def as_dict(self) -> dict:
        comp = self.components.as_dict()
        comp.pop("degenerate", None)
        return {
            "rho_a": self.rho_a,
            "n": self.n,
            "counts": {"n11": self.n11, "n10": self.n10, "n01": self.n01, "n00": self.n00},
            "components": comp,
            "degenerate_flags": sorted(self.degenerate_flags),
        }


def estimate_rho_A(s: PairedSample) -> EstimateResult:
    """Plug-in estimate of Spearman's rho through the zero-inflation identity."""
    if s.n < 2:
        raise InsufficientDataError("need at least two pairs")
    sets = split_by_zero(s)
    n = s.n
    n11, n10, n01, n00 = (sets[k].size for k in ("a11", "b10", "b01", "z00"))
    (p1s, p1d, p2s, p2d), deg_p = estimate_p_star_dagger(s, sets)
    (r11, r10, r01, r00), deg_r = estimate_rho_ab(s, sets)
    comp = DecompositionSummary(
        p00=n00 / n, p01=n01 / n, p10=n10 / n, p11=n11 / n,
        p1_star=p1s, p1_dagger=p1d, p2_star=p2s, p2_dagger=p2d,
        rho_s11=r11, rho_s10=r10, rho_s01=r01, rho_s00=r00,
        degenerate=deg_p | deg_r,
    )
    return EstimateResult(theorem1_eval(comp), comp, n11, n10, n01, n00, deg_p | deg_r)
