"""Population Spearman's rho for finite joint pmfs and its zero-inflation decomposition.

Spearman's rho is taken in its three-copy concordance form

    rho_S = 3 P((X1 - X2)(Y1 - Y3) > 0) - 3 P((X1 - X2)(Y1 - Y3) < 0)

with (X1, Y1) ~ H and X2 ~ F, Y3 ~ G independent. Conditioning on X1 = x and
Y1 = y gives P(X1 > X2) - P(X1 < X2) = F(x-1) + F(x) - 1, and likewise for Y,
so the whole statistic collapses to one weighted double sum over the grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .copulas import JointPmf
from .margins import DiscretePmf


class DegenerateConditioningError(ValueError):
    """Conditioning on an event of probability zero."""


def _grade_scores(support: np.ndarray, slot: DiscretePmf) -> np.ndarray:
    """P(v > V) - P(v < V) = G(v-1) + G(v) - 1 for V ~ slot, at each v in support."""
    upper = slot.cdf(support)
    lower = slot.cdf(support - 1)
    return upper + lower - 1.0


def concordance_rho(J: JointPmf, x_slot: DiscretePmf | None = None,
                    y_slot: DiscretePmf | None = None) -> float:
    """3 (P_c - P_d) for (X1, Y1) ~ J against independent X2 ~ x_slot, Y3 ~ y_slot.

    Defaults to J's own margins, i.e. Spearman's rho of J.
    """
    x_slot = J.x_margin if x_slot is None else x_slot
    y_slot = J.y_margin if y_slot is None else y_slot
    a = _grade_scores(J.x_support, x_slot)
    b = _grade_scores(J.y_support, y_slot)
    return float(3.0 * (a @ J.mass @ b))


def spearman_exact(J: JointPmf) -> float:
    """Spearman's rho of a finite joint pmf (ties included)."""
    return concordance_rho(J)


def condition_positive(J: JointPmf) -> JointPmf:
    """Law of (X, Y) given X > 0 and Y > 0."""
    xpos = J.x_support > 0
    ypos = J.y_support > 0
    sub = J.mass[np.ix_(xpos, ypos)]
    p11 = sub.sum()
    if not p11 > 0:
        raise DegenerateConditioningError("P(X > 0, Y > 0) = 0")
    return JointPmf(J.x_support[xpos], J.y_support[ypos], sub / p11)


def _conditional_margin(support: np.ndarray, weights: np.ndarray) -> DiscretePmf | None:
    total = weights.sum()
    if not total > 0:
        return None
    keep = weights > 0
    return DiscretePmf(support[keep], weights[keep] / total)


def gt_eq_probs(a: DiscretePmf | None, b: DiscretePmf | None) -> tuple[float, float]:
    """(P(A > B), P(A = B)) for independent A ~ a, B ~ b; zeros if either is missing."""
    if a is None or b is None:
        return 0.0, 0.0
    below = b.cdf(a.support - 1)
    at = b.pmf(a.support)
    return float(a.probs @ below), float(a.probs @ at)


@dataclass
class DecompositionSummary:
    """Every ingredient of the zero-inflation identity for one distribution or sample.

    ``x10`` is the law of X given X > 0, Y = 0 (``None`` when that event has
    probability zero); ``x11``, ``y01``, ``y11`` are analogous.
    """

    p00: float
    p01: float
    p10: float
    p11: float
    p1_star: float
    p1_dagger: float
    p2_star: float
    p2_dagger: float
    rho_s11: float
    rho_s10: float
    rho_s01: float
    rho_s00: float
    x10: DiscretePmf | None = None
    x11: DiscretePmf | None = None
    y01: DiscretePmf | None = None
    y11: DiscretePmf | None = None
    degenerate: set = field(default_factory=set)

    @property
    def rho_s_star(self) -> float:
        p00, p01, p10, p11 = self.p00, self.p01, self.p10, self.p11
        return (p11 * p11 * self.rho_s11 + p11 * p10 * self.rho_s10
                + p11 * p01 * self.rho_s01 + p01 * p10 * self.rho_s00)

    def as_dict(self) -> dict:
        keys = ("p00", "p01", "p10", "p11", "p1_star", "p1_dagger", "p2_star",
                "p2_dagger", "rho_s11", "rho_s10", "rho_s01", "rho_s00")
        out = {k: getattr(self, k) for k in keys}
        out["rho_s_star"] = self.rho_s_star
        out["degenerate"] = sorted(self.degenerate)
        return out


def theorem1_eval(d: DecompositionSummary) -> float:
    """Spearman's rho reassembled from its zero/positive decomposition."""
    p00, p01, p10, p11 = d.p00, d.p01, d.p10, d.p11
    cross = (p10 * (1.0 - 2.0 * d.p1_star - d.p1_dagger)
             + p01 * (1.0 - 2.0 * d.p2_star - d.p2_dagger))
    return p11 * d.rho_s_star + 3.0 * p11 * cross + 3.0 * (p00 * p11 - p01 * p10)


def decompose(J: JointPmf) -> DecompositionSummary:
    """Quadrant masses, conditional positive margins, p*/p-dagger terms and conditional rhos."""
    p00, p01, p10, p11 = J.quadrant_masses()
    h = J.mass
    xpos = J.x_support > 0
    ypos = J.y_support > 0
    xs, ys = J.x_support[xpos], J.y_support[ypos]

    x10 = _conditional_margin(xs, h[np.ix_(xpos, ~ypos)].sum(axis=1))
    x11 = _conditional_margin(xs, h[np.ix_(xpos, ypos)].sum(axis=1))
    y01 = _conditional_margin(ys, h[np.ix_(~xpos, ypos)].sum(axis=0))
    y11 = _conditional_margin(ys, h[np.ix_(xpos, ypos)].sum(axis=0))

    degenerate = set()
    p1_star, p1_dagger = gt_eq_probs(x10, x11)
    p2_star, p2_dagger = gt_eq_probs(y01, y11)
    if x10 is None or x11 is None:
        degenerate.update({"p1_star", "p1_dagger"})
    if y01 is None or y11 is None:
        degenerate.update({"p2_star", "p2_dagger"})

    rhos = {"rho_s11": 0.0, "rho_s10": 0.0, "rho_s01": 0.0, "rho_s00": 0.0}
    if p11 > 0:
        pos = condition_positive(J)
        slots = {"rho_s11": (x11, y11), "rho_s10": (x10, y11),
                 "rho_s01": (x11, y01), "rho_s00": (x10, y01)}
        for name, (xm, ym) in slots.items():
            if xm is None or ym is None:
                degenerate.add(name)
            else:
                rhos[name] = concordance_rho(pos, xm, ym)
    else:
        degenerate.update(rhos)

    return DecompositionSummary(
        p00=p00, p01=p01, p10=p10, p11=p11,
        p1_star=p1_star, p1_dagger=p1_dagger, p2_star=p2_star, p2_dagger=p2_dagger,
        x10=x10, x11=x11, y01=y01, y11=y11, degenerate=degenerate, **rhos,
    )
