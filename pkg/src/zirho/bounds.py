"""Attainable bounds of Spearman's rho for zero-inflated count pairs.

The extremes are attained under the Frechet-Hoeffding copulas M and W. Two
routes are provided: a closed form that needs only the two margin cdfs at a
handful of located points plus the conditional rho of the positive quadrant,
and an oracle that builds the M / W joint pmfs and evaluates rho directly.

In the closed form, ``p1`` and ``p2`` are the total masses at zero,
F(0) and G(0). For a Poisson base these exceed the inflation parameter by
(1 - p) e^{-lambda}; plugging in the bare inflation parameter gives wrong
bounds whenever the base puts mass at zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .copulas import CopulaSpec, PairedSample, joint_pmf
from .estimator import InsufficientDataError
from .exact import condition_positive, spearman_exact
from .margins import (DEFAULT_EPS, DiscretePmf, PoissonSpec, ZeroInflatedMarginSpec,
                      build_margin)


class TruncationTooCoarseError(ValueError):
    """A located point would fall beyond the truncated support."""


@dataclass
class BoundsResult:
    rho_min: float
    rho_max: float
    method: str
    rho_s11_max: float | None = None
    rho_s11_min: float | None = None
    located_points: dict = field(default_factory=dict)
    case_tags: list = field(default_factory=list)
    i1: float | None = None
    i2: float | None = None
    p1: float | None = None
    p2: float | None = None
    degenerate: set = field(default_factory=set)
    notes: list = field(default_factory=list)

    @property
    def interval(self) -> tuple[float, float]:
        return self.rho_min, self.rho_max

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "rho_min": self.rho_min,
            "rho_max": self.rho_max,
            "rho_s11_min": self.rho_s11_min,
            "rho_s11_max": self.rho_s11_max,
            "p1": self.p1,
            "p2": self.p2,
            "located_points": dict(self.located_points),
            "case_tags": list(self.case_tags),
            "i1": self.i1,
            "i2": self.i2,
            "degenerate": sorted(self.degenerate),
            "notes": list(self.notes),
        }


def _first_above(m: DiscretePmf, level: float, strict: bool) -> int:
    """Smallest support point x with F(x) > level (strict) or F(x) >= level.

    ``F(x) > 1`` never holds; that search returns the first integer past the
    support, where F is already 1, so the terms it feeds vanish.
    """
    side = "right" if strict else "left"
    idx = int(np.searchsorted(m.cdf_values, level, side=side))
    if idx >= m.support.size:
        if strict and level >= 1.0:
            return int(m.support[-1]) + 1
        raise TruncationTooCoarseError(
            f"no support point with F(x) {'>' if strict else '>='} {level!r}")
    return int(m.support[idx])


def zero_masses(F: DiscretePmf, G: DiscretePmf) -> tuple[float, float]:
    return F.cdf(0), G.cdf(0)


def locate_points(F: DiscretePmf, G: DiscretePmf, p1: float | None = None,
                  p2: float | None = None) -> dict[str, int]:
    """Integer points at which the M and W couplings split the zero / positive masses.

    Upper bound (only the pair for the larger zero mass is returned):
      s~ : F(s~-1) <= p2 < F(s~),   u~ : G(u~-1) < F(s~) <= G(u~)    when p1 <= p2
      t~ : G(t~-1) <= p1 < G(t~),   v~ : F(v~-1) < G(t~) <= F(v~)    when p1 > p2
    Lower bound, only when p1 + p2 < 1:
      s~' : F(s~'-1) <= 1 - p2 < F(s~'),  u~' : G(u~'-1) <= 1 - F(s~'-1) < G(u~')
      t~' : G(t~'-1) <= 1 - p1 < G(t~'),  v~' : F(v~'-1) <= 1 - G(t~'-1) < F(v~')
    Keys are ``s``, ``u``, ``t``, ``v`` and the primed ``s_``, ``u_``, ``t_``, ``v_``.
    A key whose upper-bound case does not apply is absent; a degenerate side
    (all mass at zero) yields no upper-bound points.
    """
    z1, z2 = zero_masses(F, G)
    p1 = z1 if p1 is None else p1
    p2 = z2 if p2 is None else p2
    pts: dict[str, int] = {}
    if max(p1, p2) < 1.0:
        if p1 <= p2:
            s = _first_above(F, p2, strict=True)
            pts["s"] = s
            pts["u"] = _first_above(G, F.cdf(s), strict=False)
        else:
            t = _first_above(G, p1, strict=True)
            pts["t"] = t
            pts["v"] = _first_above(F, G.cdf(t), strict=False)
    if p1 + p2 < 1.0:
        s_ = _first_above(F, 1.0 - p2, strict=True)
        t_ = _first_above(G, 1.0 - p1, strict=True)
        pts["s_"] = s_
        pts["u_"] = _first_above(G, 1.0 - F.cdf(s_ - 1), strict=True)
        pts["t_"] = t_
        pts["v_"] = _first_above(F, 1.0 - G.cdf(t_ - 1), strict=True)
    return pts


def rho11_extremes(F: DiscretePmf, G: DiscretePmf) -> tuple[float, float, set]:
    """(max, min) of rho on the positive quadrant, attained under M and W.

    An extreme whose positive quadrant has probability zero is reported as 0
    and named in the returned degeneracy set.
    """
    degenerate = set()
    out = []
    for name, cop in (("rho_s11_max", CopulaSpec.upper()), ("rho_s11_min", CopulaSpec.lower())):
        J = joint_pmf(F, G, cop)
        if J.quadrant_masses()[3] > 0:
            out.append(spearman_exact(condition_positive(J)))
        else:
            out.append(0.0)
            degenerate.add(name)
    return out[0], out[1], degenerate


def _upper_closed(F, G, p1, p2, rho11_max, pts, tags) -> float:
    # the branch on the larger zero mass; the roles of (F, p2, s~, u~) and
    # (G, p1, t~, v~) swap with it
    if max(p1, p2) >= 1.0:
        tags.append("degenerate")
        return 0.0
    if p1 <= p2:
        tags.append("p1<=p2")
        q, A, B, a, b = p2, F, G, pts["s"], pts["u"]
    else:
        tags.append("p1>p2")
        q, A, B, a, b = p1, G, F, pts["t"], pts["v"]
    Aa, Aa1 = A.cdf(a), A.cdf(a - 1)
    Bb, Bb1 = B.cdf(b), B.cdf(b - 1)
    return ((1.0 - q) ** 3 * rho11_max + 3.0 * q * (1.0 - q)
            + 3.0 * (q - Aa1) * (Aa * (q - Bb - Bb1) + Bb * Bb1))


def _lower_closed(F, G, p1, p2, rho11_min, pts, tags, res) -> float:
    if p1 + p2 >= 1.0:
        tags.append("p1+p2>=1")
        return -3.0 * (1.0 - p1) * (1.0 - p2)
    tags.append("p1+p2<1")
    s_, u_, t_, v_ = pts["s_"], pts["u_"], pts["t_"], pts["v_"]

    def w(x, y):
        return 1.0 - F.cdf(x) - G.cdf(y)

    i1 = min(1.0 - p2, F.cdf(v_))
    i2 = min(1.0 - p1, G.cdf(u_))
    res.i1, res.i2 = i1, i2
    w00 = w(0, 0)
    Gu1 = G.cdf(u_ - 1)
    Fv1 = F.cdf(v_ - 1)
    return (w00 ** 3 * rho11_min + 3.0 * w00 * (p1 * p2 - p1 - p2) - 3.0 * p1 * p2
            + 3.0 * w(s_ - 1, u_ - 1) * w(s_, 0) * w(0, t_) * (s_ == v_)
            - 3.0 * w(s_, 0) * (p2 * w(s_ - 1, 0) + (Gu1 - p2) ** 2
                                + w(s_ - 1, u_ - 1) * (i2 - 2.0 * p2 + Gu1))
            - 3.0 * w(0, t_) * (p1 * w(0, t_ - 1) + (Fv1 - p1) ** 2
                                + w(v_ - 1, t_ - 1) * (i1 - 2.0 * p1 + Fv1)))


def _resolve_p(F: DiscretePmf, G: DiscretePmf, p1, p2) -> tuple[float, float]:
    z1, z2 = zero_masses(F, G)
    out = []
    for given, zero, name in ((p1, z1, "p1"), (p2, z2, "p2")):
        if given is None:
            out.append(zero)
        elif abs(given - zero) > 1e-12:
            raise ValueError(
                f"{name}={given!r} differs from the margin's mass at zero {zero!r}; the "
                "bound formulas take the total zero mass, not the inflation parameter")
        else:
            out.append(float(given))
    return out[0], out[1]


def bounds_closed_form(F: DiscretePmf, G: DiscretePmf, p1: float | None = None,
                       p2: float | None = None,
                       rho11: tuple[float, float] | None = None) -> BoundsResult:
    """Closed-form attainable bounds.

    ``p1`` and ``p2`` default to F(0) and G(0) and, when given, must equal
    them. ``rho11`` overrides the (max, min) positive-quadrant rho; by default
    it is computed from the M and W couplings.
    """
    p1, p2 = _resolve_p(F, G, p1, p2)
    pts = locate_points(F, G, p1, p2)
    if rho11 is None:
        r11_max, r11_min, degenerate = rho11_extremes(F, G)
    else:
        (r11_max, r11_min), degenerate = rho11, set()
    res = BoundsResult(rho_min=0.0, rho_max=0.0, method="closed_form",
                       rho_s11_max=r11_max, rho_s11_min=r11_min, located_points=pts,
                       p1=p1, p2=p2, degenerate=degenerate)
    res.rho_max = _upper_closed(F, G, p1, p2, r11_max, pts, res.case_tags)
    res.rho_min = _lower_closed(F, G, p1, p2, r11_min, pts, res.case_tags, res)
    return res


def bounds_oracle(F: DiscretePmf, G: DiscretePmf) -> BoundsResult:
    """Bounds by evaluating rho of the comonotone and countermonotone couplings."""
    rho_max = spearman_exact(joint_pmf(F, G, CopulaSpec.upper()))
    rho_min = spearman_exact(joint_pmf(F, G, CopulaSpec.lower()))
    p1, p2 = zero_masses(F, G)
    return BoundsResult(rho_min=rho_min, rho_max=rho_max, method="oracle", p1=p1, p2=p2)


def empirical_margin(values) -> DiscretePmf:
    vals, counts = np.unique(np.asarray(values), return_counts=True)
    return DiscretePmf(vals, counts / counts.sum())


def estimate_inflation(values, base: PoissonSpec | DiscretePmf | None) -> float:
    """Extra zero mass beyond what ``base`` puts at zero, clipped to [0, 1].

    Without a base the whole empirical zero mass is returned.
    """
    zero = float(np.mean(np.asarray(values) == 0))
    if base is None:
        return zero
    b0 = _base_zero(base)
    if b0 >= 1.0:
        return 0.0
    return min(1.0, max(0.0, (zero - b0) / (1.0 - b0)))


def _base_zero(base) -> float:
    if isinstance(base, PoissonSpec):
        return float(np.exp(-base.lam))
    return base.mass_at_zero


RECIPES = ("plugin", "continuous", "parametric")


def empirical_bounds(s: PairedSample, recipe: str = "plugin", base_x=None, base_y=None,
                     p1: float | None = None, p2: float | None = None,
                     eps: float = DEFAULT_EPS) -> BoundsResult:
    """Estimated attainable bounds from a sample.

    Recipes:

    ``plugin``
        Sharp bounds of the empirical margins (M / W couplings of the
        empirical pmfs).
    ``continuous``
        Closed form on the empirical margins with the positive-quadrant
        extremes fixed at +1 / -1, as if the positive parts had no ties. This
        overstates the width of the bounds for coarse positive parts.
    ``parametric``
        Bounds of the zero-inflated margins ``(p_hat, base)``, where the
        inflation is either given (``p1``, ``p2``) or estimated from the zero
        frequency net of the base's own mass at zero. Needs both bases.
    """
    if s.n < 2:
        raise InsufficientDataError("need at least two pairs")
    if recipe not in RECIPES:
        raise ValueError(f"unknown recipe {recipe!r}; choose from {RECIPES}")
    Fh, Gh = empirical_margin(s.x), empirical_margin(s.y)
    notes = []
    if recipe == "plugin":
        res = bounds_oracle(Fh, Gh)
    elif recipe == "continuous":
        res = bounds_closed_form(Fh, Gh, rho11=(1.0, -1.0))
    else:
        if base_x is None or base_y is None:
            raise ValueError("the parametric recipe needs a base for both coordinates")
        ph1 = estimate_inflation(s.x, base_x) if p1 is None else p1
        ph2 = estimate_inflation(s.y, base_y) if p2 is None else p2
        F = build_margin(ZeroInflatedMarginSpec(ph1, base_x), eps)
        G = build_margin(ZeroInflatedMarginSpec(ph2, base_y), eps)
        res = bounds_oracle(F, G)
        notes.append(f"inflation p1={ph1!r}, p2={ph2!r}")
    res.method = "empirical"
    res.case_tags.append(f"recipe={recipe}")
    res.notes.extend(notes)
    return res
