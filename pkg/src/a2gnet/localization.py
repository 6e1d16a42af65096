"""RSS localization of ground users by aerial anchors.

An anchor measures RSS, inverts the log-distance model of the drawn
LOS/NLOS state into a range estimate, and the user position comes from
nonlinear least squares on the horizontal ranges. Shadowing decays
exponentially with elevation angle, which is what makes an optimal anchor
altitude exist: too low means heavy NLOS noise, too high means a long link
whose flat RSS-distance curve amplifies every dB of error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy import optimize

from .antenna_geometry import Position3D
from .errors import DomainError
from .numerics import RngLike, RngStream, as_generator


@dataclass(frozen=True)
class AnchorPlan:
    """Equally spaced anchor points on a circle at fixed altitude."""

    m_points: int
    radius_m: float
    h_abs_m: float
    center: Position3D = field(default_factory=lambda: Position3D(0.0, 0.0, 0.0))
    hover_time_s: float = 5.0

    def __post_init__(self):
        if self.m_points < 3:
            raise DomainError("multilateration needs at least 3 anchor points")
        if self.radius_m <= 0 or self.h_abs_m <= 0:
            raise DomainError("radius and altitude must be positive")

    @property
    def inter_anchor_distance_m(self) -> float:
        """Chord length between adjacent anchors, 2 R sin(pi/M)."""
        return 2.0 * self.radius_m * math.sin(math.pi / self.m_points)


def place_anchors(plan: AnchorPlan) -> List[Position3D]:
    """Anchor positions, counterclockwise from the +x axis."""
    out = []
    for i in range(plan.m_points):
        ang = 2.0 * math.pi * i / plan.m_points
        out.append(Position3D(plan.center.x + plan.radius_m * math.cos(ang),
                              plan.center.y + plan.radius_m * math.sin(ang),
                              plan.h_abs_m))
    return out


@dataclass(frozen=True)
class ElevationChannel:
    """Elevation-angle channel for RSS ranging.

    sigma_j(theta) = a_j exp(-b_j theta) dB with theta in radians;
    P_LOS(theta) = 1 / (1 + a_o exp(-b_o (theta_deg - a_o))) with theta in
    degrees (a sharp LOS transition near a_o degrees for the defaults).
    eta_los/eta_nlos are the log-distance exponents used to invert RSS.
    """

    a_los: float = 10.0
    b_los: float = 2.0
    a_nlos: float = 30.0
    b_nlos: float = 1.7
    a_o: float = 47.0
    b_o: float = 20.0
    eta_los: float = 2.0
    eta_nlos: float = 3.0
    frequency_hz: float = 2e9

    def __post_init__(self):
        if min(self.a_los, self.a_nlos) <= 0 or min(self.b_los, self.b_nlos) < 0:
            raise DomainError("shadowing constants must be positive")
        if self.eta_los <= 0 or self.eta_nlos <= 0:
            raise DomainError("path-loss exponents must be positive")

    def sigma_db(self, theta_rad, los: bool):
        a = self.a_los if los else self.a_nlos
        b = self.b_los if los else self.b_nlos
        return a * np.exp(-b * np.asarray(theta_rad, dtype=float))

    def p_los(self, theta_rad):
        theta_deg = np.degrees(np.asarray(theta_rad, dtype=float))
        expo = np.clip(-self.b_o * (theta_deg - self.a_o), -700.0, 700.0)
        return 1.0 / (1.0 + self.a_o * np.exp(expo))

    def path_loss_spec(self, los: bool):
        """Log-distance spec of one state (the law the ranging inverts)."""
        from .channel import Carrier, LogDistance

        return LogDistance(Carrier(self.frequency_hz),
                           eta=self.eta_los if los else self.eta_nlos)


@dataclass(frozen=True)
class LocalizationScenario:
    n_users: int = 100
    user_area_radius_m: float = 200.0
    center: Position3D = field(default_factory=lambda: Position3D(0.0, 0.0, 0.0))

    def __post_init__(self):
        if self.n_users < 1 or self.user_area_radius_m <= 0:
            raise DomainError("need at least one user in a positive-radius disc")


def sample_rss_distance(true_d_m: float, theta_rad: float, ch: ElevationChannel,
                        rng: RngLike, force_state: Optional[bool] = None):
    """Draw one range estimate: (d_hat, los_flag).

    The RSS perturbation N(0, sigma_j^2) dB inverts through the same
    log-distance law that produced it, giving d_hat = d 10^(X / (10 eta_j)).
    """
    if true_d_m <= 0:
        raise DomainError("true distance must be positive")
    gen = as_generator(rng)
    if force_state is None:
        los = bool(gen.random() < ch.p_los(theta_rad))
    else:
        los = bool(force_state)
    sigma = float(ch.sigma_db(theta_rad, los))
    x_db = gen.normal(0.0, sigma) if sigma > 0 else 0.0
    eta = ch.eta_los if los else ch.eta_nlos
    return true_d_m * 10.0 ** (x_db / (10.0 * eta)), los


@dataclass(frozen=True)
class MultilaterationResult:
    x: float
    y: float
    residual: float
    ill_conditioned: bool = False


def _range_residuals(xy, anchors_xy, r_hat):
    d = np.hypot(anchors_xy[:, 0] - xy[0], anchors_xy[:, 1] - xy[1])
    return d - r_hat


def multilaterate(anchors: Sequence[Position3D], d_hat: Sequence[float],
                  search_center=None, search_radius_m: float = None,
                  grid_n: int = 21) -> MultilaterationResult:
    """Least-squares position from slant-range estimates.

    Horizontal ranges come from r_i = sqrt(d_i^2 - h_i^2), clamped to zero
    when noise drives d_i below the anchor altitude. The solver seeds local
    descent from the best cells of a grid over the search area and always
    returns a point at least as good as every grid seed.
    """
    if len(anchors) < 3:
        raise DomainError("multilateration needs at least 3 anchors")
    if len(anchors) != len(d_hat):
        raise DomainError("one range estimate per anchor required")
    axy = np.array([[a.x, a.y] for a in anchors])
    heights = np.array([a.h for a in anchors])
    d_hat = np.asarray(d_hat, dtype=float)
    r_hat = np.sqrt(np.maximum(d_hat ** 2 - heights ** 2, 0.0))

    centered = axy - axy.mean(axis=0)
    svals = np.linalg.svd(centered, compute_uv=False)
    ill = bool(svals[-1] < 1e-9 * max(svals[0], 1.0))

    if search_center is None:
        cx, cy = axy.mean(axis=0)
    else:
        cx, cy = search_center
    if search_radius_m is None:
        spread = float(np.max(np.hypot(*(axy - [cx, cy]).T)))
        search_radius_m = max(float(np.max(r_hat)) + spread, 1.0)

    gx = np.linspace(cx - search_radius_m, cx + search_radius_m, grid_n)
    gy = np.linspace(cy - search_radius_m, cy + search_radius_m, grid_n)
    xx, yy = np.meshgrid(gx, gy)
    d_grid = np.hypot(axy[:, 0, None, None] - xx, axy[:, 1, None, None] - yy)
    cost_grid = np.sum((d_grid - r_hat[:, None, None]) ** 2, axis=0)

    flat = np.argsort(cost_grid, axis=None)[:3]
    best_xy = None
    best_cost = math.inf
    for idx in flat:
        iy, ix = np.unravel_index(idx, cost_grid.shape)
        res = optimize.least_squares(_range_residuals, [xx[iy, ix], yy[iy, ix]],
                                     args=(axy, r_hat), method="lm", xtol=1e-10)
        cost = float(np.sum(res.fun ** 2))
        if cost < best_cost:
            best_cost = cost
            best_xy = res.x
    grid_best = float(cost_grid.flat[flat[0]])
    if grid_best < best_cost:  # pragma: no cover - descent rarely loses
        iy, ix = np.unravel_index(flat[0], cost_grid.shape)
        best_xy = np.array([xx[iy, ix], yy[iy, ix]])
        best_cost = grid_best
    return MultilaterationResult(float(best_xy[0]), float(best_xy[1]),
                                 math.sqrt(best_cost), ill)


def localization_error(estimate_xy, true_xy, r_hat, r_true):
    """(range_err, pos_err): range-space residual norm and planar miss."""
    r_hat = np.asarray(r_hat, dtype=float)
    r_true = np.asarray(r_true, dtype=float)
    if r_hat.shape != r_true.shape:
        raise DomainError("range vectors must have matching length")
    range_err = float(np.sqrt(np.sum((r_hat - r_true) ** 2)))
    pos_err = float(math.hypot(estimate_xy[0] - true_xy[0],
                               estimate_xy[1] - true_xy[1]))
    return range_err, pos_err


@dataclass
class CampaignResult:
    h_abs_m: float
    radius_m: float
    m_points: int
    pos_errors: np.ndarray
    range_errors: np.ndarray

    @property
    def mean_error_m(self) -> float:
        return float(np.mean(self.pos_errors))

    @property
    def p50_m(self) -> float:
        return float(np.median(self.pos_errors))

    @property
    def p90_m(self) -> float:
        return float(np.quantile(self.pos_errors, 0.9))

    def error_cdf(self):
        x = np.sort(self.pos_errors)
        return x, np.arange(1, x.size + 1) / x.size


def run_campaign(scenario: LocalizationScenario, plan: AnchorPlan,
                 ch: ElevationChannel, rng: RngStream,
                 trials_per_user: int = 1,
                 state_mode: str = "independent") -> CampaignResult:
    """Localize uniformly placed users and aggregate the error statistics.

    state_mode: 'independent' draws a LOS state per anchor; 'common' draws
    one state per user (shared by all anchors); 'los'/'nlos' force it.
    Users are independent work units keyed by (seed, user, trial).
    """
    if state_mode not in ("independent", "common", "los", "nlos"):
        raise DomainError(f"unknown state mode {state_mode!r}")
    anchors = place_anchors(plan)
    axy = np.array([[a.x, a.y] for a in anchors])
    pos_errors = []
    range_errors = []
    cx, cy = scenario.center.x, scenario.center.y
    for u in range(scenario.n_users):
        for t in range(trials_per_user):
            gen = rng.child_generator(u, t)
            r = scenario.user_area_radius_m * math.sqrt(gen.random())
            ang = gen.uniform(0.0, 2.0 * math.pi)
            ux, uy = cx + r * math.cos(ang), cy + r * math.sin(ang)
            r_true = np.hypot(axy[:, 0] - ux, axy[:, 1] - uy)
            d_true = np.hypot(r_true, plan.h_abs_m)
            theta = np.arctan2(plan.h_abs_m, r_true)
            if state_mode == "common":
                forced = bool(gen.random() < float(ch.p_los(np.min(theta))))
            elif state_mode == "los":
                forced = True
            elif state_mode == "nlos":
                forced = False
            else:
                forced = None
            d_hat = np.empty(plan.m_points)
            for i in range(plan.m_points):
                d_hat[i], _ = sample_rss_distance(
                    float(d_true[i]), float(theta[i]), ch, gen,
                    force_state=forced)
            est = multilaterate(anchors, d_hat,
                                search_center=(cx, cy),
                                search_radius_m=scenario.user_area_radius_m)
            r_hat = np.sqrt(np.maximum(d_hat ** 2 - plan.h_abs_m ** 2, 0.0))
            rng_err, pos_err = localization_error((est.x, est.y), (ux, uy),
                                                  r_hat, r_true)
            pos_errors.append(pos_err)
            range_errors.append(rng_err)
    return CampaignResult(plan.h_abs_m, plan.radius_m, plan.m_points,
                          np.array(pos_errors), np.array(range_errors))
