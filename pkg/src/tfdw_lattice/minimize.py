"""Mass-constrained minimization of the TFDW energy on a finite box.

Projected gradient descent on {sum phi^2 = m}: step along minus the
Euler-Lagrange gradient, clamp to nonnegative values, rescale back to
mass m, with Armijo backtracking from step0.  The retraction is the cheap
two-step clamp+rescale rather than an exact sphere geodesic; descent is
enforced by the acceptance test, and the trajectory total is
non-increasing by construction.

Also here: the mass-concentration diagnostics S(r), the annulus growth
inequality check, the concentration radius R0, and the subadditivity /
two-cluster splitting scans that exhibit the small-mass existence vs
large-mass splitting dichotomy.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .coulomb import potential_fast
from .energy import EnergyBreakdown, constrained_residual, energy_terms
from .grids import BoxDomain, DensityGrid, FieldGrid, centered_box, kinetic_sum, laplacian_field, load_field
from .lattice import DistanceKind
from .spreading import SpreadFamilyParams, build_psi


class Termination(Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    STALLED = "stalled"


class NumericalFailure(RuntimeError):
    """Non-finite energy during descent; carries the last valid iterate."""

    def __init__(self, message: str, last_field: FieldGrid):
        super().__init__(message)
        self.last_field = last_field


@dataclass(frozen=True)
class MinimizeConfig:
    half_width: int
    mass: float
    kind: DistanceKind = DistanceKind.EUCLIDEAN
    init: str = "ball_cone"  # ball_cone | gaussian_like | random | file
    seed: int | None = None
    init_path: str | None = None
    max_iters: int = 20000
    step0: float = 0.1
    tol_residual: float = 1e-6
    backtrack: float = 0.5
    armijo: float = 1e-4
    c0_fraction: float = 0.5  # concentration threshold C0 = c0_fraction * mass

    def __post_init__(self):
        if self.half_width < 2:
            raise ValueError("half_width must be >= 2")
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if not (self.tol_residual > 0 and self.step0 > 0):
            raise ValueError("tolerances must be positive")
        if not (0 < self.backtrack < 1 and 0 < self.armijo < 1):
            raise ValueError("backtrack and armijo constants must lie in (0,1)")
        if self.init not in ("ball_cone", "gaussian_like", "random", "file"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.init == "random" and self.seed is None:
            raise ValueError("random init needs a seed")
        if self.init == "file" and self.init_path is None:
            raise ValueError("file init needs init_path")


@dataclass
class MinimizeReport:
    field: FieldGrid
    kind: DistanceKind
    trajectory: list[dict]
    breakdown: EnergyBreakdown
    residual: float
    boundary_mass_fraction: float
    s_profile: list[tuple[int, float]]
    r0: int | None
    r0_center: tuple | None
    doubling_holds: bool | None
    termination: Termination
    iterations: int


TRAJECTORY_HEADER = ["iter", "total", "kinetic", "tf", "dirac", "coulomb", "step", "residual"]


def projection_mass(phi: FieldGrid, mass: float) -> FieldGrid:
    """Rescale phi onto {sum phi^2 = mass}; idempotent, keeps phi >= 0."""
    if not mass > 0:
        raise ValueError("mass must be positive")
    if phi.mass == 0.0:
        raise ValueError("cannot project the zero field onto a mass sphere")
    if abs(phi.mass - mass) <= 4 * np.finfo(float).eps * mass:
        return phi  # already on the sphere: exact no-op
    return FieldGrid(phi.box, phi.values * math.sqrt(mass / phi.mass))


def _initial_values(cfg: MinimizeConfig, box: BoxDomain) -> np.ndarray:
    if cfg.init == "ball_cone":
        n = max(1, math.ceil(cfg.half_width / 2))
        vals = build_psi(SpreadFamilyParams(n, cfg.mass), box=box).values
    elif cfg.init == "gaussian_like":
        sigma = max(cfg.half_width / 4.0, 1.0)
        ax = [np.arange(l, h + 1, dtype=np.float64) for l, h in zip(box.lo, box.hi)]
        r2 = (ax[0][:, None, None] ** 2 + ax[1][None, :, None] ** 2
              + ax[2][None, None, :] ** 2)
        vals = np.exp(-r2 / (2.0 * sigma * sigma))
    elif cfg.init == "random":
        vals = np.random.default_rng(cfg.seed).random(box.dims)
    else:  # file
        loaded, _ = load_field(cfg.init_path)
        if loaded.box.dims != box.dims:
            raise ValueError(f"init field dims {loaded.box.dims} != box dims {box.dims}")
        vals = loaded.values.copy()
    return _rescale(vals, cfg.mass)


def _rescale(values: np.ndarray, mass: float) -> np.ndarray:
    cur = float(np.sum(values * values))
    if cur == 0.0:
        raise ValueError("cannot rescale the zero field")
    return values * math.sqrt(mass / cur)


def _evaluate(values: np.ndarray, box: BoxDomain, kind: DistanceKind):
    """Energy breakdown plus the Coulomb potential (reused by the gradient)."""
    rho = values * values
    pot = potential_fast(DensityGrid(box, rho), kind)
    kin = kinetic_sum(values)
    tf = float(np.sum(values ** (10.0 / 3.0)))
    dirac = float(np.sum(values ** (8.0 / 3.0)))
    coul = float(np.sum(rho * pot))
    return EnergyBreakdown.build(kin, tf, dirac, coul), pot


def minimize(cfg: MinimizeConfig) -> MinimizeReport:
    box = centered_box(cfg.half_width)
    v = _initial_values(cfg, box)
    bd, pot = _evaluate(v, box, cfg.kind)
    trajectory: list[dict] = []
    termination = Termination.MAX_ITERS
    step_taken = 0.0
    it = 0
    while True:
        grad = (2.0 * laplacian_field(v)
                + (10.0 / 3.0) * v ** (7.0 / 3.0)
                - (8.0 / 3.0) * v ** (5.0 / 3.0)
                + 4.0 * v * pot)
        res = constrained_residual(v, grad)
        trajectory.append({
            "iter": it, "total": bd.total, "kinetic": bd.kinetic, "tf": bd.tf_term,
            "dirac": bd.dirac_term, "coulomb": bd.coulomb,
            "step": step_taken, "residual": res,
        })
        if res <= cfg.tol_residual:
            termination = Termination.CONVERGED
            break
        if it >= cfg.max_iters:
            termination = Termination.MAX_ITERS
            break

        t = cfg.step0
        accepted = False
        while t > 1e-16:
            trial = np.maximum(v - t * grad, 0.0)
            norm = float(np.sum(trial * trial))
            if norm > 0.0:
                trial *= math.sqrt(cfg.mass / norm)
                bd_t, pot_t = _evaluate(trial, box, cfg.kind)
                if not math.isfinite(bd_t.total):
                    raise NumericalFailure(
                        f"non-finite energy at iteration {it} (step {t})",
                        FieldGrid(box, v))
                if bd_t.total <= bd.total - cfg.armijo * t * res * res:
                    accepted = True
                    break
            t *= cfg.backtrack
        if not accepted:
            termination = Termination.STALLED
            break
        assert bd_t.total <= bd.total  # accepted steps never increase the energy
        v, bd, pot = trial, bd_t, pot_t
        step_taken = t
        it += 1

    final = FieldGrid(box, v)
    rho = final.values ** 2
    prof = s_profile(final)
    c0 = cfg.c0_fraction * cfg.mass
    r0, center, doubling = concentration_radius(final, c0, return_details=True)
    return MinimizeReport(
        field=final,
        kind=cfg.kind,
        trajectory=trajectory,
        breakdown=bd,
        residual=trajectory[-1]["residual"],
        boundary_mass_fraction=_boundary_fraction(rho),
        s_profile=prof,
        r0=r0,
        r0_center=center,
        doubling_holds=doubling,
        termination=termination,
        iterations=it,
    )


def _boundary_fraction(rho: np.ndarray) -> float:
    total = float(rho.sum())
    if total == 0.0:
        return 0.0
    interior = rho[1:-1, 1:-1, 1:-1].sum() if min(rho.shape) > 2 else 0.0
    return float((total - interior) / total)


# ---------------------------------------------------------------------------
# concentration diagnostics
# ---------------------------------------------------------------------------

def _l1_distance_grid(box: BoxDomain, center) -> np.ndarray:
    ax = [np.abs(np.arange(l, h + 1, dtype=np.int64) - c)
          for (l, h, c) in zip(box.lo, box.hi, center)]
    return ax[0][:, None, None] + ax[1][None, :, None] + ax[2][None, None, :]


def mass_center(phi: FieldGrid) -> tuple:
    """The cell carrying the largest phi^2 (ties broken lexicographically)."""
    idx = np.unravel_index(int(np.argmax(phi.values)), phi.values.shape)
    return phi.box.point(tuple(int(i) for i in idx))


def s_profile(phi: FieldGrid, center=None) -> list[tuple[int, float]]:
    """S(r) = mass of phi^2 in the graph ball of radius r around the center."""
    if center is None:
        center = mass_center(phi)
    rho = phi.values ** 2
    dist = _l1_distance_grid(phi.box, center)
    rmax = int(dist.max())
    sums = np.bincount(dist.ravel(), weights=rho.ravel(), minlength=rmax + 1)
    cum = np.cumsum(sums)
    return [(r, float(cum[r])) for r in range(rmax + 1)]


@dataclass(frozen=True)
class MassGrowthRecord:
    r: int
    R: int
    lhs_annulus: float   # mass of the transition shells B_{r+1} \ B_{r-1}
    lhs_union: float     # the weaker whole-ball reading S(r+1)
    rhs: float
    holds: bool
    holds_union: bool


def mass_growth_check(phi: FieldGrid, r: int, R: int, center=None) -> MassGrowthRecord:
    """Annulus mass against S(r) (S(R) - S(r+1)) / (3 (R + r)).

    The sharp reading takes the transition shells B_{r+1} \\ B_{r-1} on the
    left; the whole-ball reading S(r+1) is weaker and reported alongside.
    Radii beyond the box see the full mass (phi == 0 outside).
    """
    if r < 1 or R <= r + 1:
        raise ValueError(f"need R > r+1 >= 2, got r={r} R={R}")
    prof = dict(s_profile(phi, center=center))
    rmax = max(prof)

    def S(k: int) -> float:
        return prof[min(k, rmax)]

    lhs = S(r + 1) - S(r - 1)
    rhs = S(r) * (S(R) - S(r + 1)) / (3.0 * (R + r))
    return MassGrowthRecord(r, R, lhs, S(r + 1), rhs, lhs >= rhs, S(r + 1) >= rhs)


def concentration_radius(phi: FieldGrid, c0: float, return_details: bool = False):
    """Smallest R such that some lattice ball of radius R holds mass >= c0.

    Centers range over the box; mass outside the box is zero, so clipped
    balls lose nothing.  Returns None (or (None, None, None)) if even the
    whole box holds less than c0.  With details, also reports whether the
    doubling bound m <= 2 S(2 R0) holds around the achieving center.
    The best ball mass is nondecreasing in R, so R0 is found by bisection
    on an FFT ball filter.
    """
    if not c0 > 0:
        raise ValueError("c0 must be positive")
    rho = phi.values ** 2
    total = float(rho.sum())
    box = phi.box
    r0 = center = None
    tie_slack = 1e-9 * max(1.0, total)  # FFT filter noise is ~1e-13 relative
    if total >= c0 - tie_slack:
        max_radius = sum(d - 1 for d in rho.shape)
        lo, hi = 0, max_radius  # best_mass(max_radius) == total >= c0
        while lo < hi:
            mid = (lo + hi) // 2
            best, _ = _best_ball_mass(rho, mid)
            if best >= c0 - tie_slack:
                hi = mid
            else:
                lo = mid + 1
        r0 = lo
        _, flat = _best_ball_mass(rho, r0)
        center = box.point(tuple(int(i) for i in np.unravel_index(flat, rho.shape)))
    if not return_details:
        return r0
    if r0 is None:
        return None, None, None
    prof = dict(s_profile(phi, center=center))
    rmax = max(prof)
    s2r0 = prof[min(2 * r0, rmax)]
    return r0, center, bool(total <= 2.0 * s2r0)


def _best_ball_mass(rho: np.ndarray, radius: int) -> tuple[float, int]:
    """(max over centers of the radius-R ball mass, argmax flat index)."""
    import scipy.fft as sfft

    if radius == 0:
        flat = int(np.argmax(rho))
        return float(rho.ravel()[flat]), flat
    dims = rho.shape
    padded = tuple(n + min(radius, n - 1) for n in dims)
    offs = [np.arange(-min(radius, n - 1), min(radius, n - 1) + 1) for n in dims]
    l1 = (np.abs(offs[0])[:, None, None] + np.abs(offs[1])[None, :, None]
          + np.abs(offs[2])[None, None, :])
    wrapped = np.zeros(padded)
    ix = [off % p for off, p in zip(offs, padded)]
    wrapped[np.ix_(*ix)] = (l1 <= radius).astype(float)
    padded_rho = np.zeros(padded)
    padded_rho[: dims[0], : dims[1], : dims[2]] = rho
    conv = sfft.irfftn(sfft.rfftn(padded_rho) * sfft.rfftn(wrapped), s=padded)
    window = conv[: dims[0], : dims[1], : dims[2]]
    flat = int(np.argmax(window))
    return float(window.ravel()[flat]), flat


# ---------------------------------------------------------------------------
# subadditivity and splitting scans
# ---------------------------------------------------------------------------

class _InfimumCache:
    """Memoized minimize() runs, keyed by mass (config otherwise shared)."""

    def __init__(self, template: MinimizeConfig):
        self.template = template
        self.runs: dict[float, MinimizeReport] = {}

    def run(self, mass: float) -> MinimizeReport:
        key = round(float(mass), 12)
        if key not in self.runs:
            self.runs[key] = minimize(replace(self.template, mass=float(mass)))
        return self.runs[key]

    def value(self, mass: float) -> float:
        return self.run(mass).breakdown.total


SUBADDITIVITY_HEADER = ["m1", "I_m1", "I_rest", "I_m", "gap_indicator"]


def subadditivity_scan(mass: float, splits, template: MinimizeConfig,
                       cache: _InfimumCache | None = None) -> list[dict]:
    """gap = I(m1) + I(m - m1) - I(m) for each split; positive gaps are the
    numerical strict-subadditivity evidence."""
    cache = cache or _InfimumCache(template)
    i_m = cache.value(mass)
    rows = []
    for m1 in splits:
        if not 0 < m1 < mass:
            raise ValueError(f"split {m1} outside (0, {mass})")
        i_1 = cache.value(m1)
        i_2 = cache.value(mass - m1)
        rows.append({"m1": m1, "I_m1": i_1, "I_rest": i_2, "I_m": i_m,
                     "gap_indicator": i_1 + i_2 - i_m})
    return rows


@dataclass(frozen=True)
class SplitRecord:
    mass: float
    separation: int
    e_single: float
    e_split_best: float
    best_m1: float
    advantage_indicator: float  # positive: two clusters beat one


def splitting_advantage(mass: float, separation: int, template: MinimizeConfig,
                        split_fractions=(0.3, 0.4, 0.5),
                        cache: _InfimumCache | None = None) -> SplitRecord:
    """Best two-cluster competitor against the single minimizer.

    Clusters are minimized independently, shifted to -+ separation/2 along
    the first axis, summed and jointly renormalized to the target mass.
    """
    cache = cache or _InfimumCache(template)
    single = cache.run(mass)
    box = single.field.box
    if separation >= box.dims[0]:
        raise ValueError(f"separation {separation} does not fit the box {box.dims}")
    best = math.inf
    best_m1 = None
    for frac in split_fractions:
        m1 = frac * mass
        e_split = composed_split_energy(cache.run(m1).field, cache.run(mass - m1).field,
                                        separation, mass, template.kind)
        if e_split < best:
            best, best_m1 = e_split, m1
    return SplitRecord(mass, separation, single.breakdown.total, best, best_m1,
                       single.breakdown.total - best)


def composed_split_energy(left: FieldGrid, right: FieldGrid, separation: int,
                          mass: float, kind: DistanceKind) -> float:
    """Energy of the renormalized sum of two clusters at a given separation."""
    from .grids import _shifted

    h1 = separation // 2
    h2 = separation - h1
    composite = _shifted(left.values, 0, h1) + _shifted(right.values, 0, -h2)
    composite = _rescale(composite, mass)
    return energy_terms(composite, kind, box=left.box).total


def write_trajectory_csv(path, report: MinimizeReport) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TRAJECTORY_HEADER)
        writer.writeheader()
        for row in report.trajectory:
            writer.writerow({k: (row[k] if isinstance(row[k], int) else repr(float(row[k])))
                             for k in TRAJECTORY_HEADER})
