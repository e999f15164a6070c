"""Randomized checks of the functional inequalities behind the energy bounds.

* l^p monotonicity on counting-measure spaces: ||u||_q <= ||u||_p for q >= p.
* The discrete Hardy-Littlewood-Sobolev bound: for 0 < alpha < N,
  1 < r, s < inf with 1/r + 1/s + (N - alpha)/N >= 2,

      sum_{x != y} f(x) g(y) / |x-y|^{N-alpha}  <=  C ||f||_r ||g||_s.

  The sharp constant is not known here; the suite records the running
  maximum of the ratio over random instances and asserts boundedness and
  seed stability.
* The truncation comparison: capping a field at (4/5)^{3/2} lowers the
  F-sum, the kinetic term and the Coulomb term simultaneously, which is
  why minimizing fields never need to exceed the cap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energy import F_local, PHI_CAP
from .grids import FieldGrid, gradient_sq_field, kinetic_sum
from .coulomb import pairing
from .lattice import DistanceKind


def lp_norm(u: np.ndarray, p: float) -> float:
    a = np.abs(np.asarray(u, dtype=np.float64))
    if p == np.inf:
        return float(a.max()) if a.size else 0.0
    if p < 1:
        raise ValueError("p must be >= 1")
    return float((a**p).sum() ** (1.0 / p))


@dataclass(frozen=True)
class MonotonicityRecord:
    lhs: float  # ||u||_q
    rhs: float  # ||u||_p
    holds: bool


def lp_monotonicity_check(u: np.ndarray, p: float, q: float) -> MonotonicityRecord:
    if not 1 <= p <= q:
        raise ValueError(f"need q >= p >= 1, got p={p} q={q}")
    lhs = lp_norm(u, q)
    rhs = lp_norm(u, p)
    return MonotonicityRecord(lhs, rhs, lhs <= rhs + 1e-12)


# ---------------------------------------------------------------------------
# Hardy-Littlewood-Sobolev
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HlsInstance:
    dim: int                 # N in 2..4
    alpha: float             # 0 < alpha < N
    r: float
    s: float
    f_positions: np.ndarray  # (k, N) integer sites
    f_values: np.ndarray
    g_positions: np.ndarray
    g_values: np.ndarray
    kind: DistanceKind = DistanceKind.EUCLIDEAN

    def __post_init__(self):
        if not 2 <= self.dim <= 4:
            raise ValueError("dimension must be in 2..4")
        if not 0 < self.alpha < self.dim:
            raise ValueError(f"need 0 < alpha < N, got alpha={self.alpha} N={self.dim}")
        if not (self.r > 1 and self.s > 1):
            raise ValueError("exponents must exceed 1")
        if 1.0 / self.r + 1.0 / self.s + (self.dim - self.alpha) / self.dim < 2.0 - 1e-12:
            raise ValueError(
                f"inadmissible exponents: 1/{self.r} + 1/{self.s} + "
                f"({self.dim}-{self.alpha})/{self.dim} < 2")


def hls_ratio(inst: HlsInstance) -> float:
    """(sum_{x != y} f(x) g(y) / |x-y|^{N-alpha}) / (||f||_r ||g||_s)."""
    diffs = inst.f_positions[:, None, :] - inst.g_positions[None, :, :]
    if inst.kind is DistanceKind.EUCLIDEAN:
        dist = np.sqrt((diffs * diffs).sum(axis=2, dtype=np.float64))
    else:
        dist = np.abs(diffs).sum(axis=2).astype(np.float64)
    same = dist == 0.0
    dist[same] = np.inf
    double_sum = float((inst.f_values[:, None] * inst.g_values[None, :]
                        / dist ** (inst.dim - inst.alpha)).sum())
    denom = lp_norm(inst.f_values, inst.r) * lp_norm(inst.g_values, inst.s)
    if denom == 0.0:
        return 0.0
    return double_sum / denom


def random_hls_instance(rng: np.random.Generator, dim: int = 3, alpha: float = 2.0,
                        max_side: int = 6, kind: DistanceKind = DistanceKind.EUCLIDEAN,
                        exponents=None) -> HlsInstance:
    """Supports uniform in a small window, values i.i.d. uniform [0, 1]."""
    if exponents is None:
        # admissible pairs for N=3, alpha=2: 1/r + 1/s >= 2 - 1/3 = 5/3
        r = s = 6.0 / 5.0
    else:
        r, s = exponents
    def draw():
        sides = rng.integers(1, max_side + 1, size=dim)
        pos = np.stack(np.meshgrid(*[np.arange(n) for n in sides], indexing="ij"),
                       axis=-1).reshape(-1, dim)
        shift = rng.integers(-8, 9, size=dim)
        vals = rng.random(len(pos))
        return pos + shift, vals
    fp, fv = draw()
    gp, gv = draw()
    return HlsInstance(dim, alpha, r, s, fp, fv, gp, gv, kind)


# ---------------------------------------------------------------------------
# truncation comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncationRecord:
    e_full: float
    e_truncated: float
    f_sum_full: float
    f_sum_truncated: float
    kinetic_full: float
    kinetic_truncated: float
    coulomb_full: float
    coulomb_truncated: float
    cap_binds: bool

    @property
    def monotone(self) -> bool:
        return (self.f_sum_truncated <= self.f_sum_full + 1e-12
                and self.kinetic_truncated <= self.kinetic_full + 1e-12
                and self.coulomb_truncated <= self.coulomb_full + 1e-12)


def truncate_field(phi: FieldGrid, cap: float = PHI_CAP) -> FieldGrid:
    return FieldGrid(phi.box, np.minimum(phi.values, cap))


def truncation_comparison(phi: FieldGrid, kind: DistanceKind = DistanceKind.EUCLIDEAN,
                          method: str = "fast") -> TruncationRecord:
    capped = truncate_field(phi)
    binds = bool((phi.values > PHI_CAP).any())

    def parts(f: FieldGrid):
        kin = kinetic_sum(f.values)
        fsum = float(F_local(f.values**2).sum())
        dens = f.density()
        coul = pairing(dens, dens, kind, method=method)
        return kin, fsum, coul

    kin_f, fsum_f, coul_f = parts(phi)
    kin_t, fsum_t, coul_t = parts(capped)
    return TruncationRecord(
        e_full=kin_f + fsum_f + coul_f,
        e_truncated=kin_t + fsum_t + coul_t,
        f_sum_full=fsum_f,
        f_sum_truncated=fsum_t,
        kinetic_full=kin_f,
        kinetic_truncated=kin_t,
        coulomb_full=coul_f,
        coulomb_truncated=coul_t,
        cap_binds=binds,
    )


def gradient_dominates_truncation(phi: FieldGrid) -> bool:
    """|grad min(phi, cap)| <= |grad phi| pointwise (capping is 1-Lipschitz)."""
    capped = np.minimum(phi.values, PHI_CAP)
    return bool(np.all(gradient_sq_field(capped) <= gradient_sq_field(phi.values) + 1e-12))


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

@dataclass
class SuiteSummary:
    check: str
    instances: int
    violations: int
    max_ratio: float
    seed: int


def lp_suite(instances: int, seed: int) -> SuiteSummary:
    rng = np.random.default_rng(seed)
    violations = 0
    worst = 0.0
    for _ in range(instances):
        size = int(rng.integers(1, 40))
        u = rng.random(size) * 10.0 ** rng.integers(-2, 3)
        p = float(1.0 + 9.0 * rng.random())
        q = float(p + (10.0 - p) * rng.random())
        rec = lp_monotonicity_check(u, p, q)
        if not rec.holds:
            violations += 1
        if rec.rhs > 0:
            worst = max(worst, rec.lhs / rec.rhs)
    return SuiteSummary("lp_monotonicity", instances, violations, worst, seed)


def hls_suite(instances: int, seed: int, dim: int = 3, alpha: float = 2.0,
              kind: DistanceKind = DistanceKind.EUCLIDEAN) -> SuiteSummary:
    rng = np.random.default_rng(seed)
    worst = 0.0
    violations = 0
    for _ in range(instances):
        ratio = hls_ratio(random_hls_instance(rng, dim=dim, alpha=alpha, kind=kind))
        if not np.isfinite(ratio):
            violations += 1
        worst = max(worst, ratio)
    return SuiteSummary(f"hls_{kind.value}", instances, violations, worst, seed)


def truncation_suite(instances: int, seed: int,
                     kind: DistanceKind = DistanceKind.EUCLIDEAN) -> SuiteSummary:
    from .grids import BoxDomain

    rng = np.random.default_rng(seed)
    violations = 0
    worst_margin = -np.inf  # largest F_trunc - F_full: nonpositive when clean
    for _ in range(instances):
        dims = tuple(int(rng.integers(2, 7)) for _ in range(3))
        box = BoxDomain((0, 0, 0), tuple(d - 1 for d in dims))
        vals = rng.random(dims) * 1.4  # ~10% of cells land above the cap
        phi = FieldGrid(box, vals)
        rec = truncation_comparison(phi, kind, method="direct")
        ok = rec.monotone
        if rec.cap_binds and not rec.f_sum_truncated < rec.f_sum_full:
            ok = False
        if not gradient_dominates_truncation(phi):
            ok = False
        if not ok:
            violations += 1
        worst_margin = max(worst_margin, rec.f_sum_truncated - rec.f_sum_full)
    return SuiteSummary("truncation", instances, violations, worst_margin, seed)


SUITE_HEADER = ["check", "instances", "violations", "max_ratio", "seed"]


def summary_row(s: SuiteSummary) -> dict:
    return {"check": s.check, "instances": s.instances, "violations": s.violations,
            "max_ratio": repr(float(s.max_ratio)), "seed": s.seed}
