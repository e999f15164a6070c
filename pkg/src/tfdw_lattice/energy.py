"""The TFDW energy on fields over Z^3.

    E(phi) = sum_y ( |grad phi|^2(y) + phi^{10/3}(y) - phi^{8/3}(y) )
             + sum_{x != y} phi^2(x) phi^2(y) / |x-y|

The kinetic term counts each unordered edge once with weight 1; edges
crossing the box boundary contribute phi(inside)^2.  The Coulomb term runs
over ordered pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coulomb import pairing, potential_direct, potential_fast
from .grids import FieldGrid, kinetic_sum, laplacian_field
from .lattice import DistanceKind

# the local nonlinearity F(s) = s^{5/3} - s^{4/3} has its minimum at s = (4/5)^3
F_MINIMIZER = (4.0 / 5.0) ** 3
F_MINIMUM = -((4.0 / 5.0) ** 4) / 5.0
# fields never need to exceed (4/5)^{3/2}: capping there lowers every term
PHI_CAP = (4.0 / 5.0) ** 1.5


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic: float
    tf_term: float
    dirac_term: float
    coulomb: float
    total: float

    @classmethod
    def build(cls, kinetic: float, tf_term: float, dirac_term: float, coulomb: float):
        return cls(kinetic, tf_term, dirac_term, coulomb,
                   kinetic + tf_term - dirac_term + coulomb)


def F_local(s):
    """F(s) = s^{5/3} - s^{4/3} for s >= 0 (scalar or array)."""
    arr = np.asarray(s, dtype=np.float64)
    if arr.size and arr.min() < 0:
        raise ValueError(f"F is only defined for s >= 0, got {arr.min()}")
    out = arr ** (5.0 / 3.0) - arr ** (4.0 / 3.0)
    return float(out) if np.isscalar(s) or arr.ndim == 0 else out


def energy_terms(values: np.ndarray, kind: DistanceKind, method: str = "fast",
                 box=None) -> EnergyBreakdown:
    """Energy of a raw value array on a box (phi == 0 outside)."""
    from .grids import BoxDomain, DensityGrid

    v = np.maximum(values, 0.0)
    kin = kinetic_sum(v)
    tf = float(np.sum(v ** (10.0 / 3.0)))
    dirac = float(np.sum(v ** (8.0 / 3.0)))
    if box is None:
        box = BoxDomain((0, 0, 0), tuple(n - 1 for n in v.shape))
    dens = DensityGrid(box, v * v)
    coul = pairing(dens, dens, kind, method=method)
    return EnergyBreakdown.build(kin, tf, dirac, coul)


def energy(phi: FieldGrid, kind: DistanceKind, method: str = "fast") -> EnergyBreakdown:
    return energy_terms(phi.values, kind, method=method, box=phi.box)


def el_gradient_values(values: np.ndarray, kind: DistanceKind,
                       potential: np.ndarray | None = None,
                       method: str = "fast", box=None) -> np.ndarray:
    """Unconstrained first variation of E at phi, as a field on the box.

        g(x) = 2 Lap phi(x) + (10/3) phi^{7/3}(x) - (8/3) phi^{5/3}(x)
               + 4 phi(x) Phi(x),   Phi = potential of phi^2.

    Satisfies E(phi + t delta) = E(phi) + t <g, delta> + O(t^2) for
    perturbations supported in the box.
    """
    from .grids import BoxDomain, DensityGrid

    v = np.maximum(values, 0.0)
    if potential is None:
        if box is None:
            box = BoxDomain((0, 0, 0), tuple(n - 1 for n in v.shape))
        dens = DensityGrid(box, v * v)
        potential = potential_fast(dens, kind) if method == "fast" else potential_direct(dens, kind)
    return (2.0 * laplacian_field(v)
            + (10.0 / 3.0) * v ** (7.0 / 3.0)
            - (8.0 / 3.0) * v ** (5.0 / 3.0)
            + 4.0 * v * potential)


def el_gradient(phi: FieldGrid, kind: DistanceKind, method: str = "fast") -> np.ndarray:
    return el_gradient_values(phi.values, kind, method=method, box=phi.box)


def constrained_residual(phi_values: np.ndarray, grad: np.ndarray) -> float:
    """Norm of the gradient projected on the tangent space of {sum phi^2 = m}.

    Zero exactly at constrained critical points, where g is parallel to phi.
    """
    m = float(np.sum(phi_values * phi_values))
    if m <= 0.0:
        raise ValueError("constrained residual needs positive mass")
    lam = float(np.sum(grad * phi_values)) / m
    diff = grad - lam * phi_values
    return float(np.sqrt(np.sum(diff * diff)))
