import io
import math

import numpy as np
import pytest

from tfdw_lattice.energy import (
    EnergyBreakdown,
    F_MINIMIZER,
    F_MINIMUM,
    F_local,
    PHI_CAP,
    constrained_residual,
    el_gradient,
    el_gradient_values,
    energy,
    energy_terms,
)
from tfdw_lattice.grids import (
    BoxDomain,
    FieldGrid,
    centered_box,
    field_from_points,
    read_field,
    write_field,
)
from tfdw_lattice.lattice import DistanceKind
from tfdw_lattice.spreading import SpreadFamilyParams, build_psi

EUCL = DistanceKind.EUCLIDEAN
GRAPH = DistanceKind.GRAPH


# ---------------------------------------------------------------------------
# the local nonlinearity
# ---------------------------------------------------------------------------

def test_F_roots():
    assert F_local(0.0) == 0.0
    assert F_local(1.0) == pytest.approx(0.0, abs=1e-15)


def test_F_minimum():
    assert F_MINIMIZER == pytest.approx(0.512)
    assert F_local(F_MINIMIZER) == pytest.approx(F_MINIMUM)
    assert F_MINIMUM == pytest.approx(-0.08192)
    # 1-d grid search oracle
    s = np.linspace(0.0, 3.0, 30001)
    vals = F_local(s)
    i = int(np.argmin(vals))
    assert s[i] == pytest.approx(F_MINIMIZER, abs=1e-3)
    assert vals[i] >= F_MINIMUM - 1e-12


def test_F_at_two():
    assert F_local(2.0) == pytest.approx(2 ** (5 / 3) - 2 ** (4 / 3))
    assert F_local(2.0) == pytest.approx(0.6549600041, abs=1e-9)


def test_F_rejects_negative():
    with pytest.raises(ValueError):
        F_local(-0.1)
    with pytest.raises(ValueError):
        F_local(np.array([0.2, -0.3]))


def test_F_bounds_on_unit_interval():
    # -s <= F(s) <= 0 on [0, 1], and F >= F_MINIMUM everywhere
    s = np.linspace(0.0, 1.0, 2001)
    vals = F_local(s)
    assert np.all(vals <= 1e-15)
    assert np.all(vals >= -s - 1e-15)
    s2 = np.linspace(0.0, 10.0, 2001)
    assert np.all(F_local(s2) >= F_MINIMUM - 1e-12)


# ---------------------------------------------------------------------------
# energy breakdowns
# ---------------------------------------------------------------------------

def test_zero_field_zero_energy():
    box = centered_box(2)
    bd = energy(FieldGrid(box, np.zeros(box.dims)), EUCL)
    assert bd == EnergyBreakdown(0.0, 0.0, 0.0, 0.0, 0.0)


def test_single_site_breakdown():
    # unit value at the origin: 6 edges of difference 1, no pair term
    box = centered_box(2)
    phi = field_from_points(box, {(0, 0, 0): 1.0})
    bd = energy(phi, EUCL)
    assert bd.kinetic == pytest.approx(6.0)
    assert bd.tf_term == pytest.approx(1.0)
    assert bd.dirac_term == pytest.approx(1.0)
    assert bd.coulomb == 0.0
    assert bd.total == pytest.approx(6.0)


def test_psi1_kinetic():
    # cone n=1 at excess mass 10 has d=1: 6 centre-shell edges and 30
    # shell-exterior edges, all with difference 1
    psi = build_psi(SpreadFamilyParams(1, 10.0))
    bd = energy(psi, EUCL)
    assert bd.kinetic == pytest.approx(36.0)


def test_total_is_sum_of_terms():
    rng = np.random.default_rng(0)
    box = centered_box(3)
    phi = FieldGrid(box, rng.random(box.dims))
    bd = energy(phi, EUCL)
    assert bd.total == bd.kinetic + bd.tf_term - bd.dirac_term + bd.coulomb
    assert bd.kinetic >= 0 and bd.tf_term >= 0 and bd.dirac_term >= 0 and bd.coulomb >= 0


# ---------------------------------------------------------------------------
# the Euler-Lagrange gradient against finite differences
# ---------------------------------------------------------------------------

def _fd_directional(values, delta, kind, t=1e-5):
    box = BoxDomain((0, 0, 0), tuple(n - 1 for n in values.shape))
    ep = energy_terms(values + t * delta, kind, method="direct", box=box).total
    em = energy_terms(values - t * delta, kind, method="direct", box=box).total
    return (ep - em) / (2 * t)


def test_gradient_zero_field():
    box = centered_box(2)
    g = el_gradient(FieldGrid(box, np.zeros(box.dims)), EUCL)
    assert np.all(g == 0.0)


def test_gradient_single_site():
    # g(0) = 12 c + (10/3) c^{7/3} - (8/3) c^{5/3} for phi = c delta_0
    box = centered_box(2)
    for c in (0.3, 1.0, 2.0):
        phi = field_from_points(box, {(0, 0, 0): c})
        g = el_gradient(phi, EUCL, method="direct")
        expected = 12 * c + (10 / 3) * c ** (7 / 3) - (8 / 3) * c ** (5 / 3)
        assert g[box.index((0, 0, 0))] == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("kind", [EUCL, GRAPH])
def test_gradient_matches_finite_differences(kind):
    rng = np.random.default_rng(5)
    dims = (6, 6, 6)
    box = BoxDomain((0, 0, 0), (5, 5, 5))
    for _ in range(25):
        values = 0.2 + rng.random(dims)  # bounded away from 0: powers stay smooth
        delta = rng.standard_normal(dims)
        g = el_gradient_values(values, kind, method="direct", box=box)
        analytic = float((g * delta).sum())
        fd = _fd_directional(values, delta, kind)
        assert analytic == pytest.approx(fd, rel=1e-6)


def test_scaling_identity():
    # E(sqrt(theta) phi) splits with factors theta, theta^{5/3}, theta^{4/3}, theta^2
    rng = np.random.default_rng(6)
    box = centered_box(3)
    phi = FieldGrid(box, rng.random(box.dims))
    base = energy(phi, EUCL)
    for theta in (0.5, 2.0, 3.0):
        scaled = energy(FieldGrid(box, math.sqrt(theta) * phi.values), EUCL)
        assert scaled.kinetic == pytest.approx(theta * base.kinetic, rel=1e-11)
        assert scaled.tf_term == pytest.approx(theta ** (5 / 3) * base.tf_term, rel=1e-11)
        assert scaled.dirac_term == pytest.approx(theta ** (4 / 3) * base.dirac_term, rel=1e-11)
        assert scaled.coulomb == pytest.approx(theta**2 * base.coulomb, rel=1e-11)


def _fsum_terms(values, box, kind):
    """Order-independent (exactly rounded) energy terms for small supports."""
    phi = FieldGrid(box, values)
    pts = [p for p in box.points() if phi.value_at(p) > 0]
    from tfdw_lattice.lattice import neighbors

    edge_terms = []
    for p in pts:
        for q in neighbors(p):
            vq = phi.value_at(q)
            if box.contains(q) and q > p and vq > 0:
                edge_terms.append((vq - phi.value_at(p)) ** 2)
            elif vq == 0.0:
                edge_terms.append(phi.value_at(p) ** 2)
    pair_terms = [
        phi.value_at(p) ** 2 * phi.value_at(q) ** 2 / kind.distance(p, q)
        for p in pts for q in pts if p != q]
    return (
        math.fsum(edge_terms),
        math.fsum(phi.value_at(p) ** (10 / 3) for p in pts),
        math.fsum(phi.value_at(p) ** (8 / 3) for p in pts),
        math.fsum(pair_terms),
    )


def test_translation_invariance_exact():
    # a translated field has the identical multiset of summands in every
    # term, so exactly rounded sums agree bitwise
    rng = np.random.default_rng(7)
    small = rng.random((3, 3, 3))
    box = BoxDomain((0, 0, 0), (9, 9, 9))
    a = np.zeros(box.dims)
    a[1:4, 1:4, 1:4] = small
    b = np.zeros(box.dims)
    b[5:8, 4:7, 6:9] = small
    for kind in (EUCL, GRAPH):
        oa = _fsum_terms(a, box, kind)
        ob = _fsum_terms(b, box, kind)
        assert oa == ob  # bitwise
        ea = energy_terms(a, kind, method="direct", box=box)
        eb = energy_terms(b, kind, method="direct", box=box)
        for prod, oracle in zip((ea.kinetic, ea.tf_term, ea.dirac_term, ea.coulomb), oa):
            assert prod == pytest.approx(oracle, rel=1e-12)
        for ta, tb in zip((ea.kinetic, ea.tf_term, ea.dirac_term, ea.coulomb),
                          (eb.kinetic, eb.tf_term, eb.dirac_term, eb.coulomb)):
            assert ta == pytest.approx(tb, rel=1e-12)


def _apply_signed_permutation(values, perm, signs):
    out = np.transpose(values, perm)
    for axis, s in enumerate(signs):
        if s < 0:
            out = np.flip(out, axis=axis)
    return out


def test_octahedral_invariance():
    # all 48 signed permutations of the axes preserve every energy term
    rng = np.random.default_rng(8)
    box = centered_box(2)
    phi = rng.random(box.dims)
    base = energy_terms(phi, EUCL, method="direct", box=box)
    from itertools import permutations, product

    count = 0
    for perm in permutations(range(3)):
        for signs in product((1, -1), repeat=3):
            other = _apply_signed_permutation(phi, perm, signs)
            bd = energy_terms(other, EUCL, method="direct", box=box)
            assert bd.kinetic == pytest.approx(base.kinetic, rel=1e-12)
            assert bd.tf_term == pytest.approx(base.tf_term, rel=1e-12)
            assert bd.dirac_term == pytest.approx(base.dirac_term, rel=1e-12)
            assert bd.coulomb == pytest.approx(base.coulomb, rel=1e-12)
            count += 1
    assert count == 48


# ---------------------------------------------------------------------------
# constrained residual
# ---------------------------------------------------------------------------

def test_residual_zero_for_parallel_gradient():
    rng = np.random.default_rng(9)
    v = rng.random((4, 4, 4)) + 0.1
    for lam in (-2.0, 0.0, 3.5):
        assert constrained_residual(v, lam * v) == pytest.approx(0.0, abs=1e-12)


def test_residual_orthogonal_gradient():
    rng = np.random.default_rng(10)
    v = rng.random((4, 4, 4)) + 0.1
    g = rng.standard_normal(v.shape)
    g -= (np.sum(g * v) / np.sum(v * v)) * v  # make <g, v> = 0
    assert constrained_residual(v, g) == pytest.approx(float(np.sqrt((g * g).sum())), rel=1e-12)


def test_residual_needs_mass():
    with pytest.raises(ValueError):
        constrained_residual(np.zeros((2, 2, 2)), np.ones((2, 2, 2)))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_field_round_trip():
    rng = np.random.default_rng(11)
    box = BoxDomain((-2, 0, 5), (1, 3, 7))
    phi = FieldGrid(box, rng.random(box.dims))
    buf = io.StringIO()
    write_field(buf, phi, GRAPH)
    buf.seek(0)
    loaded, kind = read_field(buf)
    assert kind is GRAPH
    assert loaded.box == phi.box
    assert np.array_equal(loaded.values, phi.values)  # full round-trip precision
    assert loaded.mass == phi.mass


def test_field_format_layout():
    box = BoxDomain((0, 0, 0), (1, 0, 0))
    phi = FieldGrid(box, np.array([[[0.5]], [[0.25]]]))
    buf = io.StringIO()
    write_field(buf, phi, EUCL)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "TFDW-FIELD 1"
    assert lines[1] == "lo: 0 0 0"
    assert lines[2] == "dims: 2 1 1"
    assert lines[3] == "kind: euclidean"
    assert lines[4:] == ["0.5", "0.25"]


def test_field_rejects_negative_values():
    box = centered_box(1)
    vals = np.zeros(box.dims)
    vals[0, 0, 0] = -0.5
    with pytest.raises(ValueError):
        FieldGrid(box, vals)


def test_phi_cap_constant():
    assert PHI_CAP == pytest.approx((4 / 5) ** 1.5)
    assert PHI_CAP == pytest.approx(0.7155417527999327)
