import pytest

from tfdw_lattice.energy import energy
from tfdw_lattice.grids import centered_box
from tfdw_lattice.lattice import DistanceKind, ball_volume_formula, graph_distance
from tfdw_lattice.spreading import (
    SpreadFamilyParams,
    build_psi,
    cone_coulomb,
    cone_local_terms,
    monotone_decay_holds,
    psi_energy_report,
    seq_a,
    seq_a_direct,
    seq_b,
    seq_b_direct,
    seq_c_bound,
    seq_c_direct,
    seq_d,
    seq_e_bound,
    seq_e_direct,
)

EUCL = DistanceKind.EUCLIDEAN
GRAPH = DistanceKind.GRAPH


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------

def test_sequence_values():
    assert seq_a(1) == 24          # 6 + 18
    assert seq_b(1) == 10          # 1*6 + 4
    assert seq_b(2) == 51          # 4*6 + 1*18 + 9
    assert seq_d(3) == 16


def test_closed_forms_match_direct_sums():
    for n in range(1, 201):
        assert seq_a(n) == seq_a_direct(n)
        assert seq_b(n) == seq_b_direct(n)


def test_sequences_reject_bad_index():
    for fn in (seq_a, seq_b, seq_c_direct, seq_c_bound, seq_e_direct, seq_e_bound, seq_d):
        with pytest.raises(ValueError):
            fn(0)


def test_c_and_e_bounds():
    for n in range(1, 101):
        assert seq_c_direct(n) <= seq_c_bound(n) + 1e-9
        assert seq_e_direct(n) <= seq_e_bound(n) + 1e-9


def test_a_over_b_strictly_decreasing():
    ratios = [seq_a(n) / seq_b(n) for n in range(2, 101)]
    assert all(b < a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < 0.01  # the ratio decays like 1/n^2


# ---------------------------------------------------------------------------
# the cone field
# ---------------------------------------------------------------------------

def test_psi1_structure():
    psi = build_psi(SpreadFamilyParams(1, 10.0))
    assert psi.value_at((0, 0, 0)) == pytest.approx(2.0)  # d = 1
    for q in ((1, 0, 0), (0, -1, 0), (0, 0, 1)):
        assert psi.value_at(q) == pytest.approx(1.0)
    assert psi.value_at((1, 1, 0)) == 0.0
    assert psi.mass == pytest.approx(10.0, rel=1e-14)


def test_psi2_structure():
    psi = build_psi(SpreadFamilyParams(2, 51.0))
    assert psi.value_at((0, 0, 0)) == pytest.approx(3.0)  # b_2 = 51 gives d = 1
    assert psi.value_at((1, 0, 0)) == pytest.approx(2.0)
    assert psi.value_at((1, 1, 0)) == pytest.approx(1.0)
    assert psi.value_at((3, 0, 0)) == 0.0


def test_psi_support_size():
    for n in (1, 2, 5, 9):
        psi = build_psi(SpreadFamilyParams(n, 1.0))
        assert int((psi.values > 0).sum()) == ball_volume_formula(n)


def test_psi_value_profile_matches_definition():
    n = 4
    psi = build_psi(SpreadFamilyParams(n, 3.0))
    d = SpreadFamilyParams(n, 3.0).d
    for p in psi.box.points():
        l = graph_distance(p, (0, 0, 0))
        expect = (n - l + 1) * d if l <= n else 0.0
        assert psi.value_at(p) == pytest.approx(expect, abs=1e-15)


@pytest.mark.parametrize("excess", [0.1, 1.0, 10.0, 100.0])
def test_psi_normalization(excess):
    for n in list(range(1, 11)) + [25, 50]:
        psi = build_psi(SpreadFamilyParams(n, excess))
        assert abs(psi.mass - excess) <= 1e-12 * excess


def test_psi_needs_room():
    with pytest.raises(ValueError):
        build_psi(SpreadFamilyParams(3, 1.0), box=centered_box(3))


def test_params_normalization_identity():
    for n in (1, 2, 17):
        p = SpreadFamilyParams(n, 5.0)
        assert p.d**2 * seq_b(n) == pytest.approx(5.0, rel=1e-14)


# ---------------------------------------------------------------------------
# shell-sum energies against the grid implementation
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("kind", [EUCL, GRAPH])
def test_cone_terms_match_grid_energy(kind):
    for n in (1, 2, 3, 5, 8):
        excess = 7.5
        kin, tf, dirac = cone_local_terms(n, excess)
        coul = cone_coulomb(n, excess, kind)
        grid = energy(build_psi(SpreadFamilyParams(n, excess)), kind, method="direct")
        assert kin == pytest.approx(grid.kinetic, rel=1e-11)
        assert tf == pytest.approx(grid.tf_term, rel=1e-11)
        assert dirac == pytest.approx(grid.dirac_term, rel=1e-11)
        assert coul == pytest.approx(grid.coulomb, rel=1e-10)


def test_kinetic_closed_form_small_n():
    # n=1, d=1: 6 centre edges + 30 shell-exterior edges
    kin, _, _ = cone_local_terms(1, 10.0)
    assert kin == pytest.approx(36.0)


def test_holder_splitting_bound():
    # sum psi^{10/3} <= (d^2 c_n)^{5/3} + ((n+1)^2 d^2)^{5/3}
    for n in range(1, 51):
        params = SpreadFamilyParams(n, 2.0)
        _, tf, _ = cone_local_terms(n, 2.0)
        d2 = params.d ** 2
        bound = (d2 * seq_c_direct(n)) ** (5 / 3) + (seq_d(n) * d2) ** (5 / 3)
        assert tf <= bound * (1 + 1e-12)


def test_kinetic_bound_shape():
    # kinetic(n) <= C * a_{n+1}/b_{n+1} * excess with an edge-count constant:
    # the edge count between consecutive shells approaches 3 per shell
    # vertex; empirically the constant peaks at 3.20009 (n=4) and decays
    # toward 3, pinned at 3.21
    excess = 10.0
    worst = 0.0
    for n in range(1, 101):
        kin, _, _ = cone_local_terms(n, excess)
        worst = max(worst, kin * seq_b(n + 1) / (seq_a(n + 1) * excess))
    assert worst <= 3.21
    kin100, _, _ = cone_local_terms(100, excess)
    assert kin100 * seq_b(101) / (seq_a(101) * excess) == pytest.approx(3.0149, abs=2e-3)


def test_report_columns_and_decay():
    rows = psi_energy_report(40, 10.0, EUCL)
    assert [r["n"] for r in rows] == list(range(1, 41))
    assert monotone_decay_holds(rows, start_n=3)
    # regression pins (first computation, frozen)
    r1 = rows[0]
    assert r1["kinetic"] == pytest.approx(36.0, rel=1e-12)
    assert r1["tf"] == pytest.approx(16.079368399158984, rel=1e-10)
    assert r1["dirac"] == pytest.approx(12.349604207872798, rel=1e-10)
    assert r1["coulomb"] == pytest.approx(67.97056274847714, rel=1e-9)
    assert rows[39]["a_over_b"] == pytest.approx(seq_a(40) / seq_b(40), rel=1e-13)


def test_report_total_at_n100_regression():
    # pinned observed value: the total at n=100, mass 10, is dominated by
    # the slowly decaying coulomb term
    rows = psi_energy_report(100, 10.0, EUCL)
    total = rows[-1]["total"]
    assert total == pytest.approx(2.3157, abs=2e-3)


def test_graph_coulomb_below_euclidean_for_cones():
    for n in (1, 3, 6):
        assert cone_coulomb(n, 4.0, GRAPH) <= cone_coulomb(n, 4.0, EUCL)
