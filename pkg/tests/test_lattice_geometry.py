import cmath
import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockphase.errors import DegenerateLatticeError, InsufficientCoverageError, TooFewPointsError
from fockphase.lattice_geometry import (
    PointSet,
    ShiftedLattice,
    StructuredSet,
    canonical_progressions,
    check_lattice_conditions,
    covolume,
    enumerate_points,
    estimate_lower_density,
    exact_lower_density,
    separation,
)


def brute_count(L, R):
    """Lattice points in |z| <= R by a generous double loop."""
    A = covolume(L)
    span = int(R * (abs(L.omega1) + abs(L.omega2)) / A) + 3
    m, n = np.meshgrid(np.arange(-span, span + 1), np.arange(-span, span + 1))
    z = L.z0 + m * L.omega1 + n * L.omega2
    return int(np.sum(np.abs(z) <= R * (1 + 1e-12)))


def brute_separation(pts):
    return min(abs(a - b) for a, b in combinations(pts, 2))


def test_covolume_examples():
    assert covolume(ShiftedLattice(0, 1, 1j)) == 1
    assert covolume(ShiftedLattice.square(0.9)) == pytest.approx(0.81)
    assert covolume(ShiftedLattice(0, 2, 1 + 1j)) == pytest.approx(2)


@pytest.mark.parametrize(
    "op",
    [covolume, exact_lower_density, lambda L: check_lattice_conditions(L, 0, 0),
     canonical_progressions, lambda L: enumerate_points(L, 3)],
)
def test_degenerate_lattice_rejected(op):
    with pytest.raises(DegenerateLatticeError):
        op(ShiftedLattice(0, 1, 2))


def test_exact_density_examples():
    assert exact_lower_density(ShiftedLattice(0, 1, 1j)) == 1
    assert exact_lower_density(ShiftedLattice.square(0.9)) == pytest.approx(1.2345679, rel=1e-7)
    assert exact_lower_density(ShiftedLattice(0, 2, 1 + 1j)) == pytest.approx(0.5)


def test_check_conditions_examples():
    r = check_lattice_conditions(ShiftedLattice.square(0.9), math.pi / 2, 0.0)
    assert r.density_ok and r.spacing_ok and r.distance_ok and r.verdict
    kappa = 1.3
    r = check_lattice_conditions(ShiftedLattice(0, 0.2 + 1j, math.pi / (2 * kappa)), 0.0, kappa)
    assert not r.spacing_ok and not r.verdict
    r = check_lattice_conditions(ShiftedLattice(0, 1j, 1.0), 0.3, 0.0)
    assert r.verdict


def test_thresholds_are_strict():
    # covolume exactly pi / (2 tau)
    tau = math.pi / 2
    r = check_lattice_conditions(ShiftedLattice(0, 1j, 1.0), tau, 0.0)
    assert not r.density_ok


@st.composite
def lattices(draw):
    r1 = draw(st.floats(0.2, 3))
    r2 = draw(st.floats(0.2, 3))
    a1 = draw(st.floats(0, 2 * math.pi))
    gap = draw(st.floats(0.3, math.pi - 0.3))
    z0 = complex(draw(st.floats(-5, 5)), draw(st.floats(-5, 5)))
    return ShiftedLattice(z0, r1 * cmath.exp(1j * (a1 + gap)), r2 * cmath.exp(1j * a1))


@settings(max_examples=60, deadline=None)
@given(lattices(), st.floats(0, 2), st.floats(0, 2), st.floats(-3, 3), st.floats(-3, 3))
def test_conditions_invariant_under_rigid_motion(L, tau, kappa, phi, shift):
    base = check_lattice_conditions(L, tau, kappa)
    moved = check_lattice_conditions(L.rotated(phi).translated(complex(shift, -shift)), tau, kappa)
    # compare away from the strict thresholds, where rounding could flip a bit
    def far(x, t):
        return t == math.inf or abs(x - t) > 1e-9 * max(1.0, t)

    if far(base.covolume, math.pi / (2 * tau) if tau else math.inf) and far(
        base.spacing, math.pi / (2 * kappa) if kappa else math.inf
    ) and far(base.line_distance, math.pi / (2 * kappa) if kappa else math.inf):
        assert base.verdict == moved.verdict


@settings(max_examples=60, deadline=None)
@given(lattices(), st.floats(0, 3), st.floats(0, 3))
def test_increasing_kappa_is_monotone(L, k1, k2):
    lo, hi = sorted((k1, k2))
    a, b = check_lattice_conditions(L, 0, lo), check_lattice_conditions(L, 0, hi)
    assert b.spacing_ok <= a.spacing_ok
    assert b.distance_ok <= a.distance_ok


def test_verdict_is_conjunction():
    r = check_lattice_conditions(ShiftedLattice(0, 2j, 0.5), 0.5, 1.0)
    assert r.verdict == (r.density_ok and r.spacing_ok and r.distance_ok)
    assert r.to_json()["verdict"] == r.verdict


# -- progressions ----------------------------------------------------------


def test_canonical_progressions_unit_lattice():
    S = canonical_progressions(ShiftedLattice(0, 1, 1j))
    assert S.rho1 == S.rho2 == 1
    assert S.theta == pytest.approx(math.pi / 2)
    assert S.line_distance == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(S.progression(1).real, 0) and np.allclose(S.progression(2).real, 1)


def test_canonical_progressions_slanted():
    S = canonical_progressions(ShiftedLattice(0, 1 + 1j, 1))
    assert S.theta == 0 and S.z2 == 1 + 1j
    assert S.line_distance == pytest.approx(1.0, abs=1e-14)


def test_canonical_progressions_translation():
    a = canonical_progressions(ShiftedLattice(0, 1 + 1j, 1))
    b = canonical_progressions(ShiftedLattice(5j, 1 + 1j, 1))
    assert b.z1 == a.z1 + 5j and b.z2 == a.z2 + 5j
    assert b.line_distance == a.line_distance


@settings(max_examples=40, deadline=None)
@given(lattices())
def test_progressions_lie_in_lattice(L):
    S = canonical_progressions(L, truncation=6)
    assert S.line_distance == pytest.approx(covolume(L) / abs(L.omega2), rel=1e-14)
    R = float(np.max(np.abs(S.points()))) + 1
    lattice = enumerate_points(L, R).points
    for z in S.points():
        assert np.min(np.abs(lattice - z)) <= 1e-12 * max(1.0, abs(z))


def test_filler_points_are_lattice_points():
    L = ShiftedLattice(0.3, 0.5 + 1j, 1.2)
    S = canonical_progressions(L, truncation=4, filler_radius=3.0)
    assert len(S.extra) > 0
    lattice = enumerate_points(L, 10).points
    for z in S.extra:
        assert np.min(np.abs(lattice - z)) < 1e-12
    assert separation(S.as_point_set()) > 0


def test_structured_set_normalisation():
    S = StructuredSet(1 + 1j, 2 + 3j, 0.4, 0.5, 0.7, truncation=3)
    w = S.to_normalized(S.progression(1))
    assert np.allclose(w.imag, 0, atol=1e-14)
    w2 = S.to_normalized(S.progression(2))
    assert np.allclose(w2.imag, S.line_distance, atol=1e-13)
    assert np.allclose(S.from_normalized(w2), S.progression(2))


def test_structured_set_rejects_coincident_lines():
    with pytest.raises(ValueError):
        StructuredSet(0, 2.0, 0.0, 1.0, 1.0)


def test_structured_set_json_round_trip():
    S = StructuredSet(1j, 2 + 1.5j, 0.1, 0.5, 0.6, extra=(3 + 3j,), truncation=7)
    T = StructuredSet.from_json(S.to_json())
    assert np.allclose(S.points(), T.points())


# -- enumeration -----------------------------------------------------------


def test_enumerate_unit_lattice_small():
    pts = enumerate_points(ShiftedLattice(0, 1, 1j), 1.5).points
    assert len(pts) == 9


@pytest.mark.parametrize("L,R", [(ShiftedLattice(0, 1, 1j), 20), (ShiftedLattice.square(0.5), 10),
                                 (ShiftedLattice(0.3 - 0.2j, 0.7 + 1.1j, 1.3), 15)])
def test_enumerate_matches_brute_force(L, R):
    assert len(enumerate_points(L, R)) == brute_count(L, R)


def test_enumerate_gauss_circle():
    R = 40
    n = len(enumerate_points(ShiftedLattice.square(0.5), R))
    assert abs(n - 4 * math.pi * R * R) < 4 * 2 * math.pi * R * 2


# -- separation ------------------------------------------------------------


def test_separation_examples():
    assert separation(enumerate_points(ShiftedLattice(0, 1, 1j), 5)) == pytest.approx(1.0)
    pts = [0, 3, 3.5 + 0.1j]
    assert separation(PointSet(pts)) == pytest.approx(brute_separation(pts), rel=1e-15)
    assert separation(PointSet(pts)) == pytest.approx(0.5099, abs=1e-4)
    assert separation(enumerate_points(ShiftedLattice(0, 0.7j, 0.5), 5)) == pytest.approx(0.5)


def test_separation_too_few_points():
    with pytest.raises(TooFewPointsError):
        separation(PointSet([1 + 1j]))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False), min_size=2, max_size=40, unique=True))
def test_separation_matches_brute_force(pts):
    if brute_separation(pts) == 0:
        return
    assert separation(PointSet(pts)) == pytest.approx(brute_separation(pts), rel=1e-12)


def test_point_set_csv_round_trip():
    P = PointSet([1 + 2j, -0.5 + 0.25j])
    assert np.array_equal(PointSet.from_csv(P.to_csv()).points, P.points)


# -- density ---------------------------------------------------------------


@pytest.mark.parametrize("L", [ShiftedLattice(0, 1j, 1), ShiftedLattice(0, 1 + 1j, 2)])
def test_density_estimate_matches_exact(L):
    P = enumerate_points(L, 300)
    est = estimate_lower_density(P, [50, 100, 200], 0.25)
    assert est == pytest.approx(exact_lower_density(L), rel=0.05)


def test_density_single_point():
    # translates must be able to move the window off the point
    est = estimate_lower_density(PointSet([0j]), [10], 0.5, scan_extent=30, check_coverage=False)
    assert est == 0


def test_density_coverage_error():
    P = enumerate_points(ShiftedLattice(0, 1j, 1), 20)
    with pytest.raises(InsufficientCoverageError):
        estimate_lower_density(P, [50], 0.25)


def test_density_refinement_bound():
    P = enumerate_points(ShiftedLattice(0.1, 0.6 + 0.9j, 1.1), 120)
    r = 60.0
    coarse = estimate_lower_density(P, [r], 0.5)
    fine = estimate_lower_density(P, [r], 0.1)
    assert fine <= coarse + 4 * r * 0.5 / r**2
