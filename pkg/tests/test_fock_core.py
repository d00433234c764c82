import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from fockphase.errors import DomainError, SchemaError
from fockphase.fock_core import (
    ExpQuadratic,
    FockPolynomial,
    HermiteExpansion,
    ScaledSine,
    ShiftedSine,
    TimeFreqPoint,
    bargmann_quadrature,
    closed_form_from_json,
    closed_form_to_json,
    eval_log_magnitude,
    eval_poly,
    expansion_from_json,
    fock_to_hermite,
    gabor_magnitude,
    gabor_magnitudes,
    hermite_function,
    hermite_to_fock,
    time_signal,
    trim_coeffs,
    validated_hermite_constant,
)

complex_coeff = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


# -- representations -------------------------------------------------------


def test_hermite_to_fock_examples():
    assert np.allclose(hermite_to_fock(HermiteExpansion([1])).coeffs, [1])
    assert np.allclose(hermite_to_fock(HermiteExpansion([0, 1])).coeffs, [0, math.sqrt(math.pi)], rtol=1e-15)
    # (pi^2 / 2!)^(1/2) = pi / sqrt(2)
    assert np.allclose(hermite_to_fock(HermiteExpansion([0, 0, 1])).coeffs, [0, 0, math.pi / math.sqrt(2)], rtol=1e-15)


def test_fock_to_hermite_examples():
    assert np.allclose(fock_to_hermite(FockPolynomial([1])).coeffs, [1])
    assert np.allclose(fock_to_hermite(FockPolynomial([0, math.sqrt(math.pi)])).coeffs, [0, 1], rtol=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.lists(complex_coeff, min_size=1, max_size=9))
def test_hermite_fock_round_trip(coeffs):
    if max(abs(c) for c in coeffs) < 1e-6:
        return
    h = HermiteExpansion(coeffs)
    back = fock_to_hermite(hermite_to_fock(h))
    assert back.degree == h.degree
    scale = np.max(np.abs(h.coeffs))
    assert np.max(np.abs(back.coeffs - h.coeffs)) <= 1e-14 * scale


def test_degree_is_preserved():
    h = HermiteExpansion([1, 0, 2j, 0.5])
    assert hermite_to_fock(h).degree == 3


def test_trailing_coefficients_trimmed():
    assert len(trim_coeffs([1.0, 2.0, 1e-14])) == 2
    assert len(trim_coeffs([1.0, 2.0, 1e-12])) == 3
    assert FockPolynomial([0, 0]).is_zero


def test_json_round_trip():
    p = FockPolynomial([1 + 2j, -0.5, 3j])
    q = expansion_from_json(p.to_json())
    assert isinstance(q, FockPolynomial) and np.array_equal(p.coeffs, q.coeffs)
    h = expansion_from_json({"basis": "hermite", "coeffs": [[1, 0], [0, 2]]})
    assert isinstance(h, HermiteExpansion) and np.array_equal(h.coeffs, [1, 2j])
    with pytest.raises(SchemaError):
        expansion_from_json({"basis": "legendre", "coeffs": [[1, 0]]})
    with pytest.raises(SchemaError):
        expansion_from_json({"coeffs": [1, 2]})


# -- evaluation ------------------------------------------------------------


def test_eval_poly_examples():
    assert eval_poly(FockPolynomial([0, 0, 1]), 2 + 1j) == pytest.approx(3 + 4j)
    assert eval_poly(FockPolynomial([1]), 17.5 - 3j) == 1


def test_eval_poly_against_power_sum():
    rng = np.random.default_rng(11)
    c = rng.normal(size=7) + 1j * rng.normal(size=7)
    p = FockPolynomial(c)
    z = 3 * (rng.normal(size=100) + 1j * rng.normal(size=100))
    naive = np.array([sum(ck * zz**k for k, ck in enumerate(c)) for zz in z])
    assert np.max(np.abs(eval_poly(p, z) - naive) / np.abs(naive)) < 1e-12


def test_compose_affine_matches_direct_evaluation():
    p = FockPolynomial([1, -2j, 0.5, 3])
    a, b = 0.3 - 0.7j, 1.5 + 0.2j
    z = np.linspace(-2, 2, 9) + 0.3j
    assert np.allclose(p.compose_affine(a, b)(z), p(a * z + b), rtol=1e-12)


def test_polynomial_log_abs_large_argument():
    p = FockPolynomial([0, 2.0])
    assert p.log_abs(1e8) == pytest.approx(math.log(1e8) + math.log(2.0), rel=1e-14)
    huge = FockPolynomial([1.0] * 40)
    assert np.isfinite(huge.log_abs(1e300))


# -- Gabor / Bargmann ------------------------------------------------------


def test_gabor_magnitude_gaussian():
    h0 = HermiteExpansion([1])
    assert gabor_magnitude(h0, TimeFreqPoint(0.0, 0.0)) == pytest.approx(1.0, abs=1e-15)
    assert gabor_magnitude(h0, TimeFreqPoint(1.0, 0.0)) == pytest.approx(0.207879576, abs=1e-9)


def _gabor_by_quadrature(f, x, omega):
    # 2^(1/4) int f(t) exp(-pi (t - x)^2) exp(-2 pi i t omega) dt
    def integrand(t, part):
        v = 2**0.25 * f(t) * math.exp(-math.pi * (t - x) ** 2) * np.exp(-2j * math.pi * t * omega)
        return v.real if part == 0 else v.imag

    re = quad(integrand, -12, 12, args=(0,), limit=200, epsabs=1e-13)[0]
    im = quad(integrand, -12, 12, args=(1,), limit=200, epsabs=1e-13)[0]
    return abs(complex(re, im))


@pytest.mark.parametrize("x,omega", [(0.3, -0.4), (1.0, 0.5), (-0.7, 1.2)])
def test_gabor_magnitude_h1_against_time_domain_integral(x, omega):
    h1 = HermiteExpansion([0, 1])
    r2 = x * x + omega * omega
    closed = math.sqrt(math.pi) * math.sqrt(r2) * math.exp(-0.5 * math.pi * r2)
    oracle = _gabor_by_quadrature(lambda t: float(hermite_function(1, t)), x, omega)
    got = gabor_magnitude(h1, (x, omega))
    assert got == pytest.approx(closed, abs=1e-12)
    assert got == pytest.approx(oracle, abs=1e-6)


def test_reflection_convention_is_exact():
    rng = np.random.default_rng(5)
    h = HermiteExpansion(rng.normal(size=5) + 1j * rng.normal(size=5))
    p = hermite_to_fock(h)
    for x, w in rng.uniform(-2, 2, size=(20, 2)):
        want = abs(eval_poly(p, x - 1j * w)) * math.exp(-0.5 * math.pi * (x * x + w * w))
        assert abs(gabor_magnitude(h, (x, w)) - want) <= 1e-14 * max(1.0, want)


def test_time_freq_point_reflection():
    assert TimeFreqPoint(1.5, -2.0).reflected() == 1.5 + 2.0j


def test_unitarity_proxy():
    rng = np.random.default_rng(2)
    step, T = 0.05, 6.0
    g = np.arange(-T, T + step / 2, step)
    X, W = np.meshgrid(g, g)
    for _ in range(3):
        deg = int(rng.integers(0, 7))
        h = HermiteExpansion(rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))
        mags = gabor_magnitudes(h, X, W)
        discrete = math.sqrt(np.sum(mags**2) * step * step)
        assert discrete == pytest.approx(h.norm(), rel=0.01)


def test_quadrature_examples():
    h0 = lambda t: hermite_function(0, t)
    assert abs(bargmann_quadrature(h0, 0) - 1) < 1e-8
    assert abs(bargmann_quadrature(h0, 1 + 1j) - 1) < 1e-8
    h1 = lambda t: hermite_function(1, t)
    for z in (1, 1j, 1 + 1j):
        assert abs(bargmann_quadrature(h1, z) - math.sqrt(math.pi) * z) < 1e-6


def test_quadrature_window():
    with pytest.raises(DomainError):
        bargmann_quadrature(lambda t: hermite_function(0, t), 10.5)


def test_hermite_constant_validates():
    for n in range(8):
        assert validated_hermite_constant(n) == 1.0


def test_hermite_functions_orthonormal():
    # L2 norm of h_n on the real line is 1
    for n in range(6):
        val = quad(lambda t: float(hermite_function(n, t)) ** 2, -10, 10, limit=200)[0]
        assert val == pytest.approx(1.0, abs=1e-10)


def test_time_signal_transforms_to_polynomial():
    h = HermiteExpansion([0.5, 0, -1j, 0.25])
    p = hermite_to_fock(h)
    f = time_signal(h)
    for z in (0.2, -0.5 + 0.7j, 1.1j):
        assert abs(bargmann_quadrature(f, z) - eval_poly(p, z)) < 1e-8


def test_growth_bound_random_points():
    rng = np.random.default_rng(9)
    for _ in range(5):
        c = rng.normal(size=7) + 1j * rng.normal(size=7)
        h = HermiteExpansion(c / np.linalg.norm(c))
        p = hermite_to_fock(h)
        r = 5 * np.sqrt(rng.uniform(size=2000))
        z = r * np.exp(2j * math.pi * rng.uniform(size=2000))
        assert np.all(np.abs(eval_poly(p, z)) <= np.exp(0.5 * math.pi * np.abs(z) ** 2))


# -- closed forms ----------------------------------------------------------


def test_log_magnitude_examples():
    assert eval_log_magnitude(ExpQuadratic(1, 0, 0), 10j) == pytest.approx(-100.0)
    y = 40.0
    assert eval_log_magnitude(ScaledSine(math.pi), 1j * y) == pytest.approx(math.pi * y - math.log(2), rel=1e-14)
    assert eval_log_magnitude(FockPolynomial([0, 1]), 1e8) == pytest.approx(math.log(1e8))


def test_log_magnitude_zero_marker():
    assert eval_log_magnitude(ScaledSine(1.0), 0.0) == -math.inf
    assert eval_log_magnitude(FockPolynomial([0, 1]), 0.0) == -math.inf


@pytest.mark.parametrize(
    "f",
    [
        ShiftedSine(math.pi / 2, math.pi / 4),
        ShiftedSine(-0.8 + 0.3j, 0.2 - 0.1j),
        ScaledSine(2.0),
        ExpQuadratic(0.3 + 0.1j, -1j, 0.5),
        FockPolynomial([1, -2, 0.5j, 3]),
    ],
)
def test_log_magnitude_agrees_with_direct(f):
    rng = np.random.default_rng(3)
    z = 30 * (rng.uniform(-1, 1, 400) + 1j * rng.uniform(-1, 1, 400))
    z = z[np.abs(z) <= 30]
    direct = np.abs(f(z))
    ok = (direct >= 1e-300) & (direct <= 1e300)
    assert np.max(np.abs(eval_log_magnitude(f, z[ok]) - np.log(direct[ok]))) < 1e-10


def test_sine_log_magnitude_far_off_axis():
    f = ScaledSine(1.0)
    # |sin(x + i y)| ~ e^y / 2 for large y, beyond where direct evaluation overflows
    assert eval_log_magnitude(f, 0.3 + 800j) == pytest.approx(800 - math.log(2), rel=1e-15)


def test_shifted_sine_rotation():
    f = ShiftedSine(1.3, 0.4)
    g = f.rotated(0.7, 1 - 2j)
    z = np.array([0.5 + 0.1j, -1.2 + 3j])
    assert np.allclose(g(z), f(np.exp(-0.7j) * (z - (1 - 2j))))
    assert g.exponential_type == pytest.approx(1.3)


def test_types_per_variant():
    assert ExpQuadratic(math.pi, 0, 0).order2_type == pytest.approx(math.pi)
    assert ScaledSine(2.0).exponential_type == 2.0
    assert FockPolynomial([1, 2]).exponential_type == 0


def test_closed_form_json_round_trip():
    for f in (ShiftedSine(1.5, 0.25), ScaledSine(2.0), ExpQuadratic(1j, 2, -1), FockPolynomial([1, 2j])):
        g = closed_form_from_json(closed_form_to_json(f))
        z = 0.3 - 0.2j
        assert g(z) == pytest.approx(f(z))
    with pytest.raises(SchemaError):
        closed_form_from_json({"kind": "bessel"})
