import json
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuchsian_affine.cocycle import (
    EvenRankError,
    SeriesDivergenceWarning,
    WeightMismatchError,
    affine_holonomy,
    affine_transport,
    beta,
    closedness_residual,
    f_observable,
    f_values,
    generator_translations,
    geodesic_sign_survey,
    margulis_direct,
    margulis_via_integral,
    monte_carlo_mean,
    neutral_coefficients,
    neutral_eta,
    neutral_section,
    phi_map,
    poincare_qdiff,
    reports_to_csv,
    reports_to_json,
    sample_unit_tangents,
    zero_form,
    zero_qdiff,
)
from fuchsian_affine.flatbundle import (
    PathTransport,
    SectionCoords,
    bundle_metric,
    dim,
    parallel_transport,
    rk4_transport,
)
from fuchsian_affine.fuchsian import (
    evaluate,
    genus2_group,
    random_reduced_word,
    schottky_group,
    trivial_group,
)
from fuchsian_affine.halfplane import UnitTangent, distance, geodesic, geodesic_square, moebius_act
from fuchsian_affine.margulis import HolonomyModel, cocycle_extend, margulis_invariant

SEED = 0.3 + 0.2j


@pytest.fixture(scope="module")
def g2():
    return genus2_group()


@pytest.fixture(scope="module")
def omega4(g2):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SeriesDivergenceWarning)
        return poincare_qdiff(g2, 2, 1, 4, SEED)


@pytest.fixture(scope="module")
def schottky_alpha():
    grp = schottky_group(2.0, 1.0)
    return grp, phi_map(poincare_qdiff(grp, 2, 1, 8, SEED), 1)


def test_trivial_group_seed():
    om = poincare_qdiff(trivial_group(), 2, 0, 3)
    w = np.array([0, 0.3 + 0.1j, -0.5j])
    assert np.allclose(om.disk_value(w), 1.0)
    om1 = poincare_qdiff(trivial_group(), 3, 2, 3, 0.1j)
    assert np.allclose(om1.disk_value(w), (w - 0.1j) ** 2)


def test_genus2_truncation_converges(g2):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SeriesDivergenceWarning)
        om = poincare_qdiff(g2, 2, 0, 6)
    r4 = om.equivariance_residual(1j, 4)
    r6 = om.equivariance_residual(1j, 6)
    assert r6 <= r4 / 2


def test_schottky_equivariance():
    grp = schottky_group(2.0, 1.0)
    om = poincare_qdiff(grp, 2, 1, 8, SEED)
    for z in (1j, 0.3 + 1.2j, -0.4 + 0.8j, 0.5 + 0.6j):
        assert om.equivariance_residual(z) <= 1e-3


def test_automorphic_evaluation_is_equivariant(omega4, g2, rng):
    z = rng.normal(scale=0.5, size=20) + 1j * rng.uniform(0.5, 2, size=20)
    for x in (1, -2, 3):
        g = g2.letter(x)
        lhs = omega4.automorphic(moebius_act(g, z)) * g.derivative(z) ** 2
        assert np.allclose(lhs, omega4.automorphic(z), rtol=1e-9)


def test_series_is_holomorphic(omega4):
    for z in (1j, 0.2 + 0.7j):
        assert omega4.cr_residual(z) <= 1e-6


def test_weight_checks(omega4):
    with pytest.raises(WeightMismatchError):
        phi_map(omega4, 2)
    om3 = poincare_qdiff(trivial_group(), 3, 0, 1)
    with pytest.raises(WeightMismatchError):
        f_observable(om3, UnitTangent(1j, 1.0))
    with pytest.raises(ValueError):
        poincare_qdiff(trivial_group(), 1, 0, 1)


def test_zero_differential(g2):
    om = zero_qdiff(g2, 2)
    al = phi_map(om, 1)
    assert np.array_equal(al(np.array([1j, 0.5 + 2j]), 1.0), np.zeros((2, 3)))
    assert f_observable(om, UnitTangent(1j, 1.0)) == 0
    res = geodesic_sign_survey(g2, om, 1, 1, with_mu=False)
    assert all(r.integral_f == 0 for r in res.reports)
    assert margulis_via_integral((1,), g2, al) == 0


@given(st.floats(-2, 2), st.floats(-2, 2), st.complex_numbers(max_magnitude=2), st.complex_numbers(max_magnitude=2))
@settings(max_examples=25)
def test_phi_map_real_linear(a, b, X, Y):
    grp = schottky_group(2.0, 1.0)
    al = phi_map(poincare_qdiff(grp, 2, 1, 3, SEED, check=False), 1, automorphic=False)
    z = 0.2 + 1.1j
    lhs = al(z, a * X + b * Y)
    rhs = a * al(z, X) + b * al(z, Y)
    assert np.abs(lhs - rhs).max() <= 1e-12 * max(1, np.abs(rhs).max())


def test_phi_map_slot(omega4):
    al = phi_map(omega4, 1, automorphic=False)
    z = 0.1 + 0.9j
    v = al(z, 1.0)
    want = np.conj(omega4(z) * z.imag)
    assert v[0] == 0 and abs(complex(v[1], v[2]) - want) < 1e-14 * abs(want)


def test_closedness(omega4):
    al = phi_map(omega4, 1, automorphic=False)
    r1 = closedness_residual(al, 1j, 1e-3)
    r2 = closedness_residual(al, 1j, 5e-4)
    assert r1 <= 1e-4
    assert r1 / r2 >= 3.5  # second order: ratio 4


def test_closedness_detects_non_closed_form():
    # a constant L_1 section in the unit frame is not closed
    from fuchsian_affine.cocycle import BundleOneForm

    bad = BundleOneForm(1, lambda z, dz: np.column_stack([np.zeros(len(z)), dz.real, dz.imag]), closed=False)
    assert closedness_residual(bad, 1j) > 0.1


def test_affine_transport_zero_form(rng):
    c = geodesic(0.2 + 1j, -0.6 + 1.8j)
    for n in (1, 3):
        V = SectionCoords.from_vector(rng.normal(size=dim(n)))
        lam, W = affine_transport(zero_form(n), c, 1.0, V)
        assert lam == 1.0
        ref = parallel_transport(n, PathTransport(c, 1e-3), V)
        assert np.allclose(W.to_vector(), ref.to_vector(), rtol=0, atol=1e-12)


def test_affine_transport_linear_part(omega4, rng):
    al = phi_map(omega4, 1)
    c = geodesic(0.2 + 1j, -0.6 + 1.8j)
    V = SectionCoords.from_vector(rng.normal(size=3))
    _, W0 = affine_transport(al, c, 0.0, V)
    assert np.allclose(W0.to_vector(), rk4_transport(1, c) @ V.to_vector(), atol=1e-13)
    # affine in (lam, V)
    _, W1 = affine_transport(al, c, 1.0, SectionCoords.zero(1))
    _, W = affine_transport(al, c, 1.0, V)
    assert np.allclose(W.to_vector(), W0.to_vector() + W1.to_vector(), atol=1e-12)


def test_contractible_loop_defect(omega4):
    al = phi_map(omega4, 1, automorphic=False)
    loop = geodesic_square(0.1 + 1.1j, 0.5)
    _, W = affine_transport(al, loop, 1.0, SectionCoords.zero(1))
    assert np.linalg.norm(W.to_vector()) <= 1e-5


def test_affine_holonomy_zero_form():
    grp = schottky_group(2.0, 1.0)
    phi = affine_holonomy((1, -2), grp, zero_form(2))
    assert np.array_equal(phi.translation, np.zeros(5))
    assert np.allclose(phi.linear, HolonomyModel(2).matrix(evaluate((1, -2), grp)))


def test_affine_holonomy_homomorphism(schottky_alpha, rng):
    grp, al = schottky_alpha
    for _ in range(20):
        u = random_reduced_word(rng, 2, int(rng.integers(1, 4)))
        v = random_reduced_word(rng, 2, int(rng.integers(1, 4)))
        pu, pv, puv = (affine_holonomy(w, grp, al) for w in (u, v, u + v))
        want = pu.translation + pu.linear @ pv.translation
        assert np.linalg.norm(puv.translation - want) <= 1e-5 * max(1, np.linalg.norm(want))


def test_affine_holonomy_matches_cocycle_extend(schottky_alpha):
    grp, al = schottky_alpha
    tr = generator_translations(grp, al)
    model = HolonomyModel(1)
    for w in [(1, 2), (2, -1, -1), (1, 2, -1, 2)]:
        a = affine_holonomy(w, grp, al)
        b = cocycle_extend(grp, model, tr, w)
        assert np.linalg.norm(a.translation - b.translation) <= 1e-5 * max(1, np.linalg.norm(b.translation))


def test_affine_holonomy_rk4_matches_exact(schottky_alpha):
    grp, al = schottky_alpha
    a = affine_holonomy((1,), grp, al)
    b = affine_holonomy((1,), grp, al, method="rk4", step=1e-3)
    assert np.linalg.norm(a.translation - b.translation) <= 1e-8 * max(1, np.linalg.norm(a.translation))


def test_neutral_coefficient_examples():
    assert np.array_equal(neutral_coefficients(1), [1.0])
    b = neutral_coefficients(3)
    assert abs(b[1] + 4 / 3) < 1e-15
    assert neutral_coefficients(3, "printed-product")[1] == 0
    with pytest.raises(EvenRankError):
        neutral_coefficients(2)


def test_neutral_section_p0():
    # in the frame where c' = 1 the section is (0, i)
    assert np.array_equal(neutral_eta(1), [0.0, 0.0, 1.0])
    # the vertical geodesic has unit-frame velocity i, so w_c = i * i
    c = geodesic(1j, 3j)
    w = neutral_section(c, 1)
    assert w.c0 == 0 and abs(w.ck[0] + 1) < 1e-15
    assert abs(bundle_metric(w, w) - 1) < 1e-15


def _drift(n, rule, c):
    w0 = neutral_section(c, n, 0.0, rule, normalize=False).to_vector()
    w1 = neutral_section(c, n, c.hyperbolic_length, rule, normalize=False).to_vector()
    P = rk4_transport(n, c, 1e-3)
    return np.linalg.norm(P @ w0 - w1)


@pytest.mark.parametrize("p", [0, 1, 2])
def test_neutral_section_parallel(p):
    n = 2 * p + 1
    c = geodesic(0.3 + 1j, 0.3 + np.e * 1j)
    for cc in (c, geodesic(-0.5 + 0.8j, 0.7 + 1.1j)):
        seg = geodesic(cc.start, cc.point(min(1.0, cc.hyperbolic_length)))
        assert _drift(n, "recurrence", seg) <= 1e-8
    w = neutral_section(c, n)
    assert bundle_metric(w, w) > 0


@pytest.mark.parametrize("p", [1, 2])
def test_printed_product_not_parallel(p):
    c = geodesic(0.3 + 1j, 0.3 + np.e * 1j)
    assert _drift(2 * p + 1, "printed-product", c) > 1e-2


def test_integral_formula_short_words(omega4, g2):
    al = phi_map(omega4, 1)
    for w in [(1,), (2, -3)]:
        direct = margulis_direct(w, g2, al)
        integral = margulis_via_integral(w, g2, al, nodes_per_unit=400)
        assert abs(direct - integral) <= 1e-3


def test_integral_linear_in_alpha(g2, omega4):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SeriesDivergenceWarning)
        other = poincare_qdiff(g2, 2, 0, 4)
    a1, a2 = phi_map(omega4, 1), phi_map(other, 1)
    for w in [(1,), (1, 2)]:
        s = margulis_via_integral(w, g2, a1 + a2, nodes_per_unit=200)
        t = margulis_via_integral(w, g2, a1, nodes_per_unit=200) + margulis_via_integral(w, g2, a2, nodes_per_unit=200)
        assert abs(s - t) <= 1e-8


def test_integral_offset_independent(omega4, g2):
    al = phi_map(omega4, 1)
    a = margulis_via_integral((1, 2), g2, al, nodes_per_unit=400)
    b = margulis_via_integral((1, 2), g2, al, offset=0.77, nodes_per_unit=400)
    assert abs(a - b) <= 1e-6


def test_beta_antisymmetry(omega4, g2, rng):
    z, dirs = sample_unit_tangents(g2, rng, 2000)
    f = f_values(omega4, z, dirs, automorphic=False)
    fb = f_values(omega4, z, dirs * np.exp(1j * np.pi / 2), automorphic=False)
    assert np.abs(f + fb).max() <= 1e-12
    u = UnitTangent(complex(z[0]), complex(dirs[0]))
    assert abs(f_observable(omega4, beta(u, 2)) + f_observable(omega4, u)) <= 1e-12


def test_unit_tangent_samples_in_domain(g2, rng):
    z, dirs = sample_unit_tangents(g2, rng, 500)
    assert len(z) == 500
    assert np.allclose(np.abs(dirs), 1)
    R = np.arccosh(1 / np.tan(np.pi / 8) ** 2)
    assert np.all(distance(z, 1j) <= R)


def test_monte_carlo_mean_small(omega4, rng):
    mean, se = monte_carlo_mean(omega4, rng, 20_000)
    assert abs(mean) <= 4 * se


def test_survey_reports_round_trip(omega4, g2):
    res = geodesic_sign_survey(g2, omega4, 1, 1, with_mu=False, nodes_per_unit=200)
    assert len(res.reports) == 8
    text = reports_to_csv(res.reports)
    assert text.splitlines()[0] == "word,length,integral_f,mu_direct,mu_integral"
    doc = json.loads(reports_to_json(res.reports))
    assert len(doc) == 8
    # rotations of the octagon permute the generators, so all lengths agree
    assert np.allclose([r.length for r in res.reports], res.reports[0].length)
