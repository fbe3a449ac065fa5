import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from complexscale.geometry import circle_cross_section, gaussian_well, make_grid
from complexscale.linalg import eig_dense
from complexscale.operators import assemble_cyl_mode, radial_block
from complexscale.profile import theta_prime
from complexscale.spectral import (RayFamily, classify_spectrum, detect_resonances,
                                   holomorphy_check, ichinose_sumcheck, match_discrete,
                                   polygon_max_angle, predict_essential, ray_distance,
                                   sector_search)


# --------------------------------------------------------------------------- rays

def test_ray_distance_examples():
    d = 0.3 - 0.2j
    assert ray_distance(1 + 1j, 1 + 1j, d) == 0
    assert ray_distance(1 + 1j + 5 * d, 1 + 1j, d) == pytest.approx(0, abs=1e-15)
    assert ray_distance(-3 + 4j, 0, 1) == pytest.approx(5.0)
    assert ray_distance(2 + 1j, 0, 1) == pytest.approx(1.0)


@settings(max_examples=60, deadline=None)
@given(zr=st.floats(-10, 10), zi=st.floats(-10, 10), phi=st.floats(-1.5, 1.5))
def test_ray_distance_brute_force(zr, zi, phi):
    z, d = complex(zr, zi), cmath.exp(1j * phi)
    t = np.linspace(0, 40, 400001)
    brute = np.abs(z - d * t).min()
    assert ray_distance(z, 0, d) <= brute + 1e-12
    assert ray_distance(z, 0, d) >= brute - 1e-3


def test_predict_real_theta():
    rays = predict_essential(0.3, circle_cross_section(3))
    assert rays.direction.imag == 0 and rays.direction.real > 0
    assert rays.origins == (0, 1, 1)


def test_predict_circle_rotated():
    theta = 0.4 + 0.2j
    rays = predict_essential(theta, circle_cross_section(5))
    assert rays.origins == (0, 1, 1, 4, 4)
    assert rays.direction == theta_prime(theta)
    assert rays.provenance[0].startswith("threshold")


def test_predict_corner_end_eigenvalue():
    cs = circle_cross_section(1)
    rays = predict_essential(0.4 + 0.2j, cs, [[-2.37], []])
    assert len(rays) == 2 and rays.origins[1] == -2.37
    assert rays.provenance[1].startswith("end1")
    assert predict_essential(0.4 + 0.2j, cs, [[], []]) == predict_essential(0.4 + 0.2j, cs)


def test_predict_end_value_matches_hermitian_solve():
    # the end eigenvalue feeding a corner ray, at two dilation parameters
    g = make_grid(20.0, 400)
    v = gaussian_well(8, 0.8, 0.4, 1.8)
    herm = eig_dense(radial_block(0.0, g, v), vectors=False).eigenvalues.real[0]
    rot = eig_dense(radial_block(0.4 + 0.2j, g, v), vectors=False).eigenvalues
    assert herm < 0
    # equal up to the theta-dependence of the discretization error
    assert np.abs(rot - herm).min() < 1e-5 * abs(herm)


def test_ray_family_validation():
    with pytest.raises(ValueError):
        RayFamily((0,), 0, ("a",))
    with pytest.raises(ValueError):
        RayFamily((0, 1), 1, ("a",))


# --------------------------------------------------------------------------- classification

def test_classify_on_ray_and_off_ray():
    tp = theta_prime(0.4 + 0.2j)
    rays = RayFamily((0j,), tp, ("t",))
    on = tp * np.array([0.5, 1.0, 2.0])
    cl = classify_spectrum(on, rays, 1e-6)
    assert len(cl.discrete) == 0 and len(cl.ray_bound) == 3
    perp = 1j * tp / abs(tp)
    cl = classify_spectrum([tp * 2 + 0.3 * perp], rays, 0.05)
    assert len(cl.discrete) == 1
    assert cl.discrete[0].distance == pytest.approx(0.3)
    recs = cl.records()
    assert recs[0]["class"] == "discrete"


def test_classify_partition():
    rng = np.random.default_rng(1)
    z = rng.standard_normal(50) + 1j * rng.standard_normal(50)
    rays = predict_essential(0.4 + 0.2j, circle_cross_section(3))
    cl = classify_spectrum(z, rays, 0.3)
    assert len(cl.discrete) + len(cl.ray_bound) == 50
    assert all(d.distance > 0.3 for d in cl.discrete)
    assert all(r.distance <= 0.3 for r in cl.ray_bound)


def test_real_theta_reproduces_hermitian_picture():
    g = make_grid(20.0, 400)
    v = gaussian_well(8, 0.8, 0.4, 1.8)
    ev = eig_dense(assemble_cyl_mode(0.3, 0.0, g, v), vectors=False).eigenvalues
    herm = eig_dense(assemble_cyl_mode(0.0, 0.0, g, v), vectors=False).eigenvalues.real
    cl = classify_spectrum(ev, predict_essential(0.3, circle_cross_section(1)), 0.05)
    d = cl.discrete_values
    assert d.size >= 1
    for z in d:
        assert np.abs(herm - z.real).min() < 1e-6 * max(1, abs(z))


def test_match_discrete_greedy():
    pairs = match_discrete([1.0, 2.0, 5.0], [2.001, 0.999, 9.0], 0.01)
    assert [p[0] for p in pairs] == [1.0, 2.0]
    assert all(p[2] <= 0.01 for p in pairs)


def test_detect_resonances_free_model_empty():
    g = make_grid(40.0, 400)
    cs = circle_cross_section(1)
    ta, tb = 0.4 + 0.2j, 0.45 + 0.1j
    ea = eig_dense(assemble_cyl_mode(ta, 0.0, g), vectors=False).eigenvalues
    eb = eig_dense(assemble_cyl_mode(tb, 0.0, g), vectors=False).eigenvalues
    ea, eb = ea[np.abs(ea) < 10], eb[np.abs(eb) < 10]
    found = detect_resonances(ea, ta, eb, tb, predict_essential(ta, cs),
                              predict_essential(tb, cs), 1e-2, tol=0.05)
    assert found == []


def test_detect_resonances_bound_state():
    g = make_grid(20.0, 400)
    v = gaussian_well(8, 0.8, 0.4, 1.8)
    cs = circle_cross_section(1)
    ta, tb = 0.4 + 0.2j, 0.45 + 0.1j
    ea = eig_dense(assemble_cyl_mode(ta, 0.0, g, v), vectors=False).eigenvalues
    eb = eig_dense(assemble_cyl_mode(tb, 0.0, g, v), vectors=False).eigenvalues
    found = detect_resonances(ea, ta, eb, tb, predict_essential(ta, cs),
                              predict_essential(tb, cs), 1e-4, tol=0.05)
    herm = eig_dense(assemble_cyl_mode(0.0, 0.0, g, v), vectors=False).eigenvalues.real
    assert len(found) >= 1
    for z in found:
        assert abs(z.imag) < 1e-6
        assert np.abs(herm - z.real).min() < 1e-5 * abs(z)


def test_detect_resonances_requires_distinct_rotation():
    cs = circle_cross_section(1)
    rays = predict_essential(0.4 + 0.2j, cs)
    with pytest.raises(ValueError):
        detect_resonances([], 0.4 + 0.2j, [], 0.4 + 0.2j, rays, rays, 1e-2)


# --------------------------------------------------------------------------- Ichinose

def test_ichinose_diagonal():
    comp, pred, worst = ichinose_sumcheck(np.diag([1.0, 2.0]), np.diag([10.0, 20.0]))
    assert np.allclose(np.sort(pred.real), [11, 12, 21, 22])
    assert worst == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 31 - 1))
def test_ichinose_random(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    B = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert ichinose_sumcheck(A, B)[2] < 1e-8


def test_ichinose_dilated_blocks():
    g = make_grid(10.0, 40)
    A = radial_block(0.4 + 0.2j, g, gaussian_well(8, 0.8, 0.4, 1.8))
    B = radial_block(0.4 + 0.2j, g)
    assert ichinose_sumcheck(A, B)[2] < 1e-7


# --------------------------------------------------------------------------- sectors

def test_sector_positive_real():
    assert sector_search([0.5, 1.0, 3.0], [0.1, 1, 10]) == (0.0, 10.0)


def test_sector_quarter_plane():
    s = np.exp(1j * np.linspace(-np.pi / 4, np.pi / 4, 101))
    gamma, k = sector_search(s, [0.25, 0.5, 1.0])
    assert gamma == 0.0 and k == 1.0
    gamma, k = sector_search(s, [2.0], gamma_max=10.0)
    assert gamma > 0


def test_sector_failure_is_none():
    assert sector_search([-100.0 + 0j], [0.5], gamma_max=10.0) is None


def test_sector_monotone_in_samples():
    rng = np.random.default_rng(2)
    s = rng.standard_normal(200) * 0.3 + 1 + 1j * rng.standard_normal(200)
    grid = np.linspace(0.05, 5, 100)
    k_small = sector_search(s[:50], grid)[1]
    k_all = sector_search(s, grid)[1]
    assert k_all <= k_small


def test_polygon_angle():
    sq = np.array([1 + 1j, 1 - 1j, 3 - 1j, 3 + 1j])
    assert polygon_max_angle(sq) == pytest.approx(np.pi / 4)


# --------------------------------------------------------------------------- holomorphy

def test_holomorphy_constant_and_antiholomorphic():
    c = 0.4 + 0.1j
    assert holomorphy_check(lambda t: 3.0 + 1j, c, 0.05) < 1e-14
    assert holomorphy_check(lambda t: np.conj(t), c, 0.05) > 0.5


def test_holomorphy_requires_sector():
    with pytest.raises(ValueError):
        holomorphy_check(lambda t: t, 0.05, 0.1)
