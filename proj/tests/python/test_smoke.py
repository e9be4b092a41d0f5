import cmath
import math

import pytest

import calabi as cb

SQRT3 = math.sqrt(3.0)


def test_reference_construction():
    cp = cb.ConstructionParams.from_theta(2, math.pi / 6)
    assert cp.c == pytest.approx(-2.0, abs=1e-12)
    assert cp.q == pytest.approx(-SQRT3, abs=1e-12)
    assert cp.a == pytest.approx(2.0, abs=1e-12)
    assert cp.a * cp.p / cp.q == pytest.approx(4.0, abs=1e-12)

    k = cb.find_admissible_k(cp)
    assert k is not None
    assert (k.kq, k.kap) == (-1, -4)


def test_degenerate_angle_raises():
    with pytest.raises(cb.CalabiError):
        cb.ConstructionParams.from_theta(2, math.pi / 2)


def test_central_charge_reference():
    omega = cb.KahlerClassBlowup(2.0, 1.0)
    L1 = cb.DivisorClass(4 * SQRT3, -SQRT3)
    Z1 = cb.central_charge(2, omega, L1)
    assert Z1 == pytest.approx(complex(-42.0, 14 * SQRT3), abs=1e-9)
    assert cmath.phase(Z1) == pytest.approx(math.pi - math.pi / 6, abs=1e-12)
    assert cb.surrogate_charge(2, omega, L1) == pytest.approx(Z1, abs=1e-9)


def test_locus_classification():
    cp = cb.ConstructionParams.from_theta(2, math.pi / 6)
    assert cb.classify_locus(cp, 0.995) == cb.Locus.Stable
    assert cb.classify_locus(cp, 1.0) == cb.Locus.Wall
    assert cb.classify_locus(cp, 1.005) == cb.Locus.Unstable


def test_levelset_components():
    s = cb.HarmonicLevelSet(3, 1.0, 3.0)
    comps = cb.collect_components(s, cb.Window(-4, 4, -4, 4))
    assert len(comps) == 3
    for branch in comps:
        for x, y in branch.points[::40]:
            assert s.eval(x, y) == pytest.approx(0.0, abs=1e-8)


def test_flow_smoke():
    rep = cb.unstable_limit_experiment(t_max=0.02, curve_points=120)
    assert rep.status in (cb.FlowStatus.TMaxReached, cb.FlowStatus.Converged)
    assert rep.q == pytest.approx(-SQRT3, abs=1e-9)
    assert rep.barriers_respected
    assert len(rep.history) >= 2
    assert len(rep.final_curve) == 120


def test_bundle_boundary():
    th = cb.vertical_branch_thetas(2, 2, 0.0)[0]
    bp = cb.BundleParams(r=2, m=2, xi=1.0 + 0.0j, b=0.3, theta_hat=th)
    bi = cb.boundary_intersections(bp)
    assert bi.q > 0 > bi.q_prime
    assert bi.q == pytest.approx(-bi.q_prime, abs=1e-7)
    d = cb.charge_arg_xi1_derivative(bp, complex(bp.b, bi.q))
    assert d == pytest.approx(-cb.charge_arg_xi1_derivative(bp, complex(bp.b, bi.q_prime)),
                              abs=1e-10)


def test_hom_dimensions():
    assert cb.hom_dimension(3, 4).dim == 35
    assert cb.hom_dimension(5, 60).dim == 8259888
