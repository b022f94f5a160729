import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zeromodes.fields import (
    ZeroModeParams,
    admissible_spinor_basis,
    eval_potential,
    eval_zero_mode,
    potential_Ln_norm,
)
from zeromodes.samples import compact_vector_bump
from zeromodes.yamabe import (
    DegenerateProfileError,
    RadialProfile,
    constants_report,
    fit_bubble,
    gradient_check,
    log_nodes,
    pushforward_potential,
    radial_descent,
    sobolev_constant,
    sobolev_quotient,
    sphere_integral,
    sphere_Ln_norm,
    sphere_spinor_norm_check,
    sphere_volume,
    talenti_bubble,
    yamabe_functional_sphere_check,
    yamabe_sphere,
)

S3 = 5.477904089531331  # (3/4)(2 pi^2)^{2/3}
Y3 = 43.82323271625065  # 6 (2 pi^2)^{2/3}


def test_frozen_constants():
    assert sobolev_constant(3) == pytest.approx(S3, rel=1e-15)
    assert yamabe_sphere(3) == pytest.approx(Y3, rel=1e-15)
    assert sobolev_constant(4) == pytest.approx(2 * sphere_volume(4) ** 0.5, rel=1e-15)
    assert 3 / 8 * yamabe_sphere(3) == pytest.approx(potential_Ln_norm(3).value ** 2, rel=1e-6)


def test_sobolev_constant_domain():
    with pytest.raises(ValueError):
        sobolev_constant(2)
    with pytest.raises(ValueError):
        yamabe_sphere(1)


def test_sobolev_constant_monotone():
    vals = [sobolev_constant(n) for n in range(3, 10)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("n", range(3, 10))
def test_constant_chain(n):
    c = constants_report(n)
    assert max(c.chain_defects) <= 1e-14
    assert min(c.sphere_volume, c.S_n, c.Y_sphere) > 0


def test_bubble_matches_sharp_modulus(sharp3):
    x = np.random.default_rng(2).normal(size=(50, 3)) * 2
    psi = np.linalg.norm(eval_zero_mode(sharp3, x), axis=-1)
    np.testing.assert_allclose(talenti_bubble(3, x), psi ** 0.5, rtol=1e-10)
    assert talenti_bubble(3, 0.0) == 1.0
    r = np.array([1e4, 1e5])
    slope = np.diff(np.log(talenti_bubble(5, r))) / np.diff(np.log(r))
    assert slope[0] == pytest.approx(-3, rel=1e-6)


@pytest.fixture(scope="module")
def bubble():
    return RadialProfile.from_function(lambda r: talenti_bubble(3, r))


def test_bubble_quotient(bubble):
    assert bubble.nodes.size == 4000 and bubble.nodes[-1] == pytest.approx(1e3)
    assert sobolev_quotient(bubble, 3) == pytest.approx(S3, rel=5e-3)
    assert sobolev_quotient(bubble, 3) == pytest.approx(S3, rel=1e-5)


@settings(max_examples=10)
@given(lam=st.floats(0.3, 3.0), c=st.floats(0.1, 10.0))
def test_quotient_invariances(bubble, lam, c):
    q0 = sobolev_quotient(bubble, 3)
    scaled = RadialProfile.from_function(lambda r: c * talenti_bubble(3, lam * r))
    assert sobolev_quotient(scaled, 3) == pytest.approx(q0, rel=1e-4)
    assert sobolev_quotient(bubble.with_values(c * bubble.values), 3) == pytest.approx(q0, rel=1e-12)


def test_perturbation_raises_quotient(bubble):
    r = bubble.nodes
    bump = np.where(r < 2, np.exp(-1 / np.maximum(1 - (r - 1) ** 2, 1e-300)), 0.0) * (np.abs(r - 1) < 1)
    # remove the component along the bubble (mass-orthogonal in the r^{n-1} dr pairing)
    w = np.gradient(r) * r**2
    u0 = bubble.values
    bump = bump - (np.sum(w * bump * u0) / np.sum(w * u0 * u0)) * u0
    pert = bubble.with_values(np.maximum(u0 + 0.1 * bump, 0))
    gap = sobolev_quotient(pert, 3) - sobolev_quotient(bubble, 3)
    assert gap > 20 * abs(sobolev_quotient(bubble, 3) - S3)


def test_profile_validation():
    r = log_nodes(10.0, 50)
    with pytest.raises(DegenerateProfileError):
        RadialProfile(r, np.zeros_like(r))
    with pytest.raises(ValueError):
        RadialProfile(r, -np.ones_like(r))
    with pytest.raises(ValueError):
        RadialProfile(r[1:], np.ones(r.size - 1))
    with pytest.raises(ValueError):
        RadialProfile(r, np.full_like(r, np.nan))


@pytest.mark.parametrize("seed", range(3))
def test_gradient_matches_fd(seed):
    g = RadialProfile.from_function(lambda r: np.exp(-r * r / 2) * (1 + 0.3 * np.sin(r)))
    assert gradient_check(g, 3, count=5, seed=seed) < 1e-6


@pytest.fixture(scope="module")
def descent():
    g = RadialProfile.from_function(lambda r: np.exp(-r * r / 2))
    return radial_descent(g, 3, steps=500)


def test_descent_reaches_bubble(descent):
    assert descent.trace[-1] == pytest.approx(S3, rel=1e-2)
    assert np.all(np.diff(descent.trace) <= 1e-12)
    c, lam, misfit = fit_bubble(descent.profile, 3)
    assert misfit < 2e-2
    assert c > 0 and lam > 0


def test_descent_from_bubble_is_stationary(bubble):
    res = radial_descent(bubble, 3, steps=5)
    assert abs(res.trace[-1] - res.trace[0]) <= 1e-10 * res.trace[0]


def test_descent_n5():
    g = RadialProfile.from_function(lambda r: np.exp(-r * r))
    res = radial_descent(g, 5, steps=200)
    assert res.trace[-1] == pytest.approx(sobolev_constant(5), rel=1e-2)


# --- sphere side ---------------------------------------------------------------


def test_pushforward_examples():
    np.testing.assert_allclose(pushforward_potential(eval_potential(3, np.zeros(3)), np.zeros(3)), [1.5, 0, 0])
    x = np.random.default_rng(0).normal(size=(100, 3)) * 4
    np.testing.assert_allclose(np.linalg.norm(pushforward_potential(eval_potential(3, x), x), axis=-1), 1.5, rtol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sphere_integral_volume(n):
    assert sphere_integral(lambda p: np.ones(p.shape[:-1]), n, order=8) == pytest.approx(sphere_volume(n), rel=1e-13)


def test_sphere_integral_moment():
    # int_{S^3} p_4^2 = |S^3| / 4
    assert sphere_integral(lambda p: p[..., -1] ** 2, 3, order=8) == pytest.approx(2 * math.pi**2 / 4, rel=1e-13)


@pytest.mark.parametrize("n", [3, 5])
def test_pullback_norm_sharp(n):
    assert sphere_Ln_norm(lambda x: eval_potential(n, x), n, order=16) == pytest.approx(potential_Ln_norm(n).value, rel=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_pullback_norm_compact(seed):
    from zeromodes.checks import cube_integral_vector

    A = compact_vector_bump(3, 100 + seed)
    flat = cube_integral_vector(A, 3, 4.0) ** (1 / 3)
    assert sphere_Ln_norm(A, 3, order=96) == pytest.approx(flat, rel=1e-6)


def test_sphere_spinor_norm(sharp3):
    x = np.random.default_rng(0).normal(size=(200, 3)) * 3
    f = lambda y: eval_zero_mode(sharp3, y)  # noqa: E731
    assert sphere_spinor_norm_check(3, f, x) < 1e-10
    assert sphere_spinor_norm_check(3, f, -x) == pytest.approx(sphere_spinor_norm_check(3, f, x), abs=1e-15)


def test_sphere_spinor_norm_nonadmissible_psi0_is_still_constant():
    # with the real coefficient |psi| does not see psi0
    rng = np.random.default_rng(1)
    ns = admissible_spinor_basis(3, 1, rng.normal(size=(50, 3)))
    orth = np.array([-np.conj(ns.basis[0][1]), np.conj(ns.basis[0][0])])
    p = ZeroModeParams(3, 1, orth / np.linalg.norm(orth))
    assert sphere_spinor_norm_check(3, lambda y: eval_zero_mode(p, y), rng.normal(size=(100, 3))) < 1e-10


@pytest.mark.parametrize("n", [3, 5, 7])
def test_sphere_functional(n):
    assert yamabe_functional_sphere_check(n) <= 1e-12


@pytest.mark.parametrize("c", [0.1, 0.6, 3.0])
def test_sphere_functional_is_scale_free(c):
    # both sides scale as c^{2(n-2)/(n-1)}
    assert yamabe_functional_sphere_check(3, phi_norm=c) <= 1e-12
