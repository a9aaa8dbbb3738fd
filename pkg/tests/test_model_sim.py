import json

import numpy as np
import pytest

from hocpoles.errors import ModelError, UnstableModelError
from hocpoles.model_sim import (G11, G21, ArmaSpec, ClosedLoopSpec, NoiseConfig,
                                analytic_acf, arma_filter, closed_loop_to_arma,
                                gaussian_noise, generate_arma, load_model, save_model,
                                true_poles)
from hocpoles.myw import batch_acf


def brute_acf(spec, max_lag, terms=4000):
    # truncated sum of impulse-response products
    psi = np.zeros(terms)
    a, b = spec.den, spec.num
    for t in range(terms):
        acc = b[t] if t < len(b) else 0.0
        for i in range(1, len(a)):
            if t - i >= 0:
                acc -= a[i] * psi[t - i]
        psi[t] = acc
    gamma = [np.dot(psi[: terms - k], psi[k:]) for k in range(max_lag + 1)]
    return np.array(gamma) / gamma[0]


def test_spec_orders_and_monic():
    assert (G21.n, G21.m) == (2, 1)
    with pytest.raises(ModelError):
        ArmaSpec(num=(2.0,), den=(1.0,))
    with pytest.raises(ModelError):
        ArmaSpec(num=(1.0,), den=(0.5, 1.0))


def test_stability_flag():
    assert G11.is_stable() and G21.is_stable()
    assert not ArmaSpec((1.0,), (1.0, -1.0)).is_stable()
    assert not ArmaSpec((1.0,), (1.0, -1.2)).is_stable()


def test_identity_filter_returns_noise():
    noise = NoiseConfig(seed=3, count=500)
    y = generate_arma(ArmaSpec((1.0,), (1.0,)), noise, warmup=0)
    np.testing.assert_array_equal(y, gaussian_noise(noise))


def test_zero_input_gives_zero_output():
    y = arma_filter(G21, np.zeros(200))
    assert not y.any()


def test_impulse_response_g11():
    eps = np.zeros(5)
    eps[0] = 1.0
    h = arma_filter(G11, eps)
    np.testing.assert_allclose(h[:3], [1.0, 0.45, 0.4275], rtol=0, atol=1e-15)


def test_difference_equation_matches_direct_recursion(rng):
    eps = rng.standard_normal(300)
    y = arma_filter(G21, eps)
    ref = np.zeros_like(eps)
    for t in range(len(eps)):
        acc = eps[t] - 0.5 * (eps[t - 1] if t >= 1 else 0.0)
        acc += 1.85 * (ref[t - 1] if t >= 1 else 0.0) - 0.855 * (ref[t - 2] if t >= 2 else 0.0)
        ref[t] = acc
    np.testing.assert_allclose(y, ref, rtol=1e-12, atol=1e-12)


def test_seed_determinism():
    noise = NoiseConfig(seed=42, count=1000)
    a = generate_arma(G21, noise)
    b = generate_arma(G21, noise)
    assert a.tobytes() == b.tobytes()
    assert a.tobytes() != generate_arma(G21, NoiseConfig(seed=43, count=1000)).tobytes()


def test_warmup_discard():
    noise = NoiseConfig(seed=1, count=50)
    full = arma_filter(G11, gaussian_noise(noise, extra=100))
    np.testing.assert_array_equal(generate_arma(G11, noise, warmup=100), full[100:])


def test_generator_rejects_unstable():
    spec = ArmaSpec((1.0,), (1.0, -1.01))
    with pytest.raises(UnstableModelError):
        generate_arma(spec, NoiseConfig(0, 10))
    assert generate_arma(spec, NoiseConfig(0, 10), force=True).shape == (10,)


def test_noise_config_validation():
    with pytest.raises(ModelError):
        NoiseConfig(seed=0, count=1)
    with pytest.raises(ModelError):
        NoiseConfig(seed=0, count=10, variance=0.0)


def test_variance_scales_noise():
    a = gaussian_noise(NoiseConfig(5, 100))
    b = gaussian_noise(NoiseConfig(5, 100, variance=4.0))
    np.testing.assert_allclose(b, 2 * a)


@pytest.mark.parametrize("kc, den", [
    (0.5, (1.0, -1.9, 0.95)),
    (0.0, (1.0, -1.9, 0.9)),
])
def test_closed_loop_second_order(kc, den):
    spec = closed_loop_to_arma(ClosedLoopSpec(alpha=0.9, delay=2, kc=kc))
    assert spec.num == (1.0, -1.0)
    np.testing.assert_allclose(spec.den, den, atol=1e-15)


def test_closed_loop_delay_three():
    spec = closed_loop_to_arma(ClosedLoopSpec(alpha=0.9, delay=3, kc=0.1))
    np.testing.assert_allclose(spec.den, (1.0, -1.9, 0.9, 0.01), atol=1e-15)
    assert (spec.n, spec.m) == (3, 1)


def test_closed_loop_delay_one_folds_into_first_lag():
    spec = closed_loop_to_arma(ClosedLoopSpec(alpha=0.5, delay=1, kc=0.4))
    np.testing.assert_allclose(spec.den, (1.0, -1.5 + 0.2, 0.5), atol=1e-15)


def test_closed_loop_validation():
    with pytest.raises(ModelError):
        ClosedLoopSpec(alpha=0.9, delay=0, kc=0.1)
    with pytest.raises(ModelError):
        ClosedLoopSpec(alpha=1.0, delay=2, kc=0.1)


def test_closed_loop_kc_zero_poles():
    p = true_poles(closed_loop_to_arma(ClosedLoopSpec(alpha=0.9, delay=2, kc=0.0)))
    np.testing.assert_allclose(sorted(p.real), [0.9, 1.0], atol=1e-12)


@pytest.mark.parametrize("kc", [0.05, 0.1, 0.3, 0.5, 0.75, 1.0, 2.0])
def test_closed_loop_poles_match_quadratic_formula(kc):
    p = true_poles(closed_loop_to_arma(ClosedLoopSpec(alpha=0.9, delay=2, kc=kc)))
    c = 0.9 + 0.1 * kc
    disc = complex(1.9 ** 2 - 4 * c) ** 0.5
    expected = sorted([(1.9 + disc) / 2, (1.9 - disc) / 2], key=lambda z: (z.real, z.imag))
    got = sorted(p, key=lambda z: (z.real, z.imag))
    np.testing.assert_allclose(got, expected, atol=1e-12)


def test_true_poles_examples():
    np.testing.assert_allclose(sorted(true_poles(G21).real), [0.9, 0.95], atol=1e-12)
    np.testing.assert_allclose(true_poles(G11), [0.95])
    spec = closed_loop_to_arma(ClosedLoopSpec(alpha=0.9, delay=2, kc=0.05))
    p = true_poles(spec)
    np.testing.assert_allclose(p, [0.95 + 0.05j, 0.95 - 0.05j], atol=1e-12)


def test_analytic_acf_ar1():
    rho = analytic_acf(ArmaSpec((1.0,), (1.0, -0.95)), 5)
    np.testing.assert_allclose(rho.rho, 0.95 ** np.arange(6), atol=1e-14)


def test_analytic_acf_arma11_closed_form():
    phi, theta = 0.95, -0.5
    r1 = (1 + phi * theta) * (phi + theta) / (1 + 2 * phi * theta + theta ** 2)
    rho = analytic_acf(G11, 4)
    assert rho[1] == pytest.approx(0.7875, abs=1e-12)
    assert r1 == pytest.approx(0.7875, abs=1e-12)
    np.testing.assert_allclose(rho.rho[1:], r1 * phi ** np.arange(4), atol=1e-12)
    assert round(rho[2], 4) == 0.7481


def test_analytic_acf_white_noise():
    rho = analytic_acf(ArmaSpec((1.0,), (1.0,)), 4)
    assert rho.rho == (1.0, 0.0, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("spec", [
    G11, G21,
    ArmaSpec((1.0, 0.4, -0.3), (1.0, -0.5)),
    ArmaSpec((1.0, -1.0), (1.0, -1.9, 0.905)),
    ArmaSpec((1.0, 0.7, 0.2, 0.1), (1.0,)),
])
def test_analytic_acf_matches_impulse_response_sum(spec):
    np.testing.assert_allclose(analytic_acf(spec, 8).rho, brute_acf(spec, 8), atol=1e-10)


@pytest.mark.parametrize("spec", [G11, G21, ArmaSpec((1.0, 0.3, 0.2), (1.0, -0.2, 0.5))])
def test_analytic_acf_obeys_recursion_beyond_ma_order(spec):
    rho = analytic_acf(spec, 12).rho
    for k in range(spec.m + 1, 13):
        pred = -sum(spec.den[i] * rho[abs(k - i)] for i in range(1, spec.n + 1))
        assert rho[k] == pytest.approx(pred, abs=1e-12)


def test_analytic_acf_rejects_unstable():
    with pytest.raises(UnstableModelError):
        analytic_acf(ArmaSpec((1.0,), (1.0, -1.0)), 3)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_long_ar1_sample_acf_near_analytic(seed):
    spec = ArmaSpec((1.0,), (1.0, -0.7))
    y = generate_arma(spec, NoiseConfig(seed, 100_000))
    assert abs(batch_acf(y, 1)[1] - analytic_acf(spec, 1)[1]) < 0.03


def test_model_file_round_trip(tmp_path):
    path = tmp_path / "model.json"
    save_model(G21, path)
    assert json.loads(path.read_text()) == {"num": [1.0, -0.5], "den": [1.0, -1.85, 0.855]}
    assert load_model(path) == G21


def test_model_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"num": [1.0]}')
    with pytest.raises(ModelError):
        load_model(bad)
    bad.write_text("not json")
    with pytest.raises(ModelError):
        load_model(bad)
