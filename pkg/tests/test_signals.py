import math

import numpy as np
import pytest

from core.models import NoiseSpec, SignalTerm, TestSignal
from core.signals import (
    HeldNoiseInput, derivative_bound, eval_signal, noise_sequence, sample_signal,
    sample_with_noise, signal_source,
)


def test_eval_signal_at_origin(benchmark_signal):
    assert eval_signal(benchmark_signal, 0.0, 0) == 3.0
    assert eval_signal(benchmark_signal, 0.0, 1) == 2.0


@pytest.mark.parametrize("order", [0, 1, 2, 3, 4, 5])
def test_derivatives_match_central_differences(benchmark_signal, order):
    h = 1e-5
    for t in np.linspace(0.0, 2.0 * math.pi, 37):
        fd = (eval_signal(benchmark_signal, t + h, order) - eval_signal(benchmark_signal, t - h, order)) / (2 * h)
        exact = eval_signal(benchmark_signal, t, order + 1)
        assert abs(exact - fd) <= 1e-4 * (1 + derivative_bound(benchmark_signal, order + 1))


def test_fourth_derivative_at_half_second(benchmark_signal):
    h = 1e-4
    fd = (eval_signal(benchmark_signal, 0.5 + h, 3) - eval_signal(benchmark_signal, 0.5 - h, 3)) / (2 * h)
    assert eval_signal(benchmark_signal, 0.5, 4) == pytest.approx(fd, rel=1e-6)


def test_sample_signal_matches_scalar_evaluation(benchmark_signal):
    times = np.linspace(0.0, 3.0, 101)
    for order in range(5):
        expected = [eval_signal(benchmark_signal, t, order) for t in times]
        assert np.allclose(sample_signal(benchmark_signal, times, order), expected, rtol=0, atol=1e-12)


def test_derivative_bound_values(benchmark_signal, single_sine):
    assert derivative_bound(benchmark_signal, 2) == 29.0
    assert derivative_bound(benchmark_signal, 5) == 731.0
    assert derivative_bound(single_sine, 1) == 1.0


def test_derivative_bound_rejects_order_zero(benchmark_signal):
    with pytest.raises(ValueError):
        derivative_bound(benchmark_signal, 0)


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_derivative_bound_holds_on_dense_grid(benchmark_signal, order):
    times = np.linspace(0.0, 2.0 * math.pi, 100_000)
    assert np.max(np.abs(sample_signal(benchmark_signal, times, order))) <= derivative_bound(benchmark_signal, order)


def test_sample_with_noise_without_noise(benchmark_signal):
    assert sample_with_noise(benchmark_signal, [0.0], NoiseSpec()).tolist() == [3.0]


def test_zero_magnitude_noise_is_identity(benchmark_signal):
    grid = np.linspace(0.0, 1.0, 50)
    clean = sample_with_noise(benchmark_signal, grid, NoiseSpec())
    noisy = sample_with_noise(benchmark_signal, grid, NoiseSpec("uniform", 0.0, 7))
    assert np.array_equal(clean, noisy)


def test_noise_is_deterministic_per_seed(benchmark_signal):
    grid = np.linspace(0.0, 1.0, 200)
    spec = NoiseSpec("uniform", 0.1, 42)
    first = sample_with_noise(benchmark_signal, grid, spec)
    second = sample_with_noise(benchmark_signal, grid, spec)
    assert first.tobytes() == second.tobytes()
    assert np.max(np.abs(first - sample_signal(benchmark_signal, grid))) <= 0.1


def test_gaussian_noise_statistics():
    samples = noise_sequence(NoiseSpec("gaussian", 0.5, 3), 20_000)
    assert abs(samples.mean()) < 0.02
    assert samples.std() == pytest.approx(0.5, rel=0.03)


def test_different_seeds_give_different_noise():
    a = noise_sequence(NoiseSpec("uniform", 1.0, 1), 10)
    b = noise_sequence(NoiseSpec("uniform", 1.0, 2), 10)
    assert not np.array_equal(a, b)


def test_sample_with_noise_rejects_bad_grids(benchmark_signal):
    with pytest.raises(ValueError, match="empty grid"):
        sample_with_noise(benchmark_signal, [], NoiseSpec())
    with pytest.raises(ValueError):
        sample_with_noise(benchmark_signal, [0.0, 0.0], NoiseSpec())


def test_signal_validation():
    with pytest.raises(ValueError):
        TestSignal(())
    with pytest.raises(ValueError):
        SignalTerm(1.0, -1.0)
    with pytest.raises(ValueError):
        SignalTerm(float("nan"), 1.0)
    with pytest.raises(ValueError):
        SignalTerm(1.0, 1.0, "square")
    with pytest.raises(ValueError):
        NoiseSpec("uniform", -0.1)


def test_signal_source_matches_eval(benchmark_signal):
    source = signal_source(benchmark_signal)
    for t in (0.0, 0.3, 1.7):
        assert source(t) == pytest.approx(eval_signal(benchmark_signal, t), abs=1e-15)
    assert signal_source(math.sin) is math.sin
    with pytest.raises(TypeError):
        signal_source(3.0)


def test_held_noise_is_constant_within_a_step():
    held = HeldNoiseInput(lambda t: 0.0, NoiseSpec("uniform", 1.0, 5), t_start=0.0, dt=0.1, n_steps=10)
    assert held(0.0) == held(0.05) == held(0.0999)
    assert held(0.1) != held(0.0)
    expected = noise_sequence(NoiseSpec("uniform", 1.0, 5), 11)
    assert held(0.35) == expected[3]
