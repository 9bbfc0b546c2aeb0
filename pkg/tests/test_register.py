import math

import numpy as np
import pytest

from dqc1lab.linalg import PAULI_X, tensor, unitarity_residual
from dqc1lab.register import (
    InfiniteTemperatureError,
    RegisterSpec,
    initial_state,
    iswap,
    logical_state,
    mu_of,
    named_unitary,
    p_zero,
    parse_scalar,
    sample_trace,
    trace_estimation_unitary,
)

from _oracles import eq4_final_state, haar, random_real_trace_unitary

rng = np.random.default_rng(7)


class TestRegisterSpec:
    def test_defaults_ancilla_freqs(self):
        spec = RegisterSpec(n=3, alpha=0.5)
        assert spec.ancilla_freqs == (1.0, 1.0, 1.0)
        assert spec.dim == 16

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(n=0, alpha=0.5),
            dict(n=12, alpha=0.5),
            dict(n=1, alpha=-0.1),
            dict(n=1, alpha=1.5),
            dict(n=1, alpha=0.5, omega=0.0),
            dict(n=2, alpha=0.5, ancilla_freqs=(1.0,)),
            dict(n=2, alpha=0.5, ancilla_freqs=(1.0, -1.0)),
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            RegisterSpec(**kwargs)


class TestInitialState:
    def test_clean_qubit(self):
        rho = initial_state(RegisterSpec(n=1, alpha=1.0))
        assert np.abs(rho - np.diag([0.5, 0.5, 0.0, 0.0])).max() <= 1e-15

    def test_fully_mixed(self):
        rho = initial_state(RegisterSpec(n=1, alpha=0.0))
        assert np.abs(rho - np.eye(4) / 4).max() <= 1e-15

    def test_partially_polarized_spectrum(self):
        # Direct diagonal construction: eigenvalues (1 +- alpha)/2^(n+1), 2^n each.
        alpha, n = 0.5, 2
        rho = initial_state(RegisterSpec(n=n, alpha=alpha))
        assert abs(np.trace(rho).real - 1.0) <= 1e-14
        expected = sorted([(1 - alpha) / 8] * 4 + [(1 + alpha) / 8] * 4)
        assert np.abs(np.linalg.eigvalsh(rho) - expected).max() <= 1e-14
        assert np.abs(rho - rho.conj().T).max() == 0.0


class TestTraceEstimationUnitary:
    def test_identity_gives_mu_one(self):
        v = trace_estimation_unitary(np.eye(4, dtype=complex))
        assert unitarity_residual(v) <= 1e-10
        assert abs(mu_of(v, 2) - 1.0) <= 1e-12

    def test_iswap_pi_gives_mu_half(self):
        # Re{tr iSWAP(pi)}/4 = cos^2(pi/4) = 1/2.
        v = trace_estimation_unitary(iswap(math.pi))
        assert abs(mu_of(v, 2) - 0.5) <= 1e-12

    def test_iswap_trace_is_cos_squared(self):
        for theta in np.linspace(0, 2 * math.pi, 17):
            t = np.trace(iswap(theta)).real / 4
            assert abs(t - math.cos(theta / 4) ** 2) <= 1e-12

    def test_matches_closed_form_final_state(self):
        for alpha in (1.0, 0.6):
            u = haar(4, rng)
            v = trace_estimation_unitary(u)
            rho = initial_state(RegisterSpec(n=2, alpha=alpha))
            final = v @ rho @ v.conj().T
            assert np.abs(final - eq4_final_state(alpha, u)).max() <= 1e-12

    def test_y_basis_reads_imaginary_trace(self):
        for _ in range(5):
            u = haar(4, rng)
            v = trace_estimation_unitary(u, basis="y")
            assert unitarity_residual(v) <= 1e-10
            assert abs(mu_of(v, 2) - np.trace(u).imag / 4) <= 1e-12

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            trace_estimation_unitary(np.ones((4, 4), dtype=complex))

    def test_rejects_unknown_basis(self):
        with pytest.raises(ValueError):
            trace_estimation_unitary(np.eye(2, dtype=complex), basis="x")

    def test_spectrum_is_invariant(self):
        spec = RegisterSpec(n=2, alpha=0.7)
        v = trace_estimation_unitary(haar(4, rng))
        rho = initial_state(spec)
        before = np.linalg.eigvalsh(rho)
        after = np.linalg.eigvalsh(v @ rho @ v.conj().T)
        assert np.abs(before - after).max() <= 1e-12

    def test_reduced_logical_state_closed_form(self):
        # For real-trace U the logical qubit ends in (I + alpha*t*sigma^z)/2.
        from dqc1lab.linalg import partial_trace

        alpha = 0.8
        u = random_real_trace_unitary(8, rng)
        t = np.trace(u).real / 8
        v = trace_estimation_unitary(u)
        rho = initial_state(RegisterSpec(n=3, alpha=alpha))
        reduced = partial_trace(v @ rho @ v.conj().T, 2, 8, keep_first=True)
        expected = np.diag([(1 + alpha * t) / 2, (1 - alpha * t) / 2]).astype(complex)
        assert np.abs(reduced - expected).max() <= 1e-12


class TestMu:
    def test_identity(self):
        assert mu_of(np.eye(4, dtype=complex), 1) == 1.0

    def test_bit_flip_on_logical_qubit(self):
        # Direct trace evaluation: sigma^x sigma^z sigma^x = -sigma^z.
        v = tensor(PAULI_X, np.eye(4, dtype=complex))
        assert abs(mu_of(v, 2) + 1.0) <= 1e-12

    def test_path_equality_with_normalized_trace(self):
        # 50 random unitaries spread over n = 1, 2, 3.
        for n, count in ((1, 17), (2, 17), (3, 16)):
            for _ in range(count):
                u = haar(2**n, rng)
                v = trace_estimation_unitary(u)
                assert abs(mu_of(v, n) - np.trace(u).real / 2**n) <= 1e-12

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mu_of(np.eye(4, dtype=complex), 2)


class TestPZero:
    def test_examples(self):
        assert p_zero(1.0, 1.0) == 1.0
        assert p_zero(0.0, 0.3) == 0.5
        assert p_zero(0.5, 1.0) == 0.75

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            p_zero(1.5, 1.0)
        with pytest.raises(ValueError):
            p_zero(0.5, -0.2)


class TestSampleTrace:
    def test_identity_is_deterministic(self):
        spec = RegisterSpec(n=3, alpha=1.0)
        est = sample_trace(spec, np.eye(8, dtype=complex), "z", shots=200, seed=1)
        assert est.estimate == 8.0
        assert est.std_error == 0.0

    def test_iswap_pi_three_sigma(self):
        # Bernoulli mean oracle: Re tr iSWAP(pi) = 2.
        spec = RegisterSpec(n=2, alpha=1.0)
        est = sample_trace(spec, iswap(math.pi), "z", shots=100_000, seed=11)
        assert est.std_error > 0
        assert abs(est.estimate - 2.0) <= 3 * est.std_error

    def test_y_basis_estimates_imaginary_part(self):
        u = np.diag([1, 1, 1j, 1j]).astype(complex)  # tr = 2 + 2i
        spec = RegisterSpec(n=2, alpha=1.0)
        est = sample_trace(spec, u, "y", shots=100_000, seed=3)
        assert abs(est.estimate - 2.0) <= 3 * est.std_error

    def test_error_scales_inversely_with_alpha(self):
        # From the estimator: sigma(alpha) = (2^n/alpha) * 2 sqrt(p(1-p)).
        shots = 100_000
        ests = {}
        for alpha in (1.0, 0.25):
            spec = RegisterSpec(n=2, alpha=alpha)
            ests[alpha] = sample_trace(spec, iswap(math.pi), "z", shots=shots, seed=21)
        expected = {}
        for alpha in (1.0, 0.25):
            p = (1 + alpha * 0.5) / 2
            expected[alpha] = (4 / alpha) * 2 * math.sqrt(p * (1 - p)) / math.sqrt(shots)
        measured_ratio = ests[0.25].std_error / ests[1.0].std_error
        assert abs(measured_ratio - expected[0.25] / expected[1.0]) <= 0.05 * measured_ratio

    def test_coverage_over_seeds(self):
        spec = RegisterSpec(n=2, alpha=0.6)
        hits = 0
        for seed in range(20):
            est = sample_trace(spec, iswap(math.pi), "z", shots=20_000, seed=seed)
            if abs(est.estimate - 2.0) <= 3 * est.std_error:
                hits += 1
        assert hits >= 18

    def test_deterministic_under_seed(self):
        spec = RegisterSpec(n=1, alpha=0.5)
        u = haar(2, rng)
        a = sample_trace(spec, u, "z", shots=5000, seed=42)
        b = sample_trace(spec, u, "z", shots=5000, seed=42)
        assert a == b

    def test_alpha_zero_is_unestimable(self):
        spec = RegisterSpec(n=1, alpha=0.0)
        with pytest.raises(InfiniteTemperatureError):
            sample_trace(spec, np.eye(2, dtype=complex), "z", shots=10, seed=0)

    def test_rejects_bad_shots(self):
        spec = RegisterSpec(n=1, alpha=1.0)
        with pytest.raises(ValueError):
            sample_trace(spec, np.eye(2, dtype=complex), "z", shots=0, seed=0)


class TestNamedUnitary:
    def test_families(self):
        u, n = named_unitary("identity:3")
        assert n == 3 and np.array_equal(u, np.eye(8))
        u, n = named_unitary("iswap:pi")
        assert n == 2 and np.abs(u - iswap(math.pi)).max() == 0.0
        u, n = named_unitary("haar:2:7")
        assert n == 2 and unitarity_residual(u) <= 1e-10
        again, _ = named_unitary("haar:2:7")
        assert np.array_equal(u, again)

    def test_rejects_unknown(self):
        for bad in ("swap:1", "iswap", "haar:2", "identity:x"):
            with pytest.raises(ValueError):
                named_unitary(bad)

    def test_parse_scalar_pi_forms(self):
        assert parse_scalar("2pi") == 2 * math.pi
        assert parse_scalar("pi") == math.pi
        assert parse_scalar("-0.5pi") == -0.5 * math.pi
        assert parse_scalar("0.25") == 0.25


def test_logical_state_populations():
    rho = logical_state(0.4)
    assert np.abs(rho - np.diag([0.7, 0.3])).max() <= 1e-15
