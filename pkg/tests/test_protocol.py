import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeqst.dynamics import BathSpec, amplitudes_analytic, amplitudes_fulltree_oracle
from treeqst.protocol import (
    ProtocolAborted,
    ProtocolParams,
    QubitState,
    average_fidelity_closed,
    average_fidelity_natural,
    average_fidelity_numeric,
    average_success_probability,
    bloch_average,
    conditional_fidelity,
    natural_fidelity,
    optimal_qmr_strength,
    optimal_success_probability,
    transfer,
    transfer_from_amplitude,
    weak_measurement,
)
from treeqst.tree import TreeSpec
from treeqst.verify import brute_force_target_dm

unit = st.floats(0.0, 1.0)
p_open = st.floats(0.0, 0.999)
thetas = st.floats(0.0, np.pi)
phis = st.floats(0.0, 2 * np.pi)
f_complex = st.builds(lambda r, a: np.sqrt(r) * np.exp(1j * a), st.floats(1e-6, 1.0), phis)

LN2 = np.log(2)


class TestWeakMeasurement:
    def test_identity(self):
        psi, prob = weak_measurement(QubitState(1.1, 0.4), 0.0)
        np.testing.assert_allclose(psi, QubitState(1.1, 0.4).amplitudes)
        assert prob == 1.0

    def test_excited_state(self):
        psi, prob = weak_measurement(QubitState(np.pi, 0.0), 0.7)
        assert prob == pytest.approx(0.3)
        np.testing.assert_allclose(np.abs(psi), [0, 1], atol=1e-15)

    def test_equator(self):
        _, prob = weak_measurement(QubitState(np.pi / 2), 0.6)
        assert prob == pytest.approx(0.7)

    @pytest.mark.parametrize("p", [-0.1, 1.0, 1.5])
    def test_rejects(self, p):
        with pytest.raises(ValueError):
            weak_measurement(QubitState(1.0), p)


class TestOptimalQ:
    def test_examples(self):
        assert optimal_qmr_strength(0.0, 1.0) == 0.0
        assert optimal_qmr_strength(0.999999, 0.7) == pytest.approx(1.0, abs=1e-5)
        assert optimal_qmr_strength(0.2, np.sqrt(0.5)) == pytest.approx(0.6)

    @given(p_open, f_complex)
    def test_in_unit_interval(self, p, f):
        assert 0 <= optimal_qmr_strength(p, f) <= 1

    def test_unnormalised_amplitude(self):
        with pytest.raises(ValueError):
            optimal_qmr_strength(0.1, 1.01)


class TestTransfer:
    def test_lossless(self):
        out = transfer_from_amplitude(QubitState(1.2, 2.0), 0.0, 1.0)
        assert out.fidelity == pytest.approx(1.0)
        assert out.success_probability == pytest.approx(1.0)

    @pytest.mark.parametrize("p", [0.0, 0.5, 0.9])
    def test_ground_state_untouched(self, p):
        out = transfer_from_amplitude(QubitState(0.0), p, 0.3 * np.exp(0.2j))
        assert out.fidelity == pytest.approx(1.0)

    @pytest.mark.parametrize("p,f", [(0.3, 0.0), (0.0, 0j)])
    def test_aborts(self, p, f):
        with pytest.raises(ProtocolAborted):
            transfer_from_amplitude(QubitState(1.0), p, f)

    def test_tree_example_against_bloch_integrand_and_partial_trace(self):
        spec, bath = TreeSpec(4), BathSpec(1.0, 0.5)
        t = np.linspace(0, 5, 11)
        traj = amplitudes_analytic(t, spec, bath)
        state, params = QubitState(np.pi / 2, 0.0), ProtocolParams(0.6, 15)
        out = transfer(state, params, traj, 5.0)
        f = traj.transfer_amplitude(15)[-1]
        assert out.transfer_amplitude == pytest.approx(f)
        assert out.fidelity == pytest.approx(conditional_fidelity(state, 0.6, abs(f)), abs=1e-12)

        ft = amplitudes_fulltree_oracle(t, spec, bath)
        rho = brute_force_target_dm(state, 0.6, out.qmr_strength, ft.site_amplitudes[-1], 15)
        np.testing.assert_allclose(out.reduced_dm, rho, atol=1e-7)

    def test_time_not_on_grid(self):
        traj = amplitudes_analytic(np.linspace(0, 1, 3), TreeSpec(2), BathSpec())
        with pytest.raises(ValueError):
            transfer(QubitState(1.0), ProtocolParams(0.1, 2), traj, 0.3)

    def test_params_generation(self):
        assert ProtocolParams(0.1, 12).target_generation == 4

    @given(thetas, phis, p_open, f_complex)
    @settings(max_examples=200)
    def test_outcome_invariants(self, th, ph, p, f):
        out = transfer_from_amplitude(QubitState(th, ph), p, f)
        rho = out.reduced_dm
        np.testing.assert_allclose(rho, rho.conj().T, atol=1e-14)
        assert np.trace(rho).real == pytest.approx(1.0)
        assert np.min(np.linalg.eigvalsh(rho)) > -1e-12
        assert -1e-12 <= out.fidelity <= 1 + 1e-12
        assert 0 <= out.success_probability <= 1 + 1e-12
        assert out.success_probability == pytest.approx(optimal_success_probability(QubitState(th), p, f), abs=1e-14)

    @given(st.floats(0.05, np.pi - 0.05), phis, p_open, f_complex)
    def test_phase_correction_restores_phase(self, th, ph, p, f):
        rho = transfer_from_amplitude(QubitState(th, ph), p, f).reduced_dm
        diff = np.angle(rho[1, 0]) - ph
        assert abs(np.angle(np.exp(1j * diff))) < 1e-9

    def test_general_q_probability(self):
        st_ = QubitState(1.0, 0.0)
        p, q, f = 0.3, 0.45, 0.6
        c2, s2 = np.cos(0.5) ** 2, np.sin(0.5) ** 2
        expect = (1 - q) * c2 + (1 - p) * s2 * f**2 + (1 - p) * (1 - q) * s2 * (1 - f**2)
        assert transfer_from_amplitude(st_, p, f, q).success_probability == pytest.approx(expect)


class TestAverages:
    def test_closed_limits(self):
        assert average_fidelity_closed(0.0, 0.0) == pytest.approx(1.5 - LN2, abs=1e-12)
        assert average_fidelity_closed(1.0, 0.3) == 1.0
        assert average_fidelity_closed(0.5, 1.0) == 1.0
        assert average_fidelity_closed(0.0, np.sqrt(1 - 1e-6)) > 1 - 1e-6

    def test_closed_series_branch_continuous(self):
        x = np.array([1e-3 * (1 - 1e-9), 1e-3 * (1 + 1e-9)])
        vals = average_fidelity_closed(0.0, np.sqrt(1 - x))
        assert abs(vals[0] - vals[1]) < 1e-12

    def test_closed_range(self):
        x = np.linspace(0, 1, 1001)
        F = average_fidelity_closed(0.0, np.sqrt(1 - x))
        assert np.all(np.diff(F) < 0)
        assert F[-1] >= 1.5 - LN2 - 1e-15 and F[0] == 1.0

    def test_p099(self):
        f = np.linspace(1e-3, 1, 200)
        assert np.all(average_fidelity_closed(0.99, f) > 0.99)

    @pytest.mark.parametrize(
        "p,f2,expect",
        [(0.0, 0.0, 1.5 - LN2), (0.4, 1.0, 1.0), (0.6, 0.3, None)],
    )
    def test_numeric(self, p, f2, expect):
        val = average_fidelity_numeric(p, np.sqrt(f2))
        ref = average_fidelity_closed(p, np.sqrt(f2)) if expect is None else expect
        assert val == pytest.approx(ref, abs=1e-9 if f2 == 1.0 else 1e-6)

    def test_post_measurement_reference_does_not_reproduce_average(self):
        num = average_fidelity_numeric(0.6, np.sqrt(0.3), reference="post_wm")
        assert abs(num - average_fidelity_closed(0.6, np.sqrt(0.3))) > 1e-3

    def test_natural(self):
        assert average_fidelity_natural(1.0) == 1.0
        assert average_fidelity_natural(0.0) == 0.5
        assert average_fidelity_natural(np.sqrt(0.5)) == pytest.approx(0.5 + 1 / (3 * np.sqrt(2)) + 1 / 12)

    @pytest.mark.parametrize("f", [0.0, 0.3, 0.77, 1.0])
    def test_natural_is_bloch_average(self, f):
        assert bloch_average(lambda s: natural_fidelity(s, f)) == pytest.approx(average_fidelity_natural(f), abs=1e-9)

    def test_success_examples(self):
        assert average_success_probability(0.0, 1.0) == 1.0
        assert average_success_probability(1.0, 0.5) == 0.0
        assert average_success_probability(0.2, np.sqrt(0.5)) == pytest.approx(0.48)

    @given(p_open, st.floats(0.0, 1.0))
    @settings(max_examples=30, deadline=None)
    def test_success_is_bloch_average(self, p, f):
        num = bloch_average(lambda s: optimal_success_probability(s, p, f))
        assert num == pytest.approx(average_success_probability(p, f), abs=1e-9)

    @given(st.floats(0.0, 0.99), st.floats(0.0, 0.99), st.floats(1e-3, 1.0))
    def test_monotone_in_p(self, p1, p2, f):
        lo, hi = sorted((p1, p2))
        assert average_fidelity_closed(hi, f) >= average_fidelity_closed(lo, f) - 1e-15
        if hi > lo + 1e-9:
            assert average_success_probability(hi, f) < average_success_probability(lo, f)

    @given(unit, unit)
    def test_protocol_beats_natural(self, p, f):
        assert average_fidelity_closed(min(p, 1.0), f) >= average_fidelity_natural(f) - 1e-12
