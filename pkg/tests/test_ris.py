import csv
import math

import numpy as np
import pytest

import risthz as rt
from risthz.errors import InvalidInputError
from risthz.ris import TWO_PI


class TestPhaseSet:
    def test_one_bit_span(self):
        pset = rt.build_phase_set(math.radians(306.82), 1)
        assert np.allclose(np.degrees(pset), [0.0, 153.41])

    def test_two_bit_full_circle(self):
        pset = rt.build_phase_set(TWO_PI, 2)
        assert np.allclose(np.degrees(pset), [0.0, 90.0, 180.0, 270.0])

    def test_three_bit_step(self):
        pset = rt.build_phase_set(math.radians(306.82), 3)
        assert pset.size == 8
        assert np.allclose(np.diff(np.degrees(pset)), 306.82 / 8)
        assert np.degrees(pset[1]) == pytest.approx(38.3525)

    def test_zero_bits_rejected(self):
        with pytest.raises(InvalidInputError):
            rt.build_phase_set(math.radians(306.82), 0)

    def test_bad_span_rejected(self):
        with pytest.raises(InvalidInputError):
            rt.build_phase_set(0.0, 2)
        with pytest.raises(InvalidInputError):
            rt.build_phase_set(TWO_PI + 0.1, 2)


class TestQuantize:
    def setup_method(self):
        self.pset = rt.build_phase_set(math.radians(306.82), 1)  # {0, 153.41} deg

    def test_zero_maps_to_zero(self):
        assert rt.quantize_phases(np.array([0.0]), self.pset)[0] == 0.0

    def test_interior_angle(self):
        # 100 deg: 100 to zero vs 53.41 to the upper member
        out = rt.quantize_phases(np.radians([100.0]), self.pset)
        assert np.degrees(out[0]) == pytest.approx(153.41)

    def test_wraparound(self):
        # 350 deg is 10 deg from 0 around the circle
        out = rt.quantize_phases(np.radians([350.0]), self.pset)
        assert out[0] == 0.0

    def test_idempotent(self, rng):
        pset = rt.build_phase_set(math.radians(306.82), 3)
        angles = rng.uniform(-10, 10, 64)
        once = rt.quantize_phases(angles, pset)
        assert np.array_equal(rt.quantize_phases(once, pset), once)

    def test_error_bound(self, rng):
        for b in (1, 2, 3):
            pset = rt.build_phase_set(math.radians(306.82), b)
            step = math.radians(306.82) / 2**b
            wrap_gap = TWO_PI - pset[-1]
            bound = max(step / 2, wrap_gap / 2) + 1e-12
            angles = rng.uniform(0, TWO_PI, 500)
            chosen = rt.quantize_phases(angles, pset)
            diff = np.abs(np.mod(angles, TWO_PI) - chosen)
            circ = np.minimum(diff, TWO_PI - diff)
            assert circ.max() <= bound

    def test_tie_breaks_to_smaller_angle(self):
        pset = rt.build_phase_set(TWO_PI, 2)  # {0, 90, 180, 270} deg
        out = rt.quantize_phases(np.radians([45.0]), pset)
        assert out[0] == 0.0


class TestRisState:
    def test_phi_matrix_zero_phases(self):
        state = rt.initial_state(4, mu_bar=0.8)
        assert np.allclose(rt.phi_matrix(state), 0.8 * np.eye(4))

    def test_diagonal_modulus(self, rng):
        state = rt.initial_state(6).with_phases(rng.uniform(0, TWO_PI, 6))
        phi = rt.phi_matrix(state)
        assert np.allclose(np.abs(np.diag(phi)), state.mu_bar, atol=1e-12)
        assert np.allclose(phi - np.diag(np.diag(phi)), 0.0)

    def test_quantized_membership_enforced(self):
        state = rt.initial_state(2)
        with pytest.raises(InvalidInputError):
            state.with_phases(np.array([0.1, 0.2]), quantized=True)

    def test_mu_bar_range(self):
        with pytest.raises(InvalidInputError):
            rt.initial_state(2, mu_bar=0.4)


class TestGraphene:
    def setup_method(self):
        self.p = rt.GrapheneParams()
        self.omega = 2 * math.pi * 1.6e12

    def test_zero_fermi_prefactor(self):
        # at E_F = 0 the thermal factor collapses to ln 2
        sigma = rt.graphene_conductivity(self.p, 0.0, self.omega)
        e, hbar, kb, t = (
            self.p.elementary_charge,
            self.p.hbar,
            self.p.boltzmann,
            self.p.temperature,
        )
        pref = (2 * e**2 / (math.pi * hbar**2)) * kb * t * math.log(2.0)
        expected = pref * (1j / (self.omega + 1j / self.p.relaxation_time))
        assert sigma == pytest.approx(expected, rel=1e-12)

    def test_magnitude_increases_with_fermi_level(self):
        mags = [abs(rt.graphene_conductivity(self.p, ef, self.omega)) for ef in (0.0, 0.25, 0.5, 1.0, 2.0)]
        assert all(a < b for a, b in zip(mags, mags[1:]))

    def test_scalar_oracle_half_ev(self):
        # independent scalar evaluation, written out term by term
        e, hbar, kb, t, tau = 1.602176634e-19, 1.054571817e-34, 1.380649e-23, 300.0, 1e-13
        x = 0.5 * e / (2 * kb * t)
        pref = (2 * e**2 / (math.pi * hbar**2)) * kb * t * math.log(2 * math.cosh(x))
        expected = pref * 1j / (self.omega + 1j / tau)
        got = rt.graphene_conductivity(self.p, 0.5, self.omega)
        assert got == pytest.approx(expected, rel=1e-9)

    def test_fermi_level_at_cnp(self):
        # residual density keeps E_F slightly above 0 at the neutrality point
        ef = rt.fermi_level_from_voltage(self.p, self.p.v_cnp)
        expected = self.p.hbar * self.p.fermi_velocity * math.sqrt(
            math.pi * self.p.residual_density
        ) / self.p.elementary_charge
        assert ef == pytest.approx(expected, rel=1e-12)

    def test_fermi_level_monotone_in_offset(self):
        vals = [rt.fermi_level_from_voltage(self.p, self.p.v_cnp + dv) for dv in (0.0, 0.5, 1.0, 2.0)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_fermi_level_hand_evaluation(self):
        n_d = math.sqrt((1e15) ** 2 + 1e31 * 1.0**2)
        expected = 1.054571817e-34 * 1e6 * math.sqrt(math.pi * n_d) / 1.602176634e-19
        got = rt.fermi_level_from_voltage(self.p, self.p.v_cnp - 1.0)
        assert got == pytest.approx(expected, rel=1e-12)

    def test_vanishing_conductivity_phase(self):
        # tau -> 0 kills the Drude response, leaving phi = m*pi - a*k0
        dead = rt.GrapheneParams(relaxation_time=1e-30)
        k0 = self.omega / 3.0e8
        expected = dead.mode_integer * math.pi - dead.patch_width * k0
        assert rt.element_phase_response(dead, 1.0, self.omega) == pytest.approx(expected, rel=1e-9)

    def test_phase_continuous_in_fermi_level(self):
        # no branch jumps: differences shrink linearly with the step
        coarse = np.arange(0.0, 2.0, 1e-4)
        phases = np.array([rt.element_phase_response(self.p, ef, self.omega) for ef in coarse])
        assert np.abs(np.diff(phases)).max() < 0.05
        fine = np.arange(0.9, 0.91, 1e-6)
        phases_fine = np.array([rt.element_phase_response(self.p, ef, self.omega) for ef in fine])
        assert np.abs(np.diff(phases_fine)).max() < 1e-3

    def test_principal_branch(self):
        # effective index keeps a nonnegative real part across the sweep
        for ef in np.linspace(0.0, 2.0, 41):
            sigma = rt.graphene_conductivity(self.p, ef, self.omega)
            eps = 1 + 1j * sigma / (self.omega * self.p.vacuum_permittivity * self.p.graphene_thickness)
            assert np.sqrt(eps).real >= 0.0

    def test_reduced_phase_in_circle(self):
        for ef in np.linspace(0.0, 2.0, 21):
            phase = rt.element_phase_response(self.p, ef, self.omega) % TWO_PI
            assert 0.0 <= phase < TWO_PI


class TestCsvExports:
    def test_phase_set_csv(self, tmp_path):
        pset = rt.build_phase_set(math.radians(306.82), 2)
        path = tmp_path / "phase_set.csv"
        rt.export_phase_set_csv(path, pset)
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["index", "phase_deg"]
        assert len(rows) == 5
        assert float(rows[2][1]) == pytest.approx(153.41 / 2)

    def test_graphene_sweep_csv(self, tmp_path):
        path = tmp_path / "sweep.csv"
        p = rt.GrapheneParams()
        rt.export_graphene_sweep_csv(path, p, np.linspace(0, 1, 5), 2 * math.pi * 1.6e12)
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["fermi_level_eV", "sigma_re", "sigma_im", "phase_deg"]
        assert len(rows) == 6
        sigma = rt.graphene_conductivity(p, 0.5, 2 * math.pi * 1.6e12)
        assert float(rows[3][1]) == pytest.approx(sigma.real, rel=1e-8)
