import numpy as np
import pytest

import oracles
from xxzchain.hamiltonian import (
    build_hamiltonian,
    build_phenomenological_two_spin,
    dense_spectrum,
    sample_disorder,
)
from xxzchain.observables import entropy_record
from xxzchain.propagator import (
    KrylovConfig,
    PropagationError,
    evolve_on_grid,
    exact_expv,
    lanczos_expv,
)
from xxzchain.states import product_state


def fidelity(a, b):
    return abs(np.vdot(a, b))


@pytest.fixture(scope="module")
def mbl_system():
    d = sample_disorder(8, 5.0, seed=41)
    h = build_hamiltonian(8, 1.0, 1.0, d)
    return h, dense_spectrum(h), product_state("neel_x", 8)


class TestKrylovConfig:
    def test_defaults(self):
        cfg = KrylovConfig()
        assert cfg.m == 30
        assert cfg.tolerance == 1e-10
        assert cfg.reorth == "full"

    @pytest.mark.parametrize(
        "kwargs", [{"m": 1}, {"tolerance": 0.0}, {"tolerance": -1e-9}, {"reorth": "partial"}]
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            KrylovConfig(**kwargs)


class TestLanczosExpv:
    def test_zero_step_is_identity(self, mbl_system):
        h, _, psi = mbl_system
        out = lanczos_expv(h, psi, 0.0)
        np.testing.assert_array_equal(out, psi)

    def test_diagonal_hamiltonian_basis_state_phase(self):
        d = sample_disorder(4, 5.0, seed=43)
        h = build_hamiltonian(4, 1.0, 0.0, d)  # diagonal
        psi = np.zeros(16, dtype=complex)
        psi[9] = 1.0
        tau = 3.7
        out = lanczos_expv(h, psi, tau)
        expected = np.exp(-1j * h.matrix.diagonal()[9] * tau)
        assert abs(out[9] - expected) < 1e-12
        rec = entropy_record(out)
        np.testing.assert_allclose(rec.site_entropies, 0.0, atol=1e-10)

    def test_long_step_matches_dense_oracle(self, mbl_system):
        h, eig, psi = mbl_system
        out = lanczos_expv(h, psi, 100.0)
        assert fidelity(exact_expv(eig, psi, 100.0), out) >= 1 - 1e-8

    def test_matches_scipy_expm(self):
        # second, library-independent oracle on a small system
        d = sample_disorder(5, 3.0, seed=47)
        h = build_hamiltonian(5, 1.0, 1.0, d)
        psi = product_state("neel_y", 5)
        out = lanczos_expv(h, psi, 7.3)
        ref = oracles.expm_evolve(h.matrix.toarray(), psi, 7.3)
        assert np.linalg.norm(out - ref) < 1e-9

    def test_backward_evolution_inverts_forward(self, mbl_system):
        h, _, psi = mbl_system
        there = lanczos_expv(h, psi, 5.0)
        back = lanczos_expv(h, there, -5.0)
        assert fidelity(back, psi) >= 1 - 1e-10

    def test_time_additivity(self, mbl_system):
        h, _, psi = mbl_system
        two_steps = lanczos_expv(h, lanczos_expv(h, psi, 4.0), 4.0)
        one_step = lanczos_expv(h, psi, 8.0)
        assert abs(1 - fidelity(two_steps, one_step)) < 1e-9

    def test_unnormalized_input_rejected(self, mbl_system):
        h, _, psi = mbl_system
        with pytest.raises(ValueError):
            lanczos_expv(h, 1.5 * psi, 1.0)

    def test_nonfinite_step_rejected(self, mbl_system):
        h, _, psi = mbl_system
        with pytest.raises(ValueError):
            lanczos_expv(h, psi, np.inf)

    def test_eigenstate_breakdown_is_exact(self, mbl_system):
        h, eig, _ = mbl_system
        psi = eig.eigenvectors[:, 3].astype(complex)
        out = lanczos_expv(h, psi, 50.0)
        assert abs(fidelity(out, psi) - 1.0) < 1e-10

    def test_substep_budget_exhaustion_reports_estimate(self, mbl_system):
        h, _, psi = mbl_system
        cfg = KrylovConfig(m=4, tolerance=1e-12, max_substeps=2)
        with pytest.raises(PropagationError) as err:
            lanczos_expv(h, psi, 1e4, cfg)
        assert err.value.error_estimate is not None

    @pytest.mark.parametrize("reorth", ["full", "none"])
    def test_reorth_policies_agree_with_oracle(self, mbl_system, reorth):
        h, eig, psi = mbl_system
        cfg = KrylovConfig(m=30, tolerance=1e-10, reorth=reorth)
        out = lanczos_expv(h, psi, 100.0, cfg)
        assert fidelity(exact_expv(eig, psi, 100.0), out) >= 1 - 1e-8


class TestExactExpv:
    def test_zero_time(self, mbl_system):
        _, eig, psi = mbl_system
        np.testing.assert_allclose(exact_expv(eig, psi, 0.0), psi, atol=1e-13)

    def test_eigenstate_picks_up_global_phase(self, mbl_system):
        _, eig, _ = mbl_system
        psi = eig.eigenvectors[:, 10].astype(complex)
        out = exact_expv(eig, psi, 2.5)
        assert abs(fidelity(out, psi) - 1.0) < 1e-12

    def test_two_spin_amplitudes(self):
        # hand-derived evolution of our neel_x under the diagonal two-spin
        # model: amplitude(config) = amp0(config) * exp(-i E(config) t)
        v = 0.25
        h = build_phenomenological_two_spin(v)
        eig = dense_spectrum(h)
        psi0 = product_state("neel_x", 2)
        t = 1.234
        out = exact_expv(eig, psi0, t)
        energies = h.matrix.diagonal()  # (-2+v, -v, -v, 2+v) over b=0..3
        expected = psi0 * np.exp(-1j * energies * t)
        np.testing.assert_allclose(out, expected, atol=1e-13)
        np.testing.assert_allclose(np.abs(out), 0.5, atol=1e-13)

    def test_dimension_mismatch(self, mbl_system):
        _, eig, _ = mbl_system
        with pytest.raises(ValueError):
            exact_expv(eig, np.ones(4) / 2.0, 1.0)


class TestEvolveOnGrid:
    def test_single_point_grid_sees_initial_state(self, mbl_system):
        h, _, psi = mbl_system
        results = evolve_on_grid(h, psi, np.array([0.0]))
        assert len(results) == 1
        t, state = results[0]
        assert t == 0.0
        np.testing.assert_allclose(state, psi, atol=0)

    def test_flip_flop_rabi_oscillation(self):
        # two sites, no zz, no fields: return probability cos^2(t/2)
        h = build_hamiltonian(2, 0.0, 1.0, np.zeros(2), "open")
        psi = np.zeros(4, dtype=complex)
        psi[0b01] = 1.0
        times = np.linspace(0.0, 12.0, 49)[1:]
        results = evolve_on_grid(h, psi, times)
        probs = np.array([abs(state[0b01]) ** 2 for _, state in results])
        np.testing.assert_allclose(probs, np.cos(times / 2) ** 2, atol=1e-10)

    def test_sector_blocked_matches_full_space(self):
        d = sample_disorder(6, 10.0, seed=53)
        h = build_hamiltonian(6, 1.0, 1.0, d)
        psi = product_state("neel_x", 6)
        times = np.logspace(-1, 1.3, 40)
        obs = lambda t, p: entropy_record(p, t)
        full = evolve_on_grid(h, psi, times, observer=obs)
        blocked = evolve_on_grid(h, psi, times, observer=obs, sector_blocked=True)
        for rec_f, rec_b in zip(full, blocked):
            np.testing.assert_allclose(
                rec_b.site_entropies, rec_f.site_entropies, atol=1e-8
            )

    def test_norm_and_energy_conserved_along_trajectory(self, mbl_system):
        h, _, psi = mbl_system
        e0 = np.vdot(psi, h.matrix @ psi).real
        times = np.logspace(-1, 2, 60)
        results = evolve_on_grid(h, psi, times)
        for _, state in results:
            assert abs(np.linalg.norm(state) - 1.0) < 1e-9
            e_t = np.vdot(state, h.matrix @ state).real
            assert abs(e_t - e0) < 1e-8 * h.max_abs

    @pytest.mark.parametrize("length,w", [(4, 1.0), (8, 10.0), (10, 1.0)])
    def test_oracle_equivalence_at_t100(self, length, w):
        d = sample_disorder(length, w, seed=59)
        h = build_hamiltonian(length, 1.0, 1.0, d)
        eig = dense_spectrum(h)
        psi = product_state("neel_x", length)
        (_, out), = evolve_on_grid(h, psi, np.array([100.0]))
        assert fidelity(exact_expv(eig, psi, 100.0), out) >= 1 - 1e-8

    def test_unsorted_grid_rejected(self, mbl_system):
        h, _, psi = mbl_system
        with pytest.raises(ValueError):
            evolve_on_grid(h, psi, np.array([1.0, 0.5]))
        with pytest.raises(ValueError):
            evolve_on_grid(h, psi, np.array([-1.0, 0.5]))

    def test_failure_reports_interval(self, mbl_system):
        h, _, psi = mbl_system
        cfg = KrylovConfig(m=4, tolerance=1e-12, max_substeps=2)
        with pytest.raises(PropagationError) as err:
            evolve_on_grid(h, psi, np.array([0.0, 5e3]), cfg=cfg)
        assert err.value.interval is not None
        assert err.value.interval[1] == 5e3
