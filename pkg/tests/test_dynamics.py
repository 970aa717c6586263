import numpy as np
import pytest
from numpy.testing import assert_allclose

from laxfactor import dynamics as dyn
from laxfactor import elliptic as ell
from laxfactor.errors import CollisionDetected, NearSingular, StepUnderflow
from laxfactor.models import ModelSpec, PhasePoint, hamiltonian
from laxfactor.rootsys import BCNSpec

Z = 0.21 + 0.13j


def rational_cm(N=3, nu=0.5, spectral=True):
    return ModelSpec("CM", ell.RATIONAL, spectral, nu=nu, N=N)


class TestIntegrator:
    def test_rk4_global_order(self):
        f = lambda y: -1j * y
        errs = []
        for n in (20, 40):
            y = np.array([1.0 + 0j])
            for _ in range(n):
                y = dyn.rk4_step(f, y, 1.0 / n)
            errs.append(abs(y[0] - np.exp(-1j)))
        assert 14 < errs[0] / errs[1] < 18

    def test_free_motion_is_exact(self):
        ph = PhasePoint([0.0, 1.0, 2.0], [0.1, 0.2, -0.3])
        tr = dyn.integrate(rational_cm(nu=0.0, spectral=False), ph, 1.0)
        assert_allclose(tr.final.q, ph.q + ph.p, atol=1e-12)
        assert tr.times[-1] == pytest.approx(1.0)

    def test_energy_conserved(self, rng):
        spec = rational_cm()
        ph = dyn.sample_phase(3, rng, "rational")
        tr = dyn.integrate(spec, ph, 1.0, 1e-11)
        H = [hamiltonian(spec, s) for s in tr.states]
        assert np.max(np.abs(np.array(H) - H[0])) < 1e-9

    def test_collision(self):
        # attractive two-body rational CM falls into the pole
        with pytest.raises(CollisionDetected) as info:
            dyn.integrate(rational_cm(2, nu=1.0, spectral=False), PhasePoint([0.5, -0.5], [0.1, -0.1]), 5.0)
        assert info.value.pair == (0, 1)
        assert 0 < info.value.time < 5

    def test_singular_start(self):
        with pytest.raises(NearSingular):
            dyn.integrate(rational_cm(2), PhasePoint([0.5, 0.5], [0, 0]), 1.0)

    def test_step_budget(self, rng):
        with pytest.raises(StepUnderflow):
            dyn.integrate(rational_cm(), dyn.sample_phase(3, rng, "rational"), 1.0, max_steps=2)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            dyn.integrate(rational_cm(2), PhasePoint([0.5, -0.5], [0, 0]), -1.0)
        with pytest.raises(TypeError):
            dyn.integrate(object(), None, 1.0)

    def test_trajectory_validation(self):
        with pytest.raises(ValueError):
            dyn.Trajectory([0.0, 0.0], [1, 2], None)
        with pytest.raises(ValueError):
            dyn.Trajectory([0.0], [1, 2], None)

    def test_flow_map_reversible(self, rng):
        spec = rational_cm()
        ph = dyn.sample_phase(3, rng, "rational")
        back = dyn.flow_map(spec, dyn.flow_map(spec, ph, 1e-2), -1e-2)
        assert_allclose(back.q, ph.q, atol=1e-10)
        assert_allclose(back.p, ph.p, atol=1e-10)


class TestLaxProfile:
    def test_fit_order(self):
        h = np.array([8, 4, 2, 1]) * 1e-5
        order, rms = dyn.fit_order(h, 3.0 * h ** 2)
        assert order == pytest.approx(2.0)
        assert rms < 1e-12

    def test_cm_profile_passes(self, rng):
        pr = dyn.lax_equation_profile(rational_cm(), dyn.sample_phase(3, rng, "rational"), Z)
        assert pr.passed()
        assert len(pr.steps) == 4

    def test_corrupted_m_fails(self, rng):
        pr = dyn.lax_equation_profile(rational_cm(), dyn.sample_phase(3, rng, "rational"), Z, corrupt=True)
        assert abs(pr.estimated_order) < 0.5
        assert not pr.passed()

    @pytest.mark.parametrize("relativistic", [False, True])
    def test_top_profile(self, relativistic, rng):
        spec = dyn.TopSpec(2, 1j, relativistic, 0.3 if relativistic else None)
        pr = dyn.lax_equation_profile(spec, dyn.sample_spin(2, rng), Z)
        assert pr.passed()

    def test_top_spec_needs_eta(self):
        with pytest.raises(ValueError):
            dyn.TopSpec(2, 1j, relativistic=True)

    def test_bcn_has_no_m(self):
        ph = PhasePoint([0.6, 1.5], [0.1, -0.2])
        with pytest.raises(NotImplementedError):
            dyn.lax_equation_profile(BCNSpec.D(2, 0.5j), ph)


class TestConservation:
    def test_trig_rs(self, rng):
        spec = ModelSpec("RS", ell.TRIG, True, hbar=0.3, c=1.0, N=3)
        ph = dyn.sample_phase(3, rng, "trig", shifts=(0.3, -0.3))
        tr = dyn.integrate(spec, ph, 1.0, 1e-11)
        rep = dyn.conservation_report(tr, Z)
        assert rep.max_drift(3, relative=True) < 1e-7
        assert [r[0] for r in rep.rows] == [1, 2, 3]
        assert "eigenvalues" in rep.as_table()

    def test_top_spectrum(self, rng):
        spec = dyn.TopSpec(2, 1j)
        tr = dyn.integrate(spec, dyn.sample_spin(2, rng), 0.5, 1e-11)
        assert dyn.conservation_report(tr, Z).eigen_drift < 1e-7


class TestSamplers:
    @pytest.mark.parametrize("kind", ["elliptic", "trig", "rational"])
    def test_separation(self, kind, rng):
        ph = dyn.sample_phase(4, rng, kind, 1j if kind == "elliptic" else None, separation=0.2)
        d = np.abs(ph.q[:, None] - ph.q[None, :]) + np.eye(4)
        assert d.min() >= 0.2
        assert np.all(np.abs(ph.p) <= 0.5)

    def test_elliptic_needs_tau(self, rng):
        with pytest.raises(ValueError):
            dyn.sample_phase(2, rng, "elliptic")

    def test_spin_shape(self, rng):
        assert dyn.sample_spin(3, rng).shape == (3, 3)
