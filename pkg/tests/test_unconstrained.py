import numpy as np
import pytest
from scipy.optimize import brentq

import oracles
from sircap.dynamics import integrate
from sircap.finalsize import final_susceptible
from sircap.model import ControlSchedule
from sircap.unconstrained import (late_start_threshold, postponement_gain,
                                  solve_unconstrained, unconstrained_peak)

from conftest import fast_params


def policy_value(params, t_start, duration, step=0.01):
    sched = ControlSchedule.three_phase(params, t_start, duration)
    traj = integrate(params, sched, step)
    return final_susceptible(float(traj.x[-1]), float(traj.y[-1]),
                             params.sigma_f).x_inf


class TestPostponementGain:
    def test_zero_budget_means_zero_gain(self):
        p = fast_params(tau=0.0)
        for t in (0.0, 20.0, 79.5):
            assert postponement_gain(p, t) == 0.0

    def test_matches_adaptive_quadrature(self):
        p = fast_params(tau=20.0)
        free = oracles.free_path(p)
        for t in (10.0, 35.0, 50.0, 62.0, 75.0):
            ref = oracles.postponement_gain(p, t, free)
            got = postponement_gain(p, t)
            assert got == pytest.approx(ref, abs=1e-6 * max(1.0, abs(ref)))

    def test_threshold_is_reciprocal_of_infected(self):
        p = fast_params(tau=20.0)
        free = oracles.free_path(p)
        for t in (62.0, 70.0, 78.0):
            y_ref = free.sol(t)[1]
            assert late_start_threshold(p, t) == pytest.approx(
                1.0 / (p.gamma * y_ref), rel=1e-8)
            assert late_start_threshold(p, t) > 0.0


class TestSolveCases:
    def test_start_immediately_when_past_herd(self):
        # starting below the herd level, waiting never pays
        p = fast_params(x0=0.55, y0=0.01)
        pol = solve_unconstrained(p)
        assert pol.case_label == "1.1"
        assert pol.t_start == 0.0 and pol.duration == p.tau

    def test_interior_zero_against_scipy(self):
        p = fast_params(tau=20.0)
        pol = solve_unconstrained(p)
        assert pol.case_label == "1.2"
        assert pol.duration == p.tau
        free = oracles.free_path(p)
        t_ref = brentq(lambda t: oracles.postponement_gain(p, t, free),
                       0.0, p.horizon - p.tau, xtol=1e-9)
        assert pol.t_start == pytest.approx(t_ref, abs=1e-5)

    def test_edge_start_case(self):
        p = fast_params(tau=27.0)
        pol = solve_unconstrained(p)
        assert pol.case_label == "1.3"
        assert pol.t_start == pytest.approx(p.horizon - p.tau, abs=1e-12)
        assert pol.duration == p.tau

    def test_shortened_quarantine_case_against_scipy(self):
        p = fast_params(tau=28.0)
        pol = solve_unconstrained(p)
        assert pol.case_label == "1.4"
        assert pol.t_start + pol.duration == pytest.approx(p.horizon, abs=1e-12)
        assert pol.duration < p.tau
        free = oracles.free_path(p)

        def excess(t):
            y = free.sol(t)[1]
            return oracles.postponement_gain(p, t, free) - 1.0 / (p.gamma * y)

        t_ref = brentq(excess, p.horizon - p.tau, p.horizon - 1e-9, xtol=1e-9)
        assert pol.t_start == pytest.approx(t_ref, abs=1e-5)

    def test_dispatch_consistent_with_gain_signs(self):
        for tau, case in ((20.0, "1.2"), (27.0, "1.3"), (28.0, "1.4")):
            p = fast_params(tau=tau)
            pol = solve_unconstrained(p)
            assert pol.case_label == case
            edge = p.horizon - p.tau
            w_edge = postponement_gain(p, edge)
            if case == "1.2":
                assert postponement_gain(p, 0.0) > 0.0 and w_edge <= 0.0
                assert postponement_gain(p, pol.t_start) == pytest.approx(0.0, abs=1e-4)
            elif case == "1.3":
                assert 0.0 < w_edge <= late_start_threshold(p, edge)
            else:
                assert w_edge > late_start_threshold(p, edge)
                diff = (postponement_gain(p, pol.t_start)
                        - late_start_threshold(p, pol.t_start))
                assert diff == pytest.approx(0.0, abs=1e-3)

    def test_budget_used_exactly_when_duration_is_tau(self):
        p = fast_params(tau=20.0)
        pol = solve_unconstrained(p)
        traj = integrate(p, pol.schedule, 0.01)
        assert traj.budget_value() == pytest.approx(p.budget_floor(), abs=1e-8)

    @pytest.mark.parametrize("tau", [20.0, 28.0])
    def test_local_optimality(self, tau):
        p = fast_params(tau=tau)
        pol = solve_unconstrained(p)
        base = policy_value(p, pol.t_start, pol.duration)
        assert base == pytest.approx(pol.x_inf_achieved, abs=1e-12)
        for dt in (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0):
            t_alt = pol.t_start + dt
            mu_alt = min(p.tau, p.horizon - t_alt)
            if t_alt < 0.0:
                continue
            assert policy_value(p, t_alt, mu_alt) <= base + 1e-12
        for dmu in (0.5, 1.0, 2.0):
            mu_alt = pol.duration - dmu     # admissible: shorter quarantine
            if mu_alt >= 0.0:
                assert policy_value(p, pol.t_start, mu_alt) <= base + 1e-12


class TestPeak:
    def test_peak_sits_at_quarantine_start(self):
        p = fast_params(tau=20.0)
        pol = solve_unconstrained(p)
        t_peak, y_max = unconstrained_peak(p)
        assert t_peak == pytest.approx(pol.t_start, abs=1e-4)
        assert 0.0 < y_max < 1.0

    def test_peak_against_dense_scan(self):
        p = fast_params(tau=20.0)
        pol = solve_unconstrained(p)
        traj = integrate(p, pol.schedule, 0.001)
        _, y_max = unconstrained_peak(p)
        assert y_max == pytest.approx(float(traj.y.max()), abs=1e-9)
