import pytest

from sircap.model import EpidemicParams


def paper_params(cap: float, tau: float) -> EpidemicParams:
    """The 365-day scenario family used for the headline comparisons."""
    return EpidemicParams(gamma=0.1, sigma_s=0.8, sigma_f=1.5, horizon=365.0,
                          tau=tau, cap=cap, x0=1.0 - 1e-6, y0=1e-6)


def fast_params(cap: float = 0.5, tau: float = 20.0, horizon: float = 80.0,
                x0: float = 1.0 - 1e-4, y0: float = 1e-4) -> EpidemicParams:
    """A quick 80-day family (gamma=0.25) covering every case label:
    cap=0.5 never binds (1.2 at tau=20, 1.3 at 27, 1.4 at 28; 1.1 from
    x0=0.55, y0=0.01); cap=0.05 binds (2.1 at tau=10, 2.2 at 24.5,
    2.3 at 30)."""
    return EpidemicParams(gamma=0.25, sigma_s=0.6, sigma_f=1.6, horizon=horizon,
                          tau=tau, cap=cap, x0=x0, y0=y0)


@pytest.fixture(scope="session")
def fast_case2_policy():
    from sircap.constrained import solve_constrained
    return solve_constrained(fast_params(cap=0.05, tau=10.0))


@pytest.fixture(scope="session")
def fast_geometry():
    from sircap.constrained import compute_geometry
    return compute_geometry(fast_params(cap=0.05, tau=10.0))
