import pytest

from tvdp import PrivacyBudget, tv_feasibility_cap


def budget_grid():
    """Feasible budgets spanning the composition-relevant parameter space."""
    out = []
    for eps in (0.25, 0.5, 1.0, 2.0):
        for delta in (0.0, 0.05, 0.1):
            cap = tv_feasibility_cap(eps, delta)
            for eta in (delta, 0.5 * (delta + cap), cap):
                out.append(PrivacyBudget(eps, delta, eta))
    return out


@pytest.fixture(scope="session")
def budgets():
    return budget_grid()
