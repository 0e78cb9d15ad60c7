import json

import numpy as np
import pytest

from rwstefan import analytic as an
from rwstefan.core import ConfigError, PhysicalParams, SolutionField
from rwstefan.harness import (
    SCENARIOS,
    ConvergenceReport,
    cross_section_error,
    front_error,
    run_convergence,
)

UNIT = PhysicalParams.dimensionless(1.0, 1.0)
LAM = an.solve_lambda(1.0, 1.0, tol=1e-12).lam


def oracle(x, t):
    return an.stefan_T(x, t, UNIT, 1.0, LAM, outside="zero")


def sampled(shift=0.0):
    x = np.arange(0, 1.0, 0.01)
    t = np.array([0.25, 0.5])
    temps = np.stack([oracle(x, tt) for tt in t], axis=1) + shift
    return SolutionField(x=x, t=t, temperatures=temps)


def test_exact_field_has_zero_error():
    assert cross_section_error(sampled(), oracle, 0.5) == (0.0, 0.0)


def test_uniform_shift():
    linf, l2 = cross_section_error(sampled(0.1), oracle, 0.5, (0.0, 0.4))
    assert linf == pytest.approx(0.1)
    assert l2 == pytest.approx(0.1 * np.sqrt(0.01 * 41))


def test_empty_range():
    with pytest.raises(ConfigError):
        cross_section_error(sampled(), oracle, 0.5, (2.0, 3.0))


def test_time_outside_horizon():
    with pytest.raises(ConfigError):
        cross_section_error(sampled(), oracle, 2.0)


def test_l2_triangle_inequality():
    rng = np.random.default_rng(0)
    base = sampled()
    a = SolutionField(x=base.x, t=base.t, temperatures=base.temperatures + rng.normal(0, 0.1, base.temperatures.shape))
    b_temps = base.temperatures + rng.normal(0, 0.1, base.temperatures.shape)
    # d(a, oracle) <= d(a, b) + d(b, oracle)
    d_ab = cross_section_error(a, lambda x, t: b_temps[:, 1][: len(x)], 0.5)[1]
    d_bo = cross_section_error(SolutionField(x=base.x, t=base.t, temperatures=b_temps), oracle, 0.5)[1]
    d_ao = cross_section_error(a, oracle, 0.5)[1]
    assert d_ao <= d_ab + d_bo + 1e-15


def test_front_error_cases():
    t = np.linspace(0, 0.5, 11)
    s_ora = lambda tt: an.stefan_s(tt, UNIT, LAM)
    assert front_error(t, 0.01 + s_ora(t), s_ora, offset=0.01) == pytest.approx(0.0, abs=1e-15)
    assert front_error(t, 0.01 + s_ora(t) - 0.02, s_ora, offset=0.01) == pytest.approx(0.02)
    with pytest.raises(ConfigError):
        front_error([], [], s_ora)


def test_validation():
    with pytest.raises(ConfigError, match="two levels"):
        run_convergence("constant", "n", [1000], range(5))
    with pytest.raises(ConfigError, match="three seeds"):
        run_convergence("constant", "n", [100, 1000], range(2))
    with pytest.raises(ConfigError):
        run_convergence("nope", "n", [100, 1000], range(3))


def test_report_is_deterministic_and_serializes():
    small = SCENARIOS["constant"].__class__("constant", SCENARIOS["constant"].driver, t_max=0.1,
                                           t_star=0.1, x_range=(0.0, 0.2))
    kw = dict(scenario=small, sweep="n", levels=[100, 400], seeds=[0, 1, 2], dx=0.05)
    a, b = run_convergence(**kw), run_convergence(**kw)
    assert a.to_json() == b.to_json()
    data = json.loads(a.to_json())
    assert data["metric"] == "linf" and len(data["errors"]["linf"]) == 2
    assert all(e >= 0 for row in data["errors"]["linf"] for e in row)
    rows = a.to_csv().strip().splitlines()
    assert rows[0].startswith("scenario,sweep,level,seed") and len(rows) == 1 + 2 * 3


def test_verdict_rule():
    rep = ConvergenceReport("c", "n", [1, 2, 3], [0, 1, 2], "linf",
                            {"linf": [[3, 3, 3], [2, 2, 2], [2, 2, 2]]})
    assert not rep.verdict
    rep.errors["linf"][2] = [1, 1, 1]
    assert rep.verdict
