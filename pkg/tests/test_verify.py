import pytest

from jmf import verify as vf


def _run(names, form=None, **kw):
    ctx = vf.Context(form, **kw)
    return {s.name: vf.run_check(s, ctx) for s in vf.select(names, form)}


def test_select_skips_form_checks_without_form():
    names = {s.name for s in vf.select(None, None)}
    assert "mu_hat.S" in names and "polar.three_route" not in names


def test_select_shifted_only_for_shifted_forms(kw42, shifted):
    assert not [s for s in vf.select(["shifted"], kw42)]
    assert {s.name for s in vf.select(["shifted"], shifted)} == {
        "xi.exercised", "gamma_phi.gating", "laurent.D_covariance"}


def test_holomorphic_form_skips_polar_checks(theta_sq):
    names = {s.name for s in vf.select(None, theta_sq)}
    assert "h.periodicity" in names and "polar.three_route" not in names


@pytest.mark.parametrize("seed", [0, 7])
def test_transform_group_passes(seed):
    res = _run(["transform"], seed=seed)
    assert res and all(r.passed for r in res.values()), {k: r.residual for k, r in res.items()}


def test_operator_group_passes():
    res = _run(["operators"])
    assert all(r.passed for r in res.values())


def test_controls_are_lower_bounds():
    res = _run(["controls"])
    assert all(r.bound == "lower" and r.passed for r in res.values())
    assert res["control.corrupted_R"].residual > 1e3 * vf.TOL_R


def test_corrupted_R_breaks_mu_hat_S():
    res = _run(["mu_hat.S"], r_func=vf.corrupted_R)
    assert not res["mu_hat.S"].passed


def test_decompose_and_oracle_groups(kw42):
    res = _run(["decompose", "oracle"], kw42)
    assert len(res) == 7 and all(r.passed for r in res.values())


def test_shifted_group(shifted):
    res = _run(["shifted"], shifted)
    assert all(r.passed for r in res.values())
    assert res["laurent.D_covariance"].detail["used"]


def test_finding_T_phase_prefers_squared_exponent():
    f = vf.finding_mu_hat_T_phase(vf.Context())
    assert all(v["squared"] < 1e-10 for v in f.values())
    # the unsquared exponent agrees only where (l - n/2) is 0 or 1
    assert f["n=2,l=1"]["unsquared"] < 1e-10 and f["n=1,l=0"]["unsquared"] > 0.1


def test_finding_subgroups(kw42):
    f = vf.finding_subgroups(vf.Context(kw42))
    assert f["phiF_hat"] == {"T": True, "T^2": True, "(1,0;2,1)": True, "S": False}
    assert f["rho_hat_sums"] == {"T": False, "T^2": True, "(1,0;2,1)": True, "S": False}


def test_check_result_dict():
    r = vf.CheckResult("x", 0.1, 1.0, True)
    assert r.as_dict()["pass"] is True
