import json
import os
import subprocess
import sys

import pytest

from jmf import cli


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_single_point(forms_dir, capsys):
    code, out, _ = run(["eval", "--form", f"{forms_dir}/theta_squared.json", "--z", "0.1+0.2i", "--tau", "1.1i"], capsys)
    assert code == 0
    recs = json.loads(out)
    assert len(recs) == 1 and set(recs[0]) == {"tau", "value_im", "value_re", "z"}
    from jmf.theta import theta

    v = theta(0.1 + 0.2j, 1.1j) ** 2
    assert recs[0]["value_re"] == v.real and recs[0]["value_im"] == v.imag


def test_eval_at_pole_exit_3(forms_dir, capsys):
    code, _, err = run(["eval", "--form", f"{forms_dir}/kw4_2.json", "--z", "0", "--tau", "1.1i"], capsys)
    assert code == 3 and "PoleCollision" in err


def test_parallel_equals_serial(forms_dir, capsys, monkeypatch):
    zs = ",".join(f"{0.05 + 0.004 * k}{0.01 * k - 0.5:+}i" for k in range(100))
    args = ["eval", "--form", f"{forms_dir}/kw4_2.json", "--z", zs, "--tau", "0.1+1.1i"]
    monkeypatch.setenv("JMF_THREADS", "1")
    _, serial, _ = run(args, capsys)
    monkeypatch.setenv("JMF_THREADS", "8")
    _, parallel, _ = run(args, capsys)
    assert serial == parallel and len(json.loads(serial)) == 100


def test_decompose_kw(forms_dir, capsys):
    code, out, _ = run(["decompose", "--form", f"{forms_dir}/kw4_2.json", "--z", "0.2+0.3i,0.1-0.4i", "--tau", "0.1+1.2i"], capsys)
    assert code == 0
    recs = json.loads(out)
    assert {"phi", "phi_F", "phi_P", "phi_F_hat", "phi_P_hat", "split_residual", "completed_residual"} <= set(recs[0])
    assert all(r["split_residual"] < 1e-5 and r["completed_residual"] < 1e-5 for r in recs)


def test_decompose_holomorphic_has_zero_polar(forms_dir, capsys):
    code, out, _ = run(["decompose", "--form", f"{forms_dir}/theta_squared.json", "--z", "0.2+0.3i", "--tau", "1.2i"], capsys)
    rec = json.loads(out)[0]
    assert rec["phi_P"] == {"im": 0.0, "re": 0.0} and rec["phi_P_hat"] == {"im": 0.0, "re": 0.0}


def test_decompose_strict_path_exit_5(forms_dir, capsys):
    code, _, _ = run(["decompose", "--form", f"{forms_dir}/kw4_2.json", "--z", "0.2+0.3i", "--tau", "1.2i", "--strict-path"], capsys)
    assert code == 5


def test_verify_json_and_exit(forms_dir, tmp_path, capsys):
    out = tmp_path / "v.json"
    code, _, _ = run(["verify", "--checks", "transform,controls", "--json", str(out)], capsys)
    rep = json.loads(out.read_text())
    assert code == 0 and all(set(v) == {"pass", "residual", "tolerance"} for v in rep.values())
    assert list(rep) == sorted(rep)


def test_verify_corrupted_R_fails(capsys):
    code, out, _ = run(["verify", "--checks", "mu_hat.S", "--corrupt-r"], capsys)
    assert code == 1 and json.loads(out)["mu_hat.S"]["pass"] is False


def test_verify_empty_check_list(capsys):
    assert run(["verify", "--checks", ""], capsys)[0] == 2
    assert run(["verify", "--checks", "no.such.check"], capsys)[0] == 2


def test_verify_findings(forms_dir, capsys):
    code, out, _ = run(["verify", "--form", f"{forms_dir}/kw4_2.json", "--checks", "h.periodicity", "--findings"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["findings"]["subgroups"]["rho_hat_sums"]["T"] is False


def test_oracle(forms_dir, capsys):
    code, out, _ = run(["oracle", "--form", f"{forms_dir}/kw4_2.json", "--tau", "1.2i,0.3+1.4i", "--ell", "0,1,2"], capsys)
    recs = json.loads(out)
    assert code == 0 and len(recs) == 6 and all(r["abs_diff"] < 1e-8 for r in recs)
    code, out, _ = run(["oracle", "--form", f"{forms_dir}/theta_squared.json", "--tau", "1.2i"], capsys)
    assert all(r["abs_diff"] < 1e-10 for r in json.loads(out))


def test_oracle_off_canonical_height(forms_dir, capsys):
    code, out, _ = run(["oracle", "--form", f"{forms_dir}/shifted4_2.json", "--tau", "1.2i", "--height", "1/5"], capsys)
    assert code == 0 and all(r["abs_diff"] < 1e-8 for r in json.loads(out))


def test_oracle_invalid_band_exit_6(forms_dir, capsys):
    assert run(["oracle", "--form", f"{forms_dir}/kw4_2.json", "--tau", "1.2i", "--height", "0"], capsys)[0] == 6


@pytest.mark.parametrize(
    "args",
    [
        ["eval", "--form", "/nonexistent.json", "--z", "0.1", "--tau", "1i"],
        ["eval", "--z", "0.1", "--tau", "1i"],
        ["eval", "--form", "FORMS/kw4_2.json", "--tau", "1i"],
        ["eval", "--form", "FORMS/kw4_2.json", "--z", "abc", "--tau", "1i"],
        ["eval", "--form", "FORMS/kw4_2.json", "--z", "0.1", "--tau=-1i"],
        ["eval", "--form", "FORMS/kw4_2.json", "--z", "0.1", "--tau", "1i", "--samples", "3"],
    ],
)
def test_usage_errors_exit_2(args, forms_dir, capsys):
    args = [a.replace("FORMS", forms_dir) for a in args]
    assert run(args, capsys)[0] == 2


def test_bad_form_file_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"factors": [{"beta": 0, "exponent": 3}]}')
    code, _, err = run(["eval", "--form", str(bad), "--z", "0.1", "--tau", "1i"], capsys)
    assert code == 2 and "IndexNotIntegral" in err


def test_argparse_unknown_command():
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2


def test_console_script(forms_dir):
    exe = os.path.join(os.path.dirname(sys.executable), "jmf")
    cmd = [exe] if os.path.exists(exe) else [sys.executable, "-m", "jmf.cli"]
    proc = subprocess.run(cmd + ["eval", "--form", f"{forms_dir}/theta_squared.json", "--z", "0.1", "--tau", "1i"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0 and json.loads(proc.stdout)[0]["z"] == {"im": 0.0, "re": 0.1}
