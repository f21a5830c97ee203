"""Command-line entry point: ``jmf eval|decompose|verify|oracle``.

Reports are JSON with sorted keys and shortest-roundtrip floats.  Work items
run on a thread pool capped by ``JMF_THREADS``; results are gathered in
submission order, so parallel and serial output are byte-identical.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BandContainsPole,
    IndexNotIntegral,
    IndexNotPositive,
    JMFError,
    ParseError,
    PathThroughPole,
    PoleCollision,
)
from .numerics import DEFAULT_PRECISION, Precision

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_POLE = 3
EXIT_NUMERIC = 4
EXIT_PATH = 5
EXIT_BAND = 6


@dataclass(frozen=True)
class RunConfig:
    command: str
    form: str | None
    taus: tuple[complex, ...]
    zs: tuple[complex, ...]
    ells: tuple[int, ...]
    precision: Precision
    output: str | None
    terms: int | None = None
    strict_path: bool = False
    height: Fraction | None = None
    checks: tuple[str, ...] | None = None
    corrupt_r: bool = False
    findings: bool = False
    seed: int = 0


def parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j").replace("+-", "-")
    try:
        return complex(t)
    except ValueError as exc:
        raise ParseError(f"not a complex number: {text!r}") from exc


def parse_list(text: str | None, item) -> tuple:
    if text is None:
        return ()
    parts = [x for x in text.split(",") if x.strip()]
    try:
        return tuple(item(x) for x in parts)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def _cx(z: complex) -> dict:
    z = complex(z)
    return {"im": z.imag, "re": z.real}


def workers() -> int:
    env = os.environ.get("JMF_THREADS")
    n = int(env) if env else (os.cpu_count() or 1)
    return max(1, n)


def pmap(fn, items: list) -> list:
    """Ordered map over a thread pool (serial when one worker)."""
    n = min(workers(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


_FLAGS = {"zs": "--z", "taus": "--tau", "ells": "--ell"}


def _require(cfg: RunConfig, *fields: str) -> None:
    for f in fields:
        if not getattr(cfg, f):
            raise ParseError(f"{_FLAGS[f]} list must be nonempty for {cfg.command}")


def _load(cfg: RunConfig):
    from .formspec import load_form

    if cfg.form is None:
        raise ParseError("--form is required")
    try:
        return load_form(cfg.form)
    except OSError as exc:
        raise ParseError(f"cannot read form file: {exc}") from exc


# ---------------------------------------------------------------------------
# commands


def cmd_eval(cfg: RunConfig) -> list[dict]:
    from .formspec import eval_form

    _require(cfg, "zs", "taus")
    form = _load(cfg)
    pts = list(itertools.product(cfg.zs, cfg.taus))

    def one(pt):
        z, tau = pt
        v = complex(eval_form(form, z, tau, cfg.precision))
        return {"tau": _cx(tau), "value_im": v.imag, "value_re": v.real, "z": _cx(z)}

    return pmap(one, pts)


def cmd_decompose(cfg: RunConfig) -> list[dict]:
    from .decompose import completed_finite, completed_polar, finite_part, polar_formula
    from .formspec import eval_form

    _require(cfg, "zs", "taus")
    form = _load(cfg)
    policy = "raise" if cfg.strict_path else "average"
    p = cfg.precision
    pts = list(itertools.product(cfg.zs, cfg.taus))

    def one(pt):
        z, tau = pt
        phi = complex(eval_form(form, z, tau, p))
        fin = complex(finite_part(form, z, tau, p, policy))
        pol = complex(polar_formula(form, z, tau, p))
        fin_h = complex(completed_finite(form, z, tau, p, policy))
        pol_h = complex(completed_polar(form, z, tau, p))
        scale = max(1.0, abs(phi))
        return {
            "completed_residual": abs(fin_h + pol_h - phi) / scale,
            "phi": _cx(phi),
            "phi_F": _cx(fin),
            "phi_F_hat": _cx(fin_h),
            "phi_P": _cx(pol),
            "phi_P_hat": _cx(pol_h),
            "split_residual": abs(fin + pol - phi) / scale,
            "tau": _cx(tau),
            "z": _cx(z),
        }

    return pmap(one, pts)


def cmd_verify(cfg: RunConfig) -> tuple[dict, bool]:
    from . import verify as vf

    form = _load(cfg) if cfg.form else None
    if cfg.checks is not None and not cfg.checks:
        raise ParseError("empty check list")
    specs = vf.select(list(cfg.checks) if cfg.checks else None, form)
    if not specs:
        raise ParseError("no checks selected")
    ctx = vf.Context(form, cfg.seed, cfg.precision, vf.corrupted_R if cfg.corrupt_r else None)
    results = pmap(lambda s: vf.run_check(s, ctx), specs)
    report = {r.name: {"pass": r.passed, "residual": r.residual, "tolerance": r.tolerance} for r in results}
    if cfg.findings:
        report = {"checks": report, "findings": _plain(vf.run_findings(ctx))}
    return report, all(r.passed for r in results)


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "item"):
        return obj.item()
    return obj


def cmd_oracle(cfg: RunConfig) -> list[dict]:
    from .decompose import canonical_h, h_at_height
    from .qexp import band_around, h_band, h_band_canonical

    _require(cfg, "taus")
    form = _load(cfg)
    trunc = cfg.terms or 40
    ells = cfg.ells or tuple(range(2 * form.index))
    band = band_around(form, cfg.height) if cfg.height is not None else None
    policy = "raise" if cfg.strict_path else "average"

    def series(ell):
        if band is None:
            return h_band_canonical(form, ell, trunc)
        return h_band(form, ell, band, trunc)

    table = dict(zip(ells, pmap(series, list(ells))))

    def one(item):
        ell, tau = item
        if band is None:
            hc = complex(canonical_h(form, ell, tau, cfg.precision, policy))
        else:
            hc = complex(h_at_height(form, ell, cfg.height, tau, cfg.precision, policy))
        hb = complex(table[ell].evaluate(tau))
        return {"abs_diff": abs(hc - hb), "ell": ell, "h_band": _cx(hb), "h_contour": _cx(hc), "tau": _cx(tau)}

    return pmap(one, list(itertools.product(ells, cfg.taus)))


COMMANDS = {"eval": cmd_eval, "decompose": cmd_decompose, "verify": cmd_verify, "oracle": cmd_oracle}


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jmf", description="Meromorphic Jacobi form toolkit.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--form", help="form description file (JSON)")
    ap.add_argument("--tau", help="comma-separated tau values, e.g. 1.2i,0.3+1.4i")
    ap.add_argument("--z", help="comma-separated z values")
    ap.add_argument("--ell", help="comma-separated integers")
    ap.add_argument("--terms", type=int, help="series terms (q-orders for oracle)")
    ap.add_argument("--samples", type=int, help="contour samples")
    ap.add_argument("--tol", type=float, help="series tail tolerance")
    ap.add_argument("--json", dest="output", help="write the report here instead of stdout")
    ap.add_argument("--strict-path", action="store_true", help="fail when a canonical path meets a pole")
    ap.add_argument("--height", help="oracle: line height Im z / Im tau as a fraction")
    ap.add_argument("--checks", help="verify: comma-separated check or group names")
    ap.add_argument("--corrupt-r", action="store_true", help="verify: run with a sign-flipped R")
    ap.add_argument("--findings", action="store_true", help="verify: include measured findings")
    ap.add_argument("--seed", type=int, default=0)
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    kw = {}
    if ns.samples is not None:
        kw["contour_samples"] = ns.samples
    if ns.tol is not None:
        kw["target_tol"] = ns.tol
    if ns.terms is not None and ns.command != "oracle":
        kw["series_terms"] = ns.terms
    try:
        prec = DEFAULT_PRECISION.with_(**kw)
        height = Fraction(ns.height) if ns.height is not None else None
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(str(exc)) from exc
    checks = None if ns.checks is None else tuple(x.strip() for x in ns.checks.split(",") if x.strip())
    return RunConfig(
        command=ns.command,
        form=ns.form,
        taus=parse_list(ns.tau, parse_complex),
        zs=parse_list(ns.z, parse_complex),
        ells=parse_list(ns.ell, int),
        precision=prec,
        output=ns.output,
        terms=ns.terms,
        strict_path=ns.strict_path,
        height=height,
        checks=checks,
        corrupt_r=ns.corrupt_r,
        findings=ns.findings,
        seed=ns.seed,
    )


def dumps(report) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def run(cfg: RunConfig) -> tuple[object, int]:
    """Execute a command; returns (report, exit code) and raises library errors."""
    out = COMMANDS[cfg.command](cfg)
    if cfg.command == "verify":
        report, ok = out
        return report, EXIT_OK if ok else EXIT_CHECK_FAILED
    return out, EXIT_OK


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (ParseError, IndexNotIntegral, IndexNotPositive)):
        return EXIT_USAGE
    if isinstance(exc, PathThroughPole):
        return EXIT_PATH
    if isinstance(exc, PoleCollision):
        return EXIT_POLE
    if isinstance(exc, BandContainsPole):
        return EXIT_BAND
    return EXIT_NUMERIC


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        report, code = run(cfg)
    except (JMFError, ArithmeticError) as exc:
        print(f"jmf: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except ValueError as exc:
        print(f"jmf: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = dumps(report)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
