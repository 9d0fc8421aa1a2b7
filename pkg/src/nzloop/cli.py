"""Command-line surface: validate / tau / series / verify / census.

Exit codes: 0 success, 1 verification mismatch, 2 input error, 3 budget or
precision exhaustion.  Identical configurations produce byte-identical
reports on stdout; timings go to stderr.
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click

from .mpnum import PrecisionContext, PrecisionError
from .nzdata import (datum_from_json, load_bundled_datum, bundled_names,
                     validate as validate_datum, find_unimodular_gauge,
                     solve_flattening)
from .field import NoFit
from .oneloop import LevelContext, tau_level_k, tau_alternative
from .perturb import PerturbationContext, loop_series, wick_oracle, complex_volume
from .recognition import (field_tower, fit_with_root_scan, norm_table_entry,
                          unit_power_decompose, load_golden, golden_names,
                          verify_golden)


class InputError(click.ClickException):
    exit_code = 2


def _load(path_or_name: str):
    p = Path(path_or_name)
    if p.exists():
        try:
            return datum_from_json(json.loads(p.read_text()))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise InputError("cannot parse %s: %s" % (path_or_name, exc))
    try:
        return load_bundled_datum(path_or_name)
    except FileNotFoundError:
        raise InputError(
            "no such file or bundled datum %r (bundled: %s)"
            % (path_or_name, ", ".join(bundled_names())))


def _emit(report, fmt, out):
    if fmt == "json":
        text = json.dumps(report, indent=1, sort_keys=True)
    else:
        lines = []

        def walk(obj, indent=""):
            if isinstance(obj, dict):
                for k in sorted(obj):
                    v = obj[k]
                    if isinstance(v, (dict, list)):
                        lines.append("%s%s:" % (indent, k))
                        walk(v, indent + "  ")
                    else:
                        lines.append("%s%s: %s" % (indent, k, v))
            elif isinstance(obj, list):
                for v in obj:
                    walk(v, indent + "  ")
            else:
                lines.append("%s%s" % (indent, obj))

        walk(report)
        text = "\n".join(lines)
    if out:
        Path(out).write_text(text + "\n")
    else:
        click.echo(text)


@click.group()
def main():
    """Perturbative complex Chern-Simons invariants from Neumann-Zagier data."""


common = [
    click.option("--precision", default=300, show_default=True,
                 help="working decimal precision"),
    click.option("--format", "fmt", type=click.Choice(["text", "json"]),
                 default="text", show_default=True),
    click.option("--out", default=None, help="write the report to a file"),
    click.option("--seed", default=0, show_default=True,
                 help="seed for randomized subroutines"),
]


def add_common(cmd):
    for opt in reversed(common):
        cmd = opt(cmd)
    return cmd


@main.command()
@click.argument("inputs", nargs=-1, required=True)
@add_common
def validate(inputs, precision, fmt, out, seed):
    """Validate NZ data; warn and suggest a gauge when |det B| != 1."""
    reports = []
    ok = True
    for item in inputs:
        d = _load(item)
        rep = validate_datum(d, precision)
        entry = {"input": item, **rep.as_dict()}
        if rep.valid and not rep.z_nondegenerate:
            g = find_unimodular_gauge(d)
            entry["warning"] = "|det B| != 1"
            entry["gauge_suggestion"] = None if g is None else \
                {"A": [list(r) for r in g.A], "B": [list(r) for r in g.B],
                 "nu": list(g.nu)}
        reports.append(entry)
        ok = ok and rep.valid
    _emit({"validate": reports}, fmt, out)
    sys.exit(0 if ok else 1)


@main.command()
@click.argument("input", nargs=1)
@click.option("--level", default=1, show_default=True)
@click.option("--ell-bound", default=None, type=int)
@click.option("--height-bound", default=10 ** 6, show_default=True)
@click.option("--recognize/--no-recognize", "do_rec", default=True)
@add_common
def tau(input, level, ell_bound, height_bound, do_rec, precision, fmt, out, seed):
    """The 1-loop invariant tau_{gamma,k}, cross-checked against the
    alternative formula, with optional recognition of tau_k^k/tau_1^k."""
    d = _load(input)
    ctx = PrecisionContext(precision)
    t0 = time.monotonic()
    try:
        lvl = LevelContext(d, level, ctx)
        res = tau_level_k(lvl)
        report = {"knot": d.name, "k": level, "tau": res.tau.serialize(40),
                  "components": {k: v.serialize(25) for k, v in res.components.items()},
                  "branch_record": res.branch_record,
                  "gauss_sum_zero": res.gauss_sum_zero}
        try:
            alt = tau_alternative(lvl)
            ratio = (alt.tau / res.tau) ** (2 * level)
            report["alternative_ratio_2k_dev"] = float((ratio - 1).abs_upper())
        except PrecisionError as exc:
            report["alternative_ratio_2k_dev"] = "skipped: %s" % exc
        if do_rec and level >= 1 and d.field is not None:
            lvl1 = LevelContext(d, 1, ctx)
            tau1 = tau_level_k(lvl1).tau
            if level == 1:
                from .oneloop import tau1_squared_exact
                tinv, _ = tau1_squared_exact(d) if d.shapes_exact() else (None, None)
                if tinv is not None:
                    report["tau1_inv_sq_exact"] = [str(c) for c in tinv.coeffs]
            else:
                F_k = field_tower(d.field, level, ctx)
                try:
                    rec = norm_table_entry(res.tau, tau1, level, F_k, ctx,
                                           height_bound=10 ** 60)
                    report["recognition"] = rec.as_dict()
                    report["norm_display"] = rec.status["display"]
                except NoFit:
                    report["recognition"] = "NoFit"
    except PrecisionError as exc:
        click.echo("precision exhausted: %s" % exc, err=True)
        sys.exit(3)
    _emit(report, fmt, out)


@main.command()
@click.argument("input", nargs=1)
@click.option("--level", default=1, show_default=True)
@click.option("--loops", default=3, show_default=True)
@click.option("--height-bound", default=10 ** 6, show_default=True)
@click.option("--oracle-check/--no-oracle-check", default=False)
@click.option("--dump-diagrams", is_flag=True, default=False,
              help="include the diagram census audit dump in the report")
@add_common
def series(input, level, loops, height_bound, oracle_check, dump_diagrams,
           precision, fmt, out, seed):
    """Loop invariants S_{n,k} via Feynman diagrams, with the formal-Gaussian
    oracle cross-check and recognition into F(zeta_k)."""
    d = _load(input)
    ctx = PrecisionContext(precision)
    t0 = time.monotonic()
    report = {"knot": d.name, "k": level, "loops": loops}
    try:
        lvl = LevelContext(d, level, ctx)
        if loops < 2:
            res = tau_level_k(lvl)
            report["tau"] = res.tau.serialize(40)
            _emit(report, fmt, out)
            return
        if level == 1 and d.shapes_exact() is not None:
            p = PerturbationContext.exact_k1(d, n_max=loops)
            ls = loop_series(p, with_tau=False)
            report["mode"] = "exact"
            report["S"] = {str(n): [str(c) for c in ls.S[n].coeffs]
                           for n in sorted(ls.S)}
            if oracle_check:
                wo = wick_oracle(p)
                report["oracle_agrees"] = all(
                    (wo.S[n] - ls.S[n]).is_zero() for n in sorted(ls.S))
        else:
            p = PerturbationContext.from_level(lvl, n_max=loops)
            ls = loop_series(p, with_tau=False)
            report["mode"] = "numeric"
            report["S"] = {str(n): ls.S[n].serialize(40) for n in sorted(ls.S)}
            if oracle_check:
                wo = wick_oracle(p)
                report["oracle_agrees"] = all(
                    (wo.S[n] - ls.S[n]).abs_upper() < ctx.tol(20)
                    for n in sorted(ls.S))
            if d.field is not None:
                F_k = field_tower(d.field, level, ctx)
                rec = {}
                for n in sorted(ls.S):
                    try:
                        from .field import recognize as rec_fn
                        r = rec_fn(ls.S[n], F_k, ctx, height_bound=height_bound)
                        rec[str(n)] = {"coeffs": _coeffs_out(r.element),
                                       "residual": float(r.residual)}
                    except NoFit:
                        rec[str(n)] = "NoFit"
                report["recognized"] = rec
        vol = complex_volume(lvl)
        report["complex_volume"] = vol.serialize(30)
        if dump_diagrams:
            from .perturb import diagram_census_dump
            report["diagram_census"] = diagram_census_dump(loops)
    except PrecisionError as exc:
        click.echo("precision exhausted: %s" % exc, err=True)
        sys.exit(3)
    _emit(report, fmt, out)


def _coeffs_out(x):
    if hasattr(x, "comps"):
        return [[str(c) for c in comp.coeffs] for comp in x.comps]
    return [str(c) for c in x.coeffs]


@main.command()
@click.option("--golden", "selector", default="all", show_default=True,
              help="golden set: 'all', a knot name, or 'name:k=7'")
@click.option("--loops", default=3, show_default=True)
@click.option("--budget", default=60.0, show_default=True,
              help="integer-factorization budget in seconds")
@add_common
def verify(selector, loops, budget, precision, fmt, out, seed):
    """Verify computed invariants against the bundled golden tables."""
    ctx = PrecisionContext(precision)
    t0 = time.monotonic()
    names = golden_names() if selector == "all" else [selector.split(":")[0]]
    level_filter = None
    if ":" in selector:
        part = selector.split(":", 1)[1]
        if part.startswith("k="):
            level_filter = [int(part[2:])]
    reports = []
    ok = True
    for name in names:
        golden = load_golden(name)
        try:
            datum = load_bundled_datum(name)
        except FileNotFoundError:
            reports.append({"knot": name, "skipped": "no bundled datum"})
            continue
        differs = bool(datum.meta.get("presentation_differs", False))
        rep = verify_golden(datum, golden, ctx, levels=level_filter,
                            n_max=loops, decomp_levels=level_filter or
                            [int(k) for k in golden.get("decomp", {})],
                            presentation_differs=differs,
                            factor_budget=budget)
        reports.append(rep)
        ok = ok and rep["ok"]
    _emit({"verify": reports}, fmt, out)
    sys.exit(0 if ok else 1)


@main.command()
@click.argument("input_dir", required=False)
@click.option("--budget", default=3 ** 12, show_default=True,
              help="gauge search node budget")
@click.option("--level", default=1, show_default=True,
              help="maximum level to exercise per datum")
@add_common
def census(input_dir, budget, level, precision, fmt, out, seed):
    """Batch over a directory of exported NZ JSON files: validation and
    gauge-search success rate."""
    ctx_digits = min(precision, 120)
    entries = []
    if input_dir is None:
        names = bundled_names()
        data = [(n, load_bundled_datum(n)) for n in names]
    else:
        paths = sorted(Path(input_dir).glob("*.json"))
        data = []
        for p in paths:
            try:
                data.append((p.stem, datum_from_json(json.loads(p.read_text()))))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                entries.append({"name": p.stem, "error": str(exc)})
    successes = 0
    for name, d in data:
        rep = validate_datum(d, ctx_digits)
        entry = {"name": name, "valid": rep.valid, "det_B": rep.det_B}
        if abs(rep.det_B) != 1:
            g = find_unimodular_gauge(d, budget=budget)
            entry["gauge_found"] = g is not None
        else:
            entry["gauge_found"] = True
        if entry["gauge_found"]:
            successes += 1
        entries.append(entry)
    report = {"census": entries,
              "z_nondegenerate_rate": "%d/%d" % (successes, len(data)) if data
              else "0/0"}
    _emit(report, fmt, out)
    sys.exit(0)


if __name__ == "__main__":
    main()
