"""``poissonkit`` command line: run manifest checks and write reports.

Exit codes: 0 all checks pass, 1 some check fails (or warns, with
``--strict``), 2 the manifest is unusable or a check hit an input error.
"""
from __future__ import annotations

import functools
import json
import sys
from pathlib import Path
from typing import Optional

import click

from .checks import ERROR, Options, Report, run_checks
from .manifest import ManifestError, resolve


def _common(f):
    @click.argument("manifest")
    @click.option("--samples", default=100, show_default=True, type=click.IntRange(min=1))
    @click.option("--tol", default=1e-9, show_default=True, type=float)
    @click.option("--seed", default=42, show_default=True, type=int)
    @click.option("--step", default=1e-3, show_default=True, type=float, help="RK4 step for flows.")
    @click.option("--json", "json_path", type=click.Path(dir_okay=False), help="Write the JSON report here.")
    @click.option("--strict", is_flag=True, help="Treat WARN verdicts as failures.")
    @click.option("--parallel", is_flag=True, help="Fan independent checks out to threads.")
    @click.option("--timing", is_flag=True, help="Record wall-clock millis (makes reports non-reproducible).")
    @functools.wraps(f)
    def wrapper(**kw):
        return f(**kw)

    return wrapper


def _summary(witness: dict) -> str:
    if "error" in witness:
        return witness["error"]
    text = json.dumps(witness, sort_keys=True)
    return text if len(text) <= 160 else text[:157] + "..."


def _execute(kinds: Optional[list[str]], manifest: str, json_path, strict: bool, **flags) -> None:
    opts = Options(strict=strict, **flags)
    try:
        m = resolve(manifest)
        report: Report = run_checks(m, opts, kinds)
    except ManifestError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(2)
    for rec in report.checks:
        click.echo(f"{rec.verdict:5s} {rec.name}  {_summary(rec.witness)}")
        if rec.verdict == ERROR:
            click.echo(f"error: {rec.name}: {rec.witness.get('error', '')}", err=True)
    if json_path:
        Path(json_path).write_text(report.dumps())
    sys.exit(report.exit_code(strict))


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Executable checks for Poisson geometry, Poisson Lie groups and reduction."""


@main.command("run")
@_common
def run_cmd(**kw):
    """Run every check declared in MANIFEST (a path or a bundled fixture name)."""
    _execute(None, **kw)


@main.group("check")
def check_group() -> None:
    """Run checks of a single kind."""


def _kind_command(group, name: str, kinds: list[str], doc: str):
    @group.command(name, help=doc)
    @_common
    def cmd(**kw):
        _execute(kinds, **kw)

    return cmd


_kind_command(check_group, "jacobi", ["jacobi"], "Jacobi identity of each bivector.")
_kind_command(check_group, "cocycle", ["cocycle"], "Bialgebra Jacobi and 1-cocycle conditions.")
_kind_command(check_group, "multiplicative", ["multiplicative"], "Multiplicativity of group bivectors.")
_kind_command(check_group, "action", ["action"], "Action homomorphism and infinitesimal Poisson action.")
_kind_command(check_group, "moment", ["moment"], "Momentum map condition.")
_kind_command(check_group, "poisson-map", ["poisson-map"], "Momentum map is a Poisson map.")
_kind_command(main, "dual", ["dual"], "Dual bialgebra and double-dual roundtrip.")
_kind_command(main, "dressing", ["dressing"], "Dressing fields, orbit ranks, linearization at the identity.")
_kind_command(main, "reduce", ["reduce"], "Reduced brackets modulo coordinate ideals.")


@main.group("leaf")
def leaf_group() -> None:
    """Symplectic leaf diagnostics."""


_kind_command(leaf_group, "scan", ["leaf-scan"], "Rank of the bivector over a grid of points.")


if __name__ == "__main__":  # pragma: no cover
    main()
