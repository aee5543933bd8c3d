"""Command-line front end; a thin client of the HTTP service.

Every verb builds a request, sends it to the service (an in-process ASGI
call by default, or a remote base URL via ``--server``), and renders the
JSON document it gets back as json, csv or an aligned table.  Exit codes:
0 success, 1 parameter/validation problems, 2 numerical failures.
"""

from __future__ import annotations

import asyncio
import json
import sys

import click
import httpx

from . import serialize
from .simbench import format_report, report_from_json

DEFAULT_FORMAT_ENV = "GLDLM_FORMAT"


def _request(server: str | None, path: str, payload: dict) -> tuple[int, dict]:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            resp = client.post(path, json=payload)
            return resp.status_code, resp.json()

    async def call():
        from .service.app import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, base_url="http://service") as client:
            resp = await client.post(path, json=payload)
            return resp.status_code, resp.json()

    return asyncio.run(call())


def _fail(status: int, doc: dict) -> None:
    if "error" in doc:
        message = f"{doc['error']['code']}: {doc['error']['message']}"
    else:
        message = json.dumps(doc.get("detail", doc))
    click.echo(f"error: {message}", err=True)
    sys.exit(2 if status >= 500 else 1)


def _parse_lambda(text: str) -> list[float]:
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    if len(parts) != 4:
        click.echo("error: --lambda needs four comma-separated numbers", err=True)
        sys.exit(1)
    try:
        return [float(p) for p in parts]
    except ValueError:
        click.echo(f"error: cannot parse --lambda {text!r}", err=True)
        sys.exit(1)


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        click.echo(f"error: cannot parse number list {text!r}", err=True)
        sys.exit(1)


def _read_data(path: str) -> list[float]:
    stream = sys.stdin if path == "-" else open(path)
    try:
        values = [float(line) for line in stream.read().split()]
    except ValueError:
        click.echo(f"error: data file {path!r} must hold one number per line", err=True)
        sys.exit(1)
    finally:
        if stream is not sys.stdin:
            stream.close()
    return values


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _kv_table(pairs: list[tuple[str, str]]) -> str:
    width = max(len(k) for k, _ in pairs)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in pairs) + "\n"


format_option = click.option(
    "--format",
    "-f",
    "fmt",
    type=click.Choice(["json", "csv", "table"]),
    default=None,
    help="output format (default: $GLDLM_FORMAT or json)",
)
output_option = click.option("--output", "-o", type=click.Path(), default=None, help="write to file")
digits_option = click.option("--digits", type=int, default=None, help="round csv/table output")
server_option = click.option("--server", default=None, help="base URL of a running service (default: in-process)")


def _resolved_format(fmt: str | None) -> str:
    import os

    return fmt or os.environ.get(DEFAULT_FORMAT_ENV, "json")


@click.group(name="gldlm")
def cli() -> None:
    """L-moment toolkit for the generalized lambda distribution."""


def main(argv=None) -> int:
    """Entry point with the documented exit codes.

    0 success, 1 parameter/validation errors (including usage errors),
    2 numerical failures.  Subcommands exit directly for service-reported
    errors; click's own usage errors are remapped from its default 2 to 1.
    """
    try:
        cli(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.Abort:
        sys.exit(1)
    return 0


@cli.command("eval")
@click.option("--lambda", "lambdas", required=True, help="lambda1,lambda2,lambda3,lambda4")
@click.option("--stat", type=click.Choice(["quantile", "density", "pdf", "cdf"]), default="quantile")
@click.option("--at", required=True, help="comma-separated evaluation points")
@format_option
@output_option
@digits_option
@server_option
def eval_cmd(lambdas, stat, at, fmt, output, digits, server):
    """Evaluate the quantile, quantile density, pdf or cdf."""
    status, doc = _request(
        server, "/v1/eval", {"lambda": _parse_lambda(lambdas), "stat": stat, "at": _parse_floats(at)}
    )
    if status != 200:
        _fail(status, doc)
    fmt = _resolved_format(fmt)
    if fmt == "json":
        _emit(serialize.dumps(doc), output)
    elif fmt == "csv":
        lines = ["stat,at,value"] + [
            f"{doc['stat']},{serialize.fmt(a, digits)},{serialize.fmt(v, digits)}"
            for a, v in zip(doc["at"], doc["values"])
        ]
        _emit("\n".join(lines) + "\n", output)
    else:
        _emit(_kv_table([(serialize.fmt(a, digits), serialize.fmt(v, digits)) for a, v in zip(doc["at"], doc["values"])]), output)


@cli.command("lmom")
@click.option("--lambda", "lambdas", default=None, help="theoretical L-moments of these parameters")
@click.option("--data", default=None, type=str, help="sample L-moments of this data file ('-' for stdin)")
@click.option("--order", type=int, default=None, help="highest order (default 6 theoretical, 4 sample)")
@format_option
@output_option
@digits_option
@server_option
def lmom_cmd(lambdas, data, order, fmt, output, digits, server):
    """Closed-form or sample L-moments (L1, L2, tau3..tauR)."""
    if (lambdas is None) == (data is None):
        click.echo("error: give exactly one of --lambda or --data", err=True)
        sys.exit(1)
    if lambdas is not None:
        status, doc = _request(
            server, "/v1/lmom", {"lambda": _parse_lambda(lambdas), "max_order": order or 6}
        )
    else:
        status, doc = _request(
            server, "/v1/lmom/sample", {"data": _read_data(data), "max_order": order or 4}
        )
    if status != 200:
        _fail(status, doc)
    fmt = _resolved_format(fmt)
    if fmt == "json":
        _emit(serialize.dumps(doc), output)
        return
    moments = serialize.lmoments_from_doc(doc)
    if fmt == "csv":
        _emit(serialize.lmoments_to_csv(moments, digits), output)
    else:
        pairs = [("L1", serialize.fmt(moments.l1, digits)), ("L2", serialize.fmt(moments.l2, digits))]
        pairs += [(f"tau{r}", serialize.fmt(moments.ratio(r), digits)) for r in range(3, moments.max_order + 1)]
        _emit(_kv_table(pairs), output)


@cli.command("solve-symmetric")
@click.option("--tau4", type=float, required=True)
@format_option
@output_option
@digits_option
@server_option
def solve_symmetric_cmd(tau4, fmt, output, digits, server):
    """Shape exponents of the symmetric members with the given L-kurtosis."""
    status, doc = _request(server, "/v1/solve-symmetric", {"tau4": tau4})
    if status != 200:
        _fail(status, doc)
    fmt = _resolved_format(fmt)
    if fmt == "json":
        _emit(serialize.dumps(doc), output)
    elif fmt == "csv":
        lines = ["tau4,root"] + [f"{serialize.fmt(doc['tau4'], digits)},{serialize.fmt(r, digits)}" for r in doc["roots"]]
        _emit("\n".join(lines) + "\n", output)
    else:
        roots = ", ".join(serialize.fmt(r, digits) for r in doc["roots"]) or "(none)"
        _emit(_kv_table([("tau4", serialize.fmt(doc["tau4"], digits)), ("roots", roots)]), output)


@cli.command("validate")
@click.option("--lambda", "lambdas", required=True)
@format_option
@output_option
@server_option
def validate_cmd(lambdas, fmt, output, server):
    """Check validity; exits 1 with a diagnostic for invalid parameters."""
    status, doc = _request(server, "/v1/validate", {"lambda": _parse_lambda(lambdas)})
    if status != 200:
        _fail(status, doc)
    fmt = _resolved_format(fmt)
    if fmt == "json":
        _emit(serialize.dumps(doc), output)
    elif fmt == "csv":
        _emit("valid,region,lmoments_exist\n"
              f"{str(doc['valid']).lower()},{doc['region']},{str(doc['lmoments_exist']).lower()}\n", output)
    else:
        _emit(_kv_table([(k, str(doc[k])) for k in ("valid", "region", "lmoments_exist")]), output)
    if not doc["valid"]:
        click.echo("invalid parameters", err=True)
        sys.exit(1)


def _parse_limits(text: str | None):
    # "lo3:hi3,lo4:hi4"
    if text is None:
        return None
    try:
        pairs = [[float(v) for v in part.split(":")] for part in text.split(",")]
    except ValueError:
        click.echo(f"error: cannot parse --limits {text!r}", err=True)
        sys.exit(1)
    if len(pairs) != 2 or any(len(p) != 2 for p in pairs):
        click.echo("error: --limits must look like lo3:hi3,lo4:hi4", err=True)
        sys.exit(1)
    return pairs


@cli.command("atlas")
@click.option("--region", type=int, required=True, help="GLD region, 3-6")
@click.option("--resolution", type=int, default=512, show_default=True)
@click.option("--limits", default=None, help="axis ranges lo3:hi3,lo4:hi4")
@click.option("--boundary/--no-boundary", default=True, help="assemble the boundary polygon")
@click.option("--boundary-only", is_flag=True, help="emit only the polygon vertices")
@format_option
@output_option
@digits_option
@server_option
def atlas_cmd(region, resolution, limits, boundary, boundary_only, fmt, output, digits, server):
    """Map a shape-exponent grid into (tau3, tau4) space."""
    payload = {
        "region": region,
        "resolution": resolution,
        "limits": _parse_limits(limits),
        "boundary": boundary or boundary_only,
    }
    status, doc = _request(server, "/v1/atlas", payload)
    if status != 200:
        _fail(status, doc)
    fmt = _resolved_format(fmt)
    if fmt == "json":
        _emit(serialize.dumps(doc), output)
        return
    if boundary_only:
        lines = ["region,tau3,tau4"] + [
            f"{doc['region']},{serialize.fmt(x, digits)},{serialize.fmt(y, digits)}" for x, y in doc["boundary"]
        ]
        _emit("\n".join(lines) + "\n", output)
        return
    lines = ["region,lambda3,lambda4,tau3,tau4"]
    for a, b, x, y in zip(doc["lambda3"], doc["lambda4"], doc["tau3"], doc["tau4"]):
        lines.append(
            f"{doc['region']},{serialize.fmt(a, digits)},{serialize.fmt(b, digits)},"
            f"{serialize.fmt(x, digits)},{serialize.fmt(y, digits)}"
        )
    _emit("\n".join(lines) + "\n", output)


@cli.command("contour")
@click.option("--region", type=int, required=True)
@click.option("--stat", "statistic", type=click.Choice(["tau3", "tau4"]), required=True)
@click.option("--levels", required=True, help="comma-separated contour levels")
@click.option("--resolution", type=int, default=512, show_default=True)
@click.option("--limits", default=None, help="axis ranges lo3:hi3,lo4:hi4")
@format_option
@output_option
@digits_option
@server_option
def contour_cmd(region, statistic, levels, resolution, limits, fmt, output, digits, server):
    """Level curves of tau3 or tau4 over a region's shape grid."""
    payload = {
        "region": region,
        "statistic": statistic,
        "levels": _parse_floats(levels),
        "resolution": resolution,
        "limits": _parse_limits(limits),
    }
    status, doc = _request(server, "/v1/contour", payload)
    if status != 200:
        _fail(status, doc)
    fmt = _resolved_format(fmt)
    if fmt == "json":
        _emit(serialize.dumps(doc), output)
        return
    lines = ["statistic,level,component,lambda3,lambda4"]
    for level_key, polys in doc["polylines"].items():
        for k, poly in enumerate(polys):
            for a, b in poly:
                lines.append(
                    f"{doc['statistic']},{level_key},{k},{serialize.fmt(a, digits)},{serialize.fmt(b, digits)}"
                )
    _emit("\n".join(lines) + "\n", output)


@cli.command("census")
@click.option("--tau3", type=float, required=True)
@click.option("--tau4", type=float, required=True)
@format_option
@output_option
@digits_option
@server_option
def census_cmd(tau3, tau4, fmt, output, digits, server):
    """All members sharing one (tau3, tau4), completed with L1=0, L2=1."""
    status, doc = _request(server, "/v1/census", {"tau3": tau3, "tau4": tau4})
    if status != 200:
        _fail(status, doc)
    fmt = _resolved_format(fmt)
    if fmt == "json":
        _emit(serialize.dumps(doc), output)
        return
    solutions = serialize.census_from_doc(doc)
    if fmt == "csv":
        _emit(serialize.census_to_csv(solutions, digits), output)
        return
    header = f"{'region':<7}{'lambda1':>12}{'lambda2':>12}{'lambda3':>12}{'lambda4':>12}{'tau5':>9}{'tau6':>9}"
    rows = [header]
    for s in solutions:
        rows.append(
            f"{s.region.value:<7}{s.lambda1:>12.5f}{s.lambda2:>12.5f}{s.lambda3:>12.5f}"
            f"{s.lambda4:>12.5f}{s.tau5:>9.3f}{s.tau6:>9.3f}"
        )
    _emit("\n".join(rows) + "\n", output)


@cli.command("fit")
@click.option("--data", required=True, help="data file, one number per line ('-' for stdin)")
@click.option("--starts", default=None, help="extra starts as l3,l4;l3,l4")
@click.option("--ks/--no-ks", "compute_ks", default=True, help="compute the KS fit statistic")
@format_option
@output_option
@digits_option
@server_option
def fit_cmd(data, starts, compute_ks, fmt, output, digits, server):
    """Fit parameters to data by the method of L-moments."""
    start_pairs = []
    if starts:
        for part in starts.split(";"):
            pair = _parse_floats(part)
            if len(pair) != 2:
                click.echo("error: each start must be l3,l4", err=True)
                sys.exit(1)
            start_pairs.append(pair)
    payload = {"data": _read_data(data), "starts": start_pairs, "compute_ks": compute_ks}
    status, doc = _request(server, "/v1/fit", payload)
    if status != 200:
        _fail(status, doc)
    fmt = _resolved_format(fmt)
    if fmt == "json":
        _emit(serialize.dumps(doc), output)
        return
    results = [serialize.fit_result_from_doc(d) for d in doc["results"]]
    if fmt == "csv":
        _emit(serialize.fit_results_to_csv(results, digits), output)
        return
    rows = [f"{'region':<7}{'lambda1':>12}{'lambda2':>12}{'lambda3':>12}{'lambda4':>12}{'objective':>12}{'E_KS':>9}"]
    for r in results:
        p = r.params
        ks = f"{r.ks_statistic:>9.5f}" if r.ks_statistic is not None else f"{'-':>9}"
        rows.append(
            f"{r.region.value:<7}{p.lambda1:>12.5f}{p.lambda2:>12.5f}{p.lambda3:>12.5f}"
            f"{p.lambda4:>12.5f}{r.objective:>12.3e}{ks}"
        )
    _emit("\n".join(rows) + "\n", output)


@cli.command("sample")
@click.option("--lambda", "lambdas", required=True)
@click.option("--n", type=int, required=True)
@click.option("--seed", type=int, required=True)
@format_option
@output_option
@digits_option
@server_option
def sample_cmd(lambdas, n, seed, fmt, output, digits, server):
    """Inverse-transform random variates; reproducible for a given seed."""
    status, doc = _request(server, "/v1/sample", {"lambda": _parse_lambda(lambdas), "n": n, "seed": seed})
    if status != 200:
        _fail(status, doc)
    fmt = _resolved_format(fmt)
    if fmt == "json":
        _emit(serialize.dumps(doc), output)
    elif fmt == "csv":
        _emit("value\n" + "\n".join(serialize.fmt(v, digits) for v in doc["values"]) + "\n", output)
    else:
        _emit("\n".join(serialize.fmt(v, digits) for v in doc["values"]) + "\n", output)


@cli.command("simulate")
@click.option("--lambda", "lambdas", required=True, help="generator parameters")
@click.option("--n", "sample_size", type=int, default=1000, show_default=True)
@click.option("--reps", "replications", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--smaller-start/--best-start", "smaller", default=True,
              help="report the run from the smaller symmetric start, or the best objective")
@format_option
@output_option
@server_option
def simulate_cmd(lambdas, sample_size, replications, seed, smaller, fmt, output, server):
    """Replicated estimation benchmark; means and standard errors per quantity."""
    payload = {
        "lambda": _parse_lambda(lambdas),
        "sample_size": sample_size,
        "replications": replications,
        "seed": seed,
        "report_smaller_start": smaller,
    }
    status, doc = _request(server, "/v1/simulate", payload)
    if status != 200:
        _fail(status, doc)
    fmt = _resolved_format(fmt)
    if fmt == "json":
        _emit(serialize.dumps(doc), output)
        return
    report = report_from_json(json.dumps(doc))
    _emit(format_report(report, "csv" if fmt == "csv" else "table"), output)


@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve_cmd(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
