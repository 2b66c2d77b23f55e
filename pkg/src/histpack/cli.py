"""``histpack`` command-line interface.

Every subcommand is deterministic given its flags. Failures print a single
``error: <code>: <message>`` line to stderr and exit nonzero (1 for data
errors, 2 for usage errors).
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import heuristics, metrics, model_adapters, nnls_packer, scaling_sim
from .errors import HistpackError
from .histogram import (
    build_histogram,
    bundled_histogram,
    histogram_to_csv,
    histogram_to_json,
    load_lengths_file,
    read_histogram,
    synthetic_skewed_histogram,
    theoretical_speedup,
)
from .solution import PackingSolution

PACKERS = ("spfhp", "lpfhp", "nnlshp", "ennlshp")


class DepthType(click.ParamType):
    name = "depth"

    def convert(self, value, param, ctx):
        if value is None or isinstance(value, int):
            return value
        if str(value).lower() == "max":
            return None
        try:
            depth = int(value)
        except ValueError:
            self.fail(f"{value!r} is neither a positive integer nor 'max'", param, ctx)
        if depth < 1:
            self.fail(f"depth must be >= 1, got {depth}", param, ctx)
        return depth


def _conflict(a: str, b: str, why: str = "cannot be combined"):
    raise click.UsageError(f"{a} and {b} {why}")


def _emit(ctx: click.Context, text: str) -> None:
    out = ctx.obj["out"]
    if out is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        Path(out).write_text(text, encoding="utf-8")


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


@click.group()
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the main output to this file instead of stdout.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of CSV.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for every sampling step.")
@click.option("-v", "--verbose", count=True, help="Print timing and solver details to stderr.")
@click.pass_context
def cli(ctx, out, as_json, seed, verbose):
    """Histogram-based sequence packing tools."""
    ctx.obj = {"out": out, "json": as_json, "seed": seed, "verbose": verbose}


@cli.command()
@click.argument("lengths_file", required=False, type=click.Path(dir_okay=False))
@click.option("--max-len", type=click.IntRange(min=1), default=512, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "u32"]), default="text",
              show_default=True, help="Length file encoding.")
@click.option("--synthetic", type=click.IntRange(min=0), default=None, metavar="TOTAL",
              help="Generate a seeded skewed histogram with TOTAL sequences instead.")
@click.option("--peak-fraction", type=click.FloatRange(0, 1), default=0.235, show_default=True,
              help="Share of synthetic sequences at max-len.")
@click.pass_context
def histogram(ctx, lengths_file, max_len, fmt, synthetic, peak_fraction):
    """Build a length histogram from LENGTHS_FILE (one length per line)."""
    if lengths_file is not None and synthetic is not None:
        _conflict("LENGTHS_FILE", "--synthetic")
    if lengths_file is None and synthetic is None:
        raise click.UsageError("give LENGTHS_FILE or --synthetic")
    if synthetic is not None:
        hist = synthetic_skewed_histogram(max_len, synthetic, peak_fraction, ctx.obj["seed"])
    else:
        hist = build_histogram(load_lengths_file(lengths_file, fmt), max_len)
    body = histogram_to_json(hist) + "\n" if ctx.obj["json"] else histogram_to_csv(hist)
    speedup = theoretical_speedup(hist) if hist.total_sequences() else float("nan")
    summary = (
        f"sequences={hist.total_sequences()} tokens={hist.total_tokens()} "
        f"theoretical_speedup={speedup:.4f}"
    )
    _emit(ctx, body)
    # keep stdout parseable when the histogram itself goes there
    click.echo(summary, err=ctx.obj["out"] is None)


@cli.command()
@click.argument("histogram_file", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--bundled", is_flag=True, help="Use the bundled synthetic 512-token histogram.")
@click.option("--algorithm", type=click.Choice(PACKERS), default="spfhp", show_default=True)
@click.option("--depth", type=DepthType(), default="3", show_default=True,
              help="Maximum sequences per pack, or 'max' (heuristics only).")
@click.option("--leftover", type=click.Choice(nnls_packer.LEFTOVER_MODES), default=None,
              help="NNLS packers: how to pack sequences left over after rounding.")
@click.option("--round-up", is_flag=True, help="ennlshp: round the mixture up.")
@click.option("--short-weight", type=float, default=None,
              help="nnlshp: weight of lengths 1..8 (default 0.09).")
@click.option("--weights", "weights_file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="nnlshp: file with one row weight per length.")
@click.option("--large-weight", type=float, default=None,
              help="ennlshp: weight of the slack block (default 1e6).")
@click.option("--overhead", type=click.FloatRange(min=0), default=0.0, show_default=True,
              help="Relative throughput overhead of packed training, e.g. 0.01.")
@click.pass_context
def pack(ctx, histogram_file, bundled, algorithm, depth, leftover, round_up, short_weight,
         weights_file, large_weight, overhead):
    """Pack a histogram and print its statistics row.

    The solution JSON goes to --out when given.
    """
    if histogram_file is not None and bundled:
        _conflict("HISTOGRAM_FILE", "--bundled")
    if histogram_file is None and not bundled:
        raise click.UsageError("give HISTOGRAM_FILE or --bundled")
    nnls_family = algorithm in ("nnlshp", "ennlshp")
    if leftover is not None and not nnls_family:
        _conflict("--leftover", f"--algorithm {algorithm}")
    if round_up and algorithm != "ennlshp":
        _conflict("--round-up", f"--algorithm {algorithm}")
    if large_weight is not None and algorithm != "ennlshp":
        _conflict("--large-weight", f"--algorithm {algorithm}")
    for flag, value in (("--short-weight", short_weight), ("--weights", weights_file)):
        if value is not None and algorithm != "nnlshp":
            _conflict(flag, f"--algorithm {algorithm}")
    if short_weight is not None and weights_file is not None:
        _conflict("--short-weight", "--weights")
    if nnls_family and depth is None:
        _conflict("--depth max", f"--algorithm {algorithm}", "cannot be combined (limit 4)")

    hist = bundled_histogram() if bundled else read_histogram(histogram_file)
    report = None
    if algorithm == "spfhp":
        solution = heuristics.spfhp(hist, depth)
    elif algorithm == "lpfhp":
        solution = heuristics.lpfhp(hist, depth)
    elif algorithm == "nnlshp":
        weights = None
        if short_weight is not None:
            weights = nnls_packer.default_weights(hist.max_len)
            weights[weights != 1.0] = short_weight
        elif weights_file is not None:
            weights = np.loadtxt(weights_file, dtype=float, ndmin=1)
        solution, report = nnls_packer.nnlshp(
            hist, depth, weights, leftover=leftover or "single"
        )
    else:
        kwargs = {} if large_weight is None else {"large_weight": large_weight}
        solution, report = nnls_packer.ennlshp(
            hist, depth, round_up=round_up, leftover=leftover or "single", **kwargs
        )

    stats = metrics.evaluate(hist, solution)  # refuses invalid coverage
    solution = PackingSolution.from_counts(
        solution.max_len, solution.mixture, dict(solution.padding_sequences),
        algorithm=solution.algorithm, max_depth=solution.max_depth,
        extra={"overhead_fraction": overhead},
    )
    if ctx.obj["out"] is not None:
        Path(ctx.obj["out"]).write_text(solution.to_json(indent=1) + "\n", encoding="utf-8")
    row = metrics.report_row(solution, stats, overhead)
    if ctx.obj["json"]:
        click.echo(json.dumps({"row": row.__dict__, "stats": metrics.stats_dict(stats)}))
    else:
        click.echo(metrics.format_report([row]), nl=False)
    if ctx.obj["verbose"] and report is not None:
        click.echo(
            f"iterations={report.iterations} solve_seconds={report.solve_seconds:.3f} "
            f"padding_tokens_added={report.padding_tokens_added} "
            f"unpacked_sequences={report.unpacked_sequences}",
            err=True,
        )


@cli.command()
@click.argument("solution_files", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def report(ctx, solution_files):
    """Merge packing solutions into one report, sorted by depth."""
    rows = []
    for path in solution_files:
        solution = PackingSolution.from_json(Path(path).read_text(encoding="utf-8"))
        stats = metrics.evaluate(solution.implied_histogram(), solution)
        overhead = float(solution.extra.get("overhead_fraction", 0.0))
        rows.append(metrics.report_row(solution, stats, overhead))
    text = metrics.format_report(rows)
    if ctx.obj["json"]:
        parsed = list(csv.DictReader(io.StringIO(text)))
        text = json.dumps(parsed) + "\n"
    _emit(ctx, text)


@cli.command()
@click.argument("composition")
@click.option("--additive", is_flag=True, help="Print the additive softmax mask instead.")
@click.pass_context
def mask(ctx, composition, additive):
    """Attention mask for a pack, e.g. ``1,1,1,2,2`` (0 marks padding)."""
    try:
        ids = [int(tok) for tok in composition.split(",")]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {composition!r}")
    zero_one, add = model_adapters.build_attention_mask(ids)
    matrix = add if additive else zero_one
    if ctx.obj["json"]:
        text = json.dumps(matrix.tolist()) + "\n"
    elif additive:
        text = _csv([[f"{v:g}" for v in r] for r in matrix.tolist()])
    else:
        text = "".join("".join(str(v) for v in r) + "\n" for r in matrix.tolist())
    _emit(ctx, text)


@cli.command()
@click.argument("beta1", type=float)
@click.argument("beta2", type=float)
@click.argument("packing_factor", type=float)
@click.pass_context
def lamb(ctx, beta1, beta2, packing_factor):
    """Decay rates adjusted for PACKING_FACTOR sequences per sample."""
    b1, b2 = model_adapters.adjust_lamb_betas(beta1, beta2, packing_factor)
    if ctx.obj["json"]:
        text = json.dumps({"beta1": b1, "beta2": b2}) + "\n"
    else:
        text = _csv([["beta1", "beta2"], [f"{b1:.10g}", f"{b2:.10g}"]])
    _emit(ctx, text)


def _int_list(ctx, param, value):
    try:
        counts = [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter("expected comma-separated integers")
    if not counts or min(counts) < 1:
        raise click.BadParameter("device counts must be positive integers")
    return counts


@cli.command()
@click.option("--alpha8", type=float, default=1.6038, show_default=True,
              help="Gumbel location observed at --observed-devices.")
@click.option("--beta8", type=float, default=0.1288, show_default=True,
              help="Gumbel scale observed at --observed-devices.")
@click.option("--observed-devices", type=click.IntRange(min=1), default=8, show_default=True)
@click.option("--devices", default="1,2,8,32,2048", show_default=True, callback=_int_list,
              help="Comma-separated cluster sizes to simulate.")
@click.option("--packing-speedup", type=float, default=1.913, show_default=True,
              help="Constant speed-up of packing, reported alongside.")
@click.option("--samples", type=click.IntRange(min=2), default=1_000_000, show_default=True)
@click.pass_context
def scaling(ctx, alpha8, beta8, observed_devices, devices, packing_speedup, samples):
    """Simulate un-padding speed-up against cluster size."""
    observed = scaling_sim.GumbelParams(alpha8, beta8)
    single = scaling_sim.fit_single_device(observed, observed_devices)
    click.echo(f"single_device alpha={single.alpha:.4f} beta={single.beta:.4f}", err=True)
    rows = scaling_sim.speedup_curve(single, devices, packing_speedup, samples, ctx.obj["seed"])
    if ctx.obj["json"]:
        text = json.dumps({
            "single_device": {"alpha": single.alpha, "beta": single.beta},
            "rows": [dict(zip(("n_devices", "unpadding_speedup", "packing_speedup"), r))
                     for r in rows],
        }) + "\n"
    else:
        text = _csv([("n_devices", "unpadding_speedup", "packing_speedup")]
                    + [(n, f"{u:.4f}", f"{p:.4f}") for n, u, p in rows])
    _emit(ctx, text)


def _one_line(message: str) -> str:
    return " ".join(str(message).split())


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="histpack", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        click.echo("error: aborted", err=True)
        return 1
    except click.UsageError as exc:
        click.echo(f"error: usage: {_one_line(exc.format_message())}", err=True)
        return 2
    except click.ClickException as exc:
        click.echo(f"error: usage: {_one_line(exc.format_message())}", err=True)
        return exc.exit_code or 1
    except HistpackError as exc:
        click.echo(f"error: {exc.code}: {_one_line(exc)}", err=True)
        return 1
    except (ValueError, OSError) as exc:
        click.echo(f"error: invalid-input: {_one_line(exc)}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
