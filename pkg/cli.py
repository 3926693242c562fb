import asyncio
import asyncclick as click
import logging
import os
import sys
from pathlib import Path
from dotenv import load_dotenv
from typing import Literal
load_dotenv()

from analysis.detectors.charts import verify_chart
from analysis.detectors.conformal import detect_conformal
from analysis.detectors.counting import counting as count_equations
from analysis.detectors.engine import detect
from analysis.detectors.reports import DetectConfig, DetectionReport
from analysis.pipelines._base import collect
from app.analysis.detection import create_detection_pipeline, load_problem, solve_problem, split_frontmatter, summarize
from ingress.expressions.chart_file import load_chart, parse_gamma
from ingress.expressions.parser import parse_object, parse_point
from ingress.oracle.corpus import OracleIngestion
from kernel.connection import christoffel_from_chart, curvature as curvature_tensor, torsion
from kernel.exterior import (
    DiffForm, MultiVector,
    exterior_derivative, interior_form, interior_form_vec, interior_multivector, interior_vec_form,
    iota_pq, iota_star_qp, schouten_bracket, wedge,
)


EXIT_ERROR = 3


def _read_file(value: str) -> Path:
    return Path(value[1:] if value.startswith("@") else value)


def _parse_input(text: str, n: int | None, kind: Literal["form", "multivector"] | None = None):
    """`--input` value: an expression, or `@file` with optional YAML frontmatter supplying `n`."""
    if text.startswith("@"):
        frontmatter, text = split_frontmatter(_read_file(text).read_text(encoding="utf-8"))
        n = n if n is not None else frontmatter.get("n")
        kind = kind or frontmatter.get("kind")
    if n is None:
        raise click.UsageError("--n is required")
    return parse_object(text, int(n), kind)


def _detect_config(n: int, chart: str | None, point: str | None, samples: int | None, seed: int | None, flat_derivation: str | None = None) -> DetectConfig:
    return DetectConfig.from_env(
        chart=load_chart(_read_file(chart), n) if chart else None,
        point=parse_point(point, n) if point else None,
        samples=samples,
        seed=seed,
        flat_derivation=parse_object(flat_derivation, n, "form", 1) if flat_derivation else None,
    )


def _emit(report: DetectionReport, as_json: bool) -> int:
    click.echo(report.to_json() if as_json else report.render())
    return report.exit_code


def _detection_options(command):
    options = [
        click.option('--n', type=int, default=None, help='Dimension of the space'),
        click.option('--input', 'input_', required=True, help='Object expression or @problem-file'),
        click.option('--chart', default=None, help='Candidate chart file (@file)'),
        click.option('--point', default=None, help='Base point, comma-separated rationals'),
        click.option('--samples', type=int, default=None, help='Number of random rank sample points'),
        click.option('--seed', type=int, default=None, help='Seed for the sample points'),
        click.option('--kind', type=click.Choice(['form', 'multivector']), default=None, help='Kind of a bare polynomial input'),
        click.option('--json', 'as_json', is_flag=True, help='Emit the report as JSON'),
    ]
    for option in reversed(options):
        command = option(command)
    return command


@click.group()
def cli():
    """Decide whether differential forms and multivector fields have constant coefficients."""
    pass


@cli.command("d")
@click.option('--n', type=int, default=None, help='Dimension of the space')
@click.option('--input', 'input_', required=True, help='Form expression or @file')
async def d(n, input_):
    """Exterior derivative of a form."""
    a = _parse_input(input_, n, "form")
    click.echo(exterior_derivative(a))
    return 0


@cli.command("wedge")
@click.option('--n', type=int, required=True, help='Dimension of the space')
@click.option('--input', 'input_', required=True, help='First operand')
@click.option('--other', required=True, help='Second operand')
async def wedge_command(n, input_, other):
    """Exterior product of two forms or two multivectors."""
    a, b = _parse_input(input_, n), _parse_input(other, n)
    if type(a) is not type(b):
        raise click.UsageError("wedge multiplies two forms or two multivectors")
    click.echo(wedge(a, b))
    return 0


@cli.command("ip")
@click.option('--n', type=int, required=True, help='Dimension of the space')
@click.option('--input', 'input_', required=True, help='Contracting object (vector/multivector or covector/form)')
@click.option('--other', required=True, help='Object contracted into')
async def ip(n, input_, other):
    """Interior product of the first operand into the second."""
    a, b = _parse_input(input_, n), _parse_input(other, n)
    if isinstance(a, MultiVector) and isinstance(b, DiffForm):
        result = interior_vec_form(a, b) if a.degree == 1 else interior_multivector(a, b)
    elif isinstance(a, DiffForm) and isinstance(b, MultiVector):
        result = interior_form_vec(a, b) if a.degree == 1 else interior_form(a, b)
    else:
        raise click.UsageError("ip contracts a multivector into a form or a form into a multivector")
    click.echo(result)
    return 0


@cli.command("sn")
@click.option('--n', type=int, required=True, help='Dimension of the space')
@click.option('--input', 'input_', required=True, help='First multivector')
@click.option('--other', default=None, help='Second multivector (defaults to the first)')
async def sn(n, input_, other):
    """Schouten-Nijenhuis bracket."""
    A = _parse_input(input_, n, "multivector")
    B = _parse_input(other, n, "multivector") if other else A
    click.echo(schouten_bracket(A, B))
    return 0


@cli.command("iota")
@click.option('--n', type=int, required=True, help='Dimension of the space')
@click.option('--input', 'input_', required=True, help='Multivector (or form for the dual map)')
@click.option('--volume', default=None, help='Volume form (or n-vector); defaults to the standard one')
async def iota(n, input_, volume):
    """Duality between q-vectors and (n-q)-forms induced by a volume element."""
    obj = _parse_input(input_, n)
    if isinstance(obj, MultiVector):
        vol = _parse_input(volume, n, "form") if volume else DiffForm.volume(n)
        click.echo(iota_pq(obj, vol))
    else:
        Vn = _parse_input(volume, n, "multivector") if volume else MultiVector.volume(n)
        click.echo(iota_star_qp(obj, Vn))
    return 0


@cli.command("christoffel")
@click.option('--n', type=int, default=None, help='Dimension of the space')
@click.option('--chart', required=True, help='Chart file (@file)')
async def christoffel(n, chart):
    """Christoffel symbols of the flat connection parallelizing a chart."""
    conn = christoffel_from_chart(load_chart(_read_file(chart), n))
    click.echo(conn.dump() or "0", nl=not conn.gamma)
    return 0


@cli.command("curvature")
@click.option('--n', type=int, default=None, help='Dimension of the space')
@click.option('--gamma', default=None, help='Christoffel dump file (@file)')
@click.option('--chart', default=None, help='Chart file (@file) to derive the symbols from')
async def curvature(n, gamma, chart):
    """Torsion and curvature of a connection; exit 1 unless both vanish."""
    if gamma:
        if n is None:
            raise click.UsageError("--n is required with --gamma")
        conn = parse_gamma(_read_file(gamma).read_text(encoding="utf-8"), n)
    elif chart:
        conn = christoffel_from_chart(load_chart(_read_file(chart), n))
    else:
        raise click.UsageError("Either --gamma or --chart is required")

    T, R = torsion(conn), curvature_tensor(conn)
    for (a, b, c), value in sorted(T.components.items()):
        click.echo(f"T[{a}][{b}][{c}] = {value}")
    for (a, b, c, d_), value in R.items():
        click.echo(f"R[{a}][{b}][{c}][{d_}] = {value}")
    if T.is_zero() and R.is_zero():
        click.echo("0")
        return 0
    return 1


@cli.command("detect")
@_detection_options
@click.option('--flat-derivation', default=None, help='Closed 1-form for the (n-1)-vector derivation law')
async def detect_command(n, input_, chart, point, samples, seed, kind, as_json, flat_derivation):
    """Decide constant coefficients; exit 0 CONSTANT, 1 NOT_CONSTANT, 2 INCONCLUSIVE."""
    if input_.startswith("@"):
        problem = load_problem(_read_file(input_), n, kind, samples=samples, seed=seed)
        flags = _detect_config(problem.obj.n, chart, point, None, None, flat_derivation)
        update = {key: getattr(flags, key) for key in ("chart", "point", "flat_derivation") if getattr(flags, key) is not None}
        report = solve_problem(problem.model_copy(update={"config": problem.config.model_copy(update=update)}))
    else:
        obj = _parse_input(input_, n, kind)
        report = detect(obj, _detect_config(obj.n, chart, point, samples, seed, flat_derivation))
    return _emit(report, as_json)


@cli.command("detect-conformal")
@_detection_options
async def detect_conformal_command(n, input_, chart, point, samples, seed, kind, as_json):
    """Decide conformal constant coefficients."""
    obj = _parse_input(input_, n, kind)
    report = detect_conformal(obj, _detect_config(obj.n, chart, point, samples, seed))
    return _emit(report, as_json)


@cli.command("counting")
@click.option('--n', type=int, required=True, help='Dimension of the space')
@click.option('--deg', type=int, required=True, help='Degree p (or q)')
async def counting(n, deg):
    """Equation and unknown counts of the Christoffel systems."""
    record = count_equations(n, deg)
    click.echo(record.render())
    return 0


@cli.command("verify-chart")
@click.option('--n', type=int, default=None, help='Dimension of the space')
@click.option('--input', 'input_', required=True, help='Object expression or @file')
@click.option('--chart', required=True, help='Chart file (@file)')
@click.option('--target', default=None, help='Constant object expected in the chart (formal charts)')
async def verify_chart_command(n, input_, chart, target):
    """Check a chart witness exactly; exit 0 iff the coefficients become constant."""
    obj = _parse_input(input_, n)
    phi = load_chart(_read_file(chart), obj.n)
    expected = parse_object(target, obj.n, obj.kind, obj.degree) if target else None
    verification = verify_chart(obj, phi, expected)

    click.echo(f"verified: {str(verification.verified).lower()}")
    click.echo(f"expressed: {verification.expressed}")
    if not verification.verified:
        click.echo(f"residual: {verification.residual}")
    return 0 if verification else 1


@cli.command("oracle-gen")
@click.option('--n', type=int, required=True, help='Dimension of the space')
@click.option('--deg', type=int, required=True, help='Degree p (or q)')
@click.option('--kind', type=click.Choice(['form', 'multivector']), default='form', help='Kind of the generated objects')
@click.option('--polarity', type=click.Choice(['positive', 'negative']), default='positive', help='Label of the corpus')
@click.option('--count', type=int, default=10, help='Number of samples')
@click.option('--seed', type=int, default=0, help='Generator seed')
@click.option('--out', type=Path, default=None, help='Directory to dump one file per sample')
async def oracle_gen(n, deg, kind, polarity, count, seed, out):
    """Generate a labelled corpus, store it and optionally dump it."""
    run = OracleIngestion().ingest(n, deg, count, seed, kind, polarity, dump_dir=out)
    click.echo(f"Created corpus run {run.id}: {len(run.samples)} {polarity} {kind} samples (n={n}, degree={deg})")
    for sample in run.samples:
        click.echo(f"- [{sample.label}] {sample.object_text}")
    return 0


@cli.command("detect-corpus")
@click.option('--run-id', type=int, default=None, help='Corpus run to detect (latest by default)')
@click.option('--samples', type=int, default=None, help='Number of random rank sample points')
@click.option('--seed', type=int, default=None, help='Seed for the sample points')
@click.option('--no-charts', is_flag=True, help='Do not supply the stored charts as candidate witnesses')
@click.option('--ignore-cached', is_flag=True, help='Ignore cached detection records')
async def detect_corpus(run_id, samples, seed, no_charts, ignore_cached):
    """Run the batched detection pipeline over a stored corpus; exit 0 iff nothing is misclassified."""
    ingestion = OracleIngestion()
    run = ingestion.get_run_by_id(run_id) if run_id is not None else ingestion.get_last_run()

    if not run:
        raise ValueError("No corpus run found")

    config = DetectConfig.from_env(samples=samples, seed=seed)
    pipeline = create_detection_pipeline(run, config, use_charts=not no_charts, ignore_cached=ignore_cached)
    records = await collect(pipeline.run(None))

    summary = summarize(records)
    click.echo(f"Corpus run {run.id} ({run.polarity} {run.kind}s, n={run.n}, degree={run.degree})")
    click.echo(summary.render())
    return 0 if summary.misclassified == 0 else 1


async def run(args: list[str]) -> int:
    """Run one command and return its exit code; errors map to 3."""
    try:
        result = await cli.main(args, prog_name="constcoef", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_ERROR
    except click.Abort:
        return EXIT_ERROR
    except (ValueError, TypeError, OSError) as e:
        click.echo(f"Error: {e}", err=True)
        return EXIT_ERROR
    return result if isinstance(result, int) else 0


def main():
    """Entry point for the CLI application."""
    logging.basicConfig(level=os.getenv("CONSTCOEF_LOG_LEVEL", "WARNING").upper())
    sys.exit(asyncio.run(run(sys.argv[1:])))


if __name__ == '__main__':
    main()
