"""
Labelled corpora with certified ground truth: positives are constant objects moved through a random
unipotent chart, negatives carry an obstruction that is nonzero at an exact rational point.
"""
import logging
import random
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict
import yaml

from analysis.detectors.rank import random_point
from analysis.detectors.reports import Verdict
from app.storage.oracle_corpus import CorpusRunRecord, CorpusSampleRecord, open_corpus_db
from ingress.expressions.chart_file import render_chart
from kernel.errors import CorpusExhausted, DegreeError
from kernel.exterior import (
    Chart, DiffForm, ExteriorObject, MultiVector,
    exterior_derivative, multi_indices, pullback, pushforward, schouten_bracket,
)

from .charts import random_chart, random_coefficient, random_poly


logger = logging.getLogger('ingress.oracle.corpus')

Kind = Literal["form", "multivector"]
Polarity = Literal["positive", "negative"]

MAX_ATTEMPTS = 50


class CorpusSample(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    obj: ExteriorObject
    label: Verdict
    chart: Chart | None = None
    obstruction: ExteriorObject | None = None

    def render(self) -> str:
        """Sample file: YAML frontmatter with the label and obstruction, body the object."""
        frontmatter = {
            "n": self.obj.n,
            "kind": self.obj.kind,
            "degree": self.obj.degree,
            "label": self.label.value,
        }
        if self.obstruction is not None:
            frontmatter["obstruction"] = str(self.obstruction)
        return f"{yaml.safe_dump(frontmatter, sort_keys=False)}---\n{self.obj}\n"


def _object_class(kind: Kind) -> type[ExteriorObject]:
    if kind not in ("form", "multivector"):
        raise ValueError(f"Unknown kind {kind!r}")
    return DiffForm if kind == "form" else MultiVector


def _check_degree(n: int, degree: int):
    if n < 1 or not 1 <= degree <= n:
        raise DegreeError(f"Degree {degree} outside 1..{n}")


def positive_corpus(
    n: int,
    degree: int,
    count: int,
    seed: int = 0,
    kind: Kind = "form",
    degree_bound: int = 2,
    num_shears: int = 2,
) -> list[CorpusSample]:
    """Constant objects `sum lambda_I du^I` (or `Du^I`) written in x-coordinates through a random chart."""
    _check_degree(n, degree)
    cls = _object_class(kind)
    rng = random.Random(seed)

    samples = []
    for _ in range(count):
        chart = random_chart(n, degree_bound, num_shears, seed=rng.randrange(2 ** 32))
        constant = cls(n, degree, {
            index: random_coefficient(rng, nonzero=False) for index in multi_indices(n, degree)
        })
        if kind == "form":
            obj = pullback(chart, constant)
        else:
            obj = pushforward(chart.inverted(), constant)
        samples.append(CorpusSample(obj=obj, label=Verdict.CONSTANT, chart=chart))
    return samples


def obstruction_of(obj: ExteriorObject) -> ExteriorObject:
    """`d omega` for forms, `[V,V]` for multivectors."""
    if isinstance(obj, DiffForm):
        return exterior_derivative(obj)
    return schouten_bracket(obj, obj)


def _random_object(rng: random.Random, cls: type[ExteriorObject], n: int, degree: int, degree_bound: int) -> ExteriorObject:
    indices = multi_indices(n, degree)
    chosen = rng.sample(indices, rng.randint(1, min(3, len(indices))))
    return cls(n, degree, {index: random_poly(rng, n, degree_bound, terms=2) for index in chosen})


def negative_corpus(
    n: int,
    degree: int,
    count: int,
    seed: int = 0,
    kind: Kind = "form",
    degree_bound: int = 2,
    max_attempts: int = MAX_ATTEMPTS,
) -> list[CorpusSample]:
    """
    Objects whose obstruction is nonzero at a random rational point, evaluated exactly.

    :raises ValueError: For degrees where the obstruction vanishes identically.
    :raises CorpusExhausted: If a sample is not certified within `max_attempts` draws.
    """
    _check_degree(n, degree)
    cls = _object_class(kind)
    if kind == "form" and degree == n:
        raise ValueError("Every nonvanishing top-degree form has constant coefficients")
    if kind == "multivector" and (degree == 1 or 2 * degree - 1 > n):
        raise ValueError(f"[V,V] vanishes identically for {degree}-vectors on R^{n}")

    rng = random.Random(seed)
    samples = []
    for _ in range(count):
        for attempt in range(max_attempts):
            obj = _random_object(rng, cls, n, degree, degree_bound)
            obstruction = obstruction_of(obj)
            point = random_point(rng, n, 10)
            if obstruction.evaluate(point):
                samples.append(CorpusSample(obj=obj, label=Verdict.NOT_CONSTANT, obstruction=obstruction))
                break
            logger.debug(f"Uncertified candidate {obj} (attempt {attempt + 1})")
        else:
            raise CorpusExhausted(f"No certified negative sample after {max_attempts} attempts (n={n}, degree={degree}, {kind})")
    return samples


def generate_corpus(n: int, degree: int, count: int, seed: int = 0, kind: Kind = "form", polarity: Polarity = "positive") -> list[CorpusSample]:
    if polarity == "positive":
        return positive_corpus(n, degree, count, seed, kind)
    if polarity == "negative":
        return negative_corpus(n, degree, count, seed, kind)
    raise ValueError(f"Unknown polarity {polarity!r}")


def dump_corpus(samples: list[CorpusSample], out: Path):
    """One `sample-XXXX.txt` per sample, with `sample-XXXX.chart` alongside when a chart is known."""
    out.mkdir(parents=True, exist_ok=True)
    for number, sample in enumerate(samples):
        stem = f"sample-{number:04d}"
        (out / f"{stem}.txt").write_text(sample.render(), encoding="utf-8")
        if sample.chart is not None:
            (out / f"{stem}.chart").write_text(render_chart(sample.chart), encoding="utf-8")


class OracleIngestion:
    def get_run_by_id(self, run_id: int) -> CorpusRunRecord | None:
        with open_corpus_db() as session:
            result = session.get(CorpusRunRecord, run_id)
            # Ensure samples are loaded before session closes
            if result:
                result.eagerly_load_all()
            return result

    def get_last_run(self) -> CorpusRunRecord | None:
        with open_corpus_db() as session:
            result = CorpusRunRecord.get_latest(session)
            if result:
                result.eagerly_load_all()
            return result

    def ingest(
        self,
        n: int,
        degree: int,
        count: int,
        seed: int = 0,
        kind: Kind = "form",
        polarity: Polarity = "positive",
        dump_dir: Path | None = None,
    ) -> CorpusRunRecord:
        samples = generate_corpus(n, degree, count, seed, kind, polarity)
        logger.info(f"Generated {len(samples)} {polarity} {kind} samples (n={n}, degree={degree}, seed={seed})")

        with open_corpus_db() as session:
            run = CorpusRunRecord(n=n, degree=degree, kind=kind, polarity=polarity, seed=seed, count=count)
            session.add(run)
            session.commit()
            session.refresh(run)

            for sample in samples:
                session.add(CorpusSampleRecord(
                    run_id=run.id,
                    object_text=str(sample.obj),
                    chart_text=render_chart(sample.chart) if sample.chart is not None else None,
                    label=sample.label.value,
                    obstruction_text=str(sample.obstruction) if sample.obstruction is not None else None,
                ))
            session.commit()
            run_id = run.id

        if dump_dir is not None:
            dump_corpus(samples, dump_dir)
            logger.info(f"Dumped corpus to {dump_dir}")

        return self.get_run_by_id(run_id)
