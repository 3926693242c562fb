import yaml
from collections import Counter
from hashlib import sha256
from pathlib import Path

from pydantic import BaseModel, ConfigDict

from analysis.detectors.conformal import detect_conformal
from analysis.detectors.engine import detect
from analysis.detectors.reports import DetectConfig, DetectionReport
from analysis.pipelines.batched_detection import BatchedDetectionPipeline
from analysis.pipelines.corpus_runs import CorpusRunPipeline
from app.storage.oracle_corpus import CorpusRunRecord, CorpusSampleRecord, DetectionRecord
from ingress.expressions.chart_file import load_chart, parse_chart
from ingress.expressions.parser import Kind, parse_object, parse_point
from kernel.exterior import DiffForm, MultiVector


class Problem(BaseModel):
    """A detection problem read from a problem file: the object plus its detection settings."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    obj: DiffForm | MultiVector
    config: DetectConfig
    conformal: bool = False


def split_frontmatter(content: str) -> tuple[dict, str]:
    # Add a newline to the beginning, so we can always assume a separator line, even if the frontmatter is empty
    content = "\n" + content

    if "\n---\n" in content:
        separator_index = content.find("\n---\n")
        config = yaml.safe_load(content[:separator_index]) or {}
        body = content[separator_index + 5:]
    else:
        config = {}
        body = content
    if not isinstance(config, dict):
        raise ValueError("Problem frontmatter must be a mapping")
    return config, body.strip()


def load_problem(problem_file: Path, n: int | None = None, kind: Kind | None = None, **overrides) -> Problem:
    """
    Read a problem file: optional YAML frontmatter (`n`, `kind`, `point`, `samples`, `seed`,
    `chart`, `conformal`), a `---` line, then the object expression. Explicit arguments win over
    the frontmatter.
    """
    with open(problem_file, "r", encoding="utf-8") as f:
        frontmatter, expression = split_frontmatter(f.read())

    n = n if n is not None else frontmatter.get("n")
    if n is None:
        raise ValueError(f"{problem_file}: dimension n is neither in the frontmatter nor given")
    obj = parse_object(expression, int(n), kind or frontmatter.get("kind"))

    values = {key: frontmatter[key] for key in ("samples", "seed") if key in frontmatter}
    if "point" in frontmatter:
        values["point"] = parse_point(str(frontmatter["point"]), int(n))
    if "chart" in frontmatter:
        values["chart"] = load_chart(problem_file.parent / frontmatter["chart"], int(n))
    values.update({key: value for key, value in overrides.items() if value is not None})

    return Problem(obj=obj, config=DetectConfig.from_env(**values), conformal=bool(frontmatter.get("conformal", False)))


def solve_problem(problem: Problem) -> DetectionReport:
    return detect_conformal(problem.obj, problem.config) if problem.conformal else detect(problem.obj, problem.config)


def sample_object(sample: CorpusSampleRecord) -> DiffForm | MultiVector:
    run = sample.run
    return parse_object(sample.object_text, run.n, run.kind, run.degree)


def detect_sample(sample: CorpusSampleRecord, config: DetectConfig, use_charts: bool = True) -> DetectionReport:
    """Detect a stored sample, supplying its chart as a candidate witness when `use_charts` is set."""
    obj = sample_object(sample)
    if use_charts and sample.chart_text:
        config = config.model_copy(update={"chart": parse_chart(sample.chart_text, obj.n)})
    return detect(obj, config)


def config_key(config: DetectConfig, use_charts: bool) -> str:
    settings = f"samples={config.samples};seed={config.seed};bound={config.coefficient_bound};charts={use_charts}"
    return "detect:" + sha256(settings.encode()).hexdigest()[:6]


def create_detection_pipeline(
    run: CorpusRunRecord,
    config: DetectConfig,
    use_charts: bool = True,
    ignore_cached: bool = False,
    concurrency: int = 4,
):
    detection = BatchedDetectionPipeline(
        detector=lambda sample: detect_sample(sample, config, use_charts),
        config_key=config_key(config, use_charts),
        ignore_cached=ignore_cached,
        concurrency=concurrency,
    )
    return CorpusRunPipeline(run) | detection


class ConfusionSummary(BaseModel):
    total: int
    correct: int
    by_outcome: dict[str, int]

    @property
    def misclassified(self) -> int:
        return self.total - self.correct

    def render(self) -> str:
        lines = [f"{self.correct}/{self.total} correct, {self.misclassified} misclassified"]
        lines += [f"  {outcome}: {count}" for outcome, count in sorted(self.by_outcome.items())]
        return "\n".join(lines)


def summarize(records: list[DetectionRecord]) -> ConfusionSummary:
    outcomes = Counter(f"{record.sample.label} -> {record.verdict}" for record in records)
    return ConfusionSummary(
        total=len(records),
        correct=sum(1 for record in records if record.correct),
        by_outcome=dict(outcomes),
    )
