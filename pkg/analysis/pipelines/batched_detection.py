import asyncio
import logging
from typing import AsyncIterable, Callable

from analysis.detectors.reports import DetectionReport
from app.storage.oracle_corpus import CorpusSampleRecord, DetectionRecord, open_corpus_db

from ._base import Pipeline


logger = logging.getLogger('analysis.pipelines.batched_detection')

Detector = Callable[[CorpusSampleRecord], DetectionReport]


class BatchedDetectionPipeline(Pipeline[CorpusSampleRecord, DetectionRecord]):
    """
    Pipeline that batches corpus samples into batches of size `batch_size` and runs the detector on
    up to `concurrency` batches at a time, off the event loop. Results are cached per sample and
    `config_key` unless `ignore_cached` is set.
    """

    def __init__(
        self,
        detector: Detector,
        config_key: str,
        ignore_cached: bool = False,
        batch_size: int = 10,
        concurrency: int = 4,
        filter_samples: Callable[[CorpusSampleRecord], bool] = lambda _: True,
    ):
        if batch_size < 1 or concurrency < 1:
            raise ValueError("batch_size and concurrency must be positive")
        self.detector = detector
        self.config_key = config_key
        self.ignore_cached = ignore_cached
        self.batch_size = batch_size
        self.concurrency = concurrency
        self.filter_samples = filter_samples

    async def run(self, input: AsyncIterable[CorpusSampleRecord], metadata: dict | None = None) -> AsyncIterable[DetectionRecord]:
        current_batch: list[CorpusSampleRecord] = []
        batches: list[list[CorpusSampleRecord]] = []

        async for sample in input:
            if not self.filter_samples(sample):
                continue
            current_batch.append(sample)
            if len(current_batch) >= self.batch_size:
                batches.append(current_batch)
                current_batch = []

        if current_batch:
            batches.append(current_batch)

        async for record in self._run_batches(batches):
            yield record

    async def _run_batches(self, batches: list[list[CorpusSampleRecord]]) -> AsyncIterable[DetectionRecord]:
        for index in range(0, len(batches), self.concurrency):
            chunk = batches[index:index + self.concurrency]
            logger.info(f"Running batches {index + 1}-{index + len(chunk)} of {len(batches)}")

            async with asyncio.TaskGroup() as tg:
                tasks = [tg.create_task(asyncio.to_thread(self._run_batch, batch)) for batch in chunk]

            for task in tasks:
                for record in task.result():
                    yield record

    def _run_batch(self, batch: list[CorpusSampleRecord]) -> list[DetectionRecord]:
        return [self._detect(sample) for sample in batch]

    def _detect(self, sample: CorpusSampleRecord) -> DetectionRecord:
        with open_corpus_db() as session:
            record = DetectionRecord.query(session, sample_id=sample.id, config_key=self.config_key)
            if record and not self.ignore_cached:
                record.eagerly_load_all()
                return record

        report = self.detector(sample)
        record = DetectionRecord(
            sample_id=sample.id,
            config_key=self.config_key,
            verdict=report.verdict.value,
            report=report.model_dump(mode="json", by_alias=True),
            schema_version=report.schema_version,
        )

        with open_corpus_db() as session:
            session.add(record)
            session.commit()
            session.refresh(record)
            record.eagerly_load_all()

        return record
