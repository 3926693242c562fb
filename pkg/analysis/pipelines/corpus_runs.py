from typing import AsyncIterable

from app.storage.oracle_corpus import CorpusRunRecord, CorpusSampleRecord

from ._base import Pipeline


class CorpusRunPipeline(Pipeline[None, CorpusSampleRecord]):
    """Source stage yielding the stored samples of one oracle corpus run."""

    def __init__(self, run: CorpusRunRecord, limit: int | None = None):
        self.run_record = run
        self.limit = limit

    async def run(self, input: None = None, metadata: dict | None = None) -> AsyncIterable[CorpusSampleRecord]:
        samples = self.run_record.samples
        for sample in samples[:self.limit] if self.limit is not None else samples:
            yield sample
