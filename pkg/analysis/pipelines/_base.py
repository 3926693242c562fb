from abc import ABC, abstractmethod
from typing import AsyncIterable, Generic, TypeVar

I = TypeVar("I")
O = TypeVar("O")
T = TypeVar("T")


class Pipeline(Generic[I, O], ABC):
    """An async stage from a stream of `I` to a stream of `O`. Stages compose with `first | second`."""

    @abstractmethod
    def run(self, input: AsyncIterable[I] | None, metadata: dict | None = None) -> AsyncIterable[O]:
        """Run the stage as an async generator."""

    def __ror__(self, first_pipeline: 'Pipeline[T, I]') -> 'Pipeline[T, O]':
        return ComposedPipeline(first_pipeline, self)


class ComposedPipeline(Pipeline[T, O]):
    def __init__(self, first_pipeline: Pipeline[T, I], second_pipeline: Pipeline[I, O]):
        self.first_pipeline = first_pipeline
        self.second_pipeline = second_pipeline

    async def run(self, input: AsyncIterable[T] | None, metadata: dict | None = None) -> AsyncIterable[O]:
        stream = self.first_pipeline.run(input, metadata)
        async for item in self.second_pipeline.run(stream, metadata):
            yield item


async def collect(stream: AsyncIterable[T]) -> list[T]:
    return [item async for item in stream]
