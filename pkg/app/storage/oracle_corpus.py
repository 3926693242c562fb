import os
from datetime import datetime
from pathlib import Path
from typing import List

from sqlalchemy import Column, DateTime, ForeignKey, Integer, JSON, String, create_engine, func, select
from sqlalchemy.orm import Mapped, Session, declarative_base, relationship


Base = declarative_base()


def storage_path() -> Path:
    return Path(os.getenv("CONSTCOEF_STORAGE_DIR", "storage"))


def open_corpus_db():
    """
    Open the oracle corpus database and create the tables if they don't exist.

    :return: A session to the database.

    Example:
    ```python
    with open_corpus_db() as session:
        session.add(CorpusRunRecord(n=3, degree=2, kind="form", polarity="positive", seed=0, count=10))
        session.commit()
    ```
    """
    path = storage_path()
    path.mkdir(parents=True, exist_ok=True)
    engine = create_engine(f"sqlite:///{(path / 'constcoef.sqlite').absolute()}")

    Base.metadata.create_all(engine)
    return Session(engine)


class CorpusRunRecord(Base):
    __tablename__ = "corpus_runs"

    id: Mapped[int] = Column(Integer, primary_key=True)
    created_at: Mapped[datetime] = Column(DateTime, default=func.now())
    n: Mapped[int] = Column(Integer)
    degree: Mapped[int] = Column(Integer)
    kind: Mapped[str] = Column(String)
    polarity: Mapped[str] = Column(String)
    seed: Mapped[int] = Column(Integer)
    count: Mapped[int] = Column(Integer)

    samples: Mapped[List['CorpusSampleRecord']] = relationship(back_populates="run", order_by="CorpusSampleRecord.id")

    @classmethod
    def get_latest(cls, session: Session) -> 'CorpusRunRecord | None':
        query = select(cls).order_by(cls.created_at.desc(), cls.id.desc()).limit(1)
        return session.execute(query).scalar_one_or_none()

    def eagerly_load_all(self):
        for sample in self.samples:
            # Load the backwards relationship while the session is open
            _ = sample.run


class CorpusSampleRecord(Base):
    __tablename__ = "corpus_samples"

    id: Mapped[int] = Column(Integer, primary_key=True)
    run_id: Mapped[int] = Column(Integer, ForeignKey("corpus_runs.id"))
    object_text: Mapped[str] = Column(String)
    chart_text: Mapped[str | None] = Column(String, nullable=True)
    label: Mapped[str] = Column(String)
    obstruction_text: Mapped[str | None] = Column(String, nullable=True)

    run: Mapped[CorpusRunRecord] = relationship(back_populates="samples")


class DetectionRecord(Base):
    __tablename__ = "detection_records"

    id: Mapped[int] = Column(Integer, primary_key=True)
    sample_id: Mapped[int] = Column(Integer, ForeignKey("corpus_samples.id"))
    created_at: Mapped[datetime] = Column(DateTime, default=func.now())
    config_key: Mapped[str] = Column(String)
    verdict: Mapped[str] = Column(String)
    report: Mapped[dict] = Column(JSON)
    schema_version: Mapped[int] = Column(Integer, default=1)

    sample: Mapped[CorpusSampleRecord] = relationship()

    @property
    def correct(self) -> bool:
        return self.verdict == self.sample.label

    @classmethod
    def query(cls, session: Session, sample_id: int, config_key: str) -> 'DetectionRecord | None':
        query = select(cls).where(cls.sample_id == sample_id, cls.config_key == config_key).order_by(cls.created_at.desc(), cls.id.desc())
        return session.execute(query).scalars().first()

    def eagerly_load_all(self):
        self.sample.run.eagerly_load_all()
