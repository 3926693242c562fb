import pytest


@pytest.fixture(autouse=True)
def isolated_storage(tmp_path, monkeypatch):
    """Every test gets its own SQLite directory and the default detection knobs."""
    monkeypatch.setenv("CONSTCOEF_STORAGE_DIR", str(tmp_path / "storage"))
    for name in ("CONSTCOEF_SAMPLES", "CONSTCOEF_SEED", "CONSTCOEF_COEFFICIENT_BOUND"):
        monkeypatch.delenv(name, raising=False)
    return tmp_path / "storage"
