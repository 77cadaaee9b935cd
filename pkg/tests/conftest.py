import pytest


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    """Keeps every computation in the test process."""
    monkeypatch.setenv("BWLAB_THREADS", "1")
    monkeypatch.setenv("BWLAB_SEED", "1234")
