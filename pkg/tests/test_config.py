from speiser_escape.config import Settings
from speiser_escape.parallel import map_row_blocks, row_blocks


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("SPEISER_WORKERS", "2")
    monkeypatch.setenv("SPEISER_LOG_LEVEL", "DEBUG")
    settings = Settings()
    assert settings.workers == 2
    assert settings.log_level == "DEBUG"


def test_row_blocks_cover_all_rows():
    assert row_blocks(10, 4) == [(0, 4), (4, 8), (8, 10)]


def test_map_row_blocks_keeps_row_order():
    parts = map_row_blocks(lambda start, stop: list(range(start, stop)), 100, workers=4, block=7)
    assert [row for part in parts for row in part] == list(range(100))
