import threading
import time

import pandas as pd
import pytest

from src.errors import SpectrumError
from src.job_manager import TaskPool, parallel_map
from src.storage import OutputStore


@pytest.mark.parametrize("jobs", [1, 3, 8])
def test_results_keep_input_order(jobs):
    def slow_square(x):
        time.sleep(0.001 * (5 - x % 5))
        return x * x

    results, failures = parallel_map(slow_square, range(20), jobs=jobs)
    assert results == [x * x for x in range(20)]
    assert failures == []


def test_failures_are_collected():
    def fn(x):
        if x % 3 == 0:
            raise SpectrumError(f"item {x}")
        return x

    results, failures = parallel_map(fn, range(7), jobs=2)
    assert [index for index, _ in failures] == [0, 3, 6]
    assert all(isinstance(error, SpectrumError) for _, error in failures)
    assert results == [None, 1, 2, None, 4, 5, None]


def test_status_after_completion():
    pool = TaskPool(lambda x: x + 1, [1, 2, 3], jobs=2, progress=False)
    assert pool.map() == [2, 3, 4]
    assert pool.status["is_complete"]
    assert pool.status["completed_count"] == 3
    assert pool.status["progress"] == 1.0
    assert not pool.status["is_running"]


def test_cancel_skips_pending_items():
    gate = threading.Event()

    def fn(x):
        gate.wait(1.0)
        return x

    pool = TaskPool(fn, range(10), jobs=1, progress=False)
    pool.start()
    pool.cancel()
    gate.set()
    pool.join()
    assert pool.status["message"] == "Cancelled."
    assert pool.results.count(None) >= 8


def test_output_store(tmp_path):
    store = OutputStore(str(tmp_path / "out"))
    store.write_csv(pd.DataFrame({"k": [1, 2], "E": [0.5, 0.25]}), "spectrum.csv")
    store.write_text("scheme = dg\n", "manifest.txt")
    assert store.written == ["spectrum.csv", "manifest.txt"]
    assert store.file_exists("spectrum.csv")
    assert store.read_csv("spectrum.csv").E.tolist() == [0.5, 0.25]
    assert store.read_text("manifest.txt") == "scheme = dg\n"
    with open(store.path("spectrum.csv"), "rb") as f:
        assert b"\r\n" not in f.read()
