"""
Job Manager Module.

Handles background execution of independent tasks (parameter sweeps,
ensemble members) on a thread pool. Results keep the input order so the
output does not depend on the degree of parallelism.
"""
import logging
import threading
import traceback
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Callable, List, Optional, Sequence, Tuple

from tqdm import tqdm

logger = logging.getLogger(__name__)


class TaskPool(threading.Thread):
    """
    Background job mapping `fn` over `items`.

    A failing item does not stop the job; its exception is recorded in
    `failures` and its result slot stays None.
    """
    def __init__(
        self,
        fn: Callable[[Any], Any],
        items: Sequence[Any],
        jobs: int = 1,
        desc: str = "tasks",
        progress: bool = True,
    ):
        super().__init__(daemon=True)
        self.fn = fn
        self.items = list(items)
        self.jobs = max(1, int(jobs))
        self.desc = desc
        self.progress = progress

        self.results: List[Optional[Any]] = [None] * len(self.items)
        self.failures: List[Tuple[int, BaseException]] = []
        self._stop_event = threading.Event()
        self._lock = threading.Lock()
        self.status = {
            "progress": 0.0,
            "message": "Initializing...",
            "is_running": False,
            "is_complete": False,
            "error": None,
            "completed_count": 0,
        }

    def _call(self, index: int):
        if self._stop_event.is_set():
            return index, None, None
        try:
            return index, self.fn(self.items[index]), None
        except Exception as e:  # pylint: disable=broad-exception-caught
            logger.debug("task %d failed: %s", index, e)
            return index, None, e

    def run(self):
        """Execute all tasks."""
        self.status["is_running"] = True
        self.status["message"] = f"Running {len(self.items)} {self.desc}..."
        total = max(1, len(self.items))
        try:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                futures = [pool.submit(self._call, i) for i in range(len(self.items))]
                bar = tqdm(as_completed(futures), total=len(futures), desc=self.desc,
                           disable=not self.progress, leave=False)
                for future in bar:
                    index, value, error = future.result()
                    with self._lock:
                        if error is not None:
                            self.failures.append((index, error))
                        else:
                            self.results[index] = value
                        self.status["completed_count"] += 1
                        self.status["progress"] = self.status["completed_count"] / total
            self.failures.sort(key=lambda item: item[0])
            if self._stop_event.is_set():
                self.status["message"] = "Cancelled."
            else:
                self.status["message"] = "Complete!"
                self.status["is_complete"] = True
        except Exception as e:  # pylint: disable=broad-exception-caught
            self.status["error"] = str(e)
            self.status["message"] = f"Error: {e}"
            logger.error("task pool failed:\n%s", traceback.format_exc())
        finally:
            self.status["is_running"] = False

    def cancel(self):
        """Request cancellation; tasks not yet started are skipped."""
        self._stop_event.set()

    def map(self) -> List[Optional[Any]]:
        """Runs the job to completion and returns the ordered results."""
        self.start()
        self.join()
        if self.status["error"]:
            raise RuntimeError(self.status["error"])
        return self.results


def parallel_map(fn: Callable, items: Sequence[Any], jobs: int = 1,
                 desc: str = "tasks", progress: bool = False):
    """
    Ordered map over items.

    Returns:
        tuple: (results, failures)
    """
    pool = TaskPool(fn, items, jobs=jobs, desc=desc, progress=progress)
    results = pool.map()
    return results, pool.failures
