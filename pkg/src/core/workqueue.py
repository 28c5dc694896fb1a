"""Worker threads draining a queue of indexed tasks"""

import logging
import queue
import threading
from typing import Any, Callable, List, Optional, Sequence

logger = logging.getLogger(__name__)


class WorkQueue:
    """Runs independent tasks on worker threads.

    Results come back in task-index order whatever the thread count, so any
    reduction over them is deterministic. The first task failure is re-raised
    by `run` after the workers stop.
    """

    def __init__(self, threads: int = 1, progress_label: str = "tasks"):
        if threads < 1:
            raise ValueError(f"threads must be >= 1, got {threads}")
        self.threads = threads
        self.progress_label = progress_label
        self.task_queue: "queue.Queue" = queue.Queue()
        self.is_running = False
        self._workers: List[threading.Thread] = []
        self._results: List[Any] = []
        self._errors: List[Optional[BaseException]] = []
        self._lock = threading.Lock()
        self._done = 0

    def run(self, function: Callable[[Any], Any], items: Sequence[Any]) -> List[Any]:
        total = len(items)
        self._results = [None] * total
        self._errors = [None] * total
        self._done = 0
        for index, item in enumerate(items):
            self.task_queue.put((index, item))
        if self.threads == 1 or total <= 1:
            self._worker_loop(function, total)
        else:
            self.start(function, total)
            self.stop()
        failed = [(i, e) for i, e in enumerate(self._errors) if e is not None]
        if failed:
            index, error = failed[0]
            logger.error("%d of %d %s failed; first failure at task %d", len(failed), total,
                         self.progress_label, index)
            raise error
        return list(self._results)

    def start(self, function: Callable[[Any], Any], total: int):
        """Start worker threads"""
        self.is_running = True
        self._workers = []
        for n in range(min(self.threads, total)):
            worker = threading.Thread(target=self._worker_loop, args=(function, total), name=f"qtp-worker-{n}")
            worker.daemon = True
            worker.start()
            self._workers.append(worker)

    def stop(self):
        """Wait for workers to drain the queue"""
        for worker in self._workers:
            worker.join()
        self._workers = []
        self.is_running = False

    def _worker_loop(self, function: Callable[[Any], Any], total: int):
        while True:
            try:
                index, item = self.task_queue.get_nowait()
            except queue.Empty:
                return
            try:
                self._results[index] = function(item)
            except Exception as e:
                self._errors[index] = e
            finally:
                self.task_queue.task_done()
                with self._lock:
                    self._done += 1
                    done = self._done
                if done == total or done % max(1, total // 10) == 0:
                    logger.info("%s: %d/%d done", self.progress_label, done, total)
