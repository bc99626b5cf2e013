#!/usr/bin/env python3
"""
Sweep Orchestrator

Runs independent numerical tasks (grid points, truncations, suite checks) on a
thread pool while tracking a status per task key. Results come back in the
order the tasks were submitted so that reports are deterministic.
"""

import threading
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

from logger import LoggerFactory, get_default_factory


class TaskStatus(Enum):
    """Enum for task status values"""
    STARTED = "started"
    PENDING = "pending"
    COMPLETE = "complete"
    ERROR = "error"


class TaskStatusDict(Dict[str, TaskStatus]):
    """A specialized dictionary for tracking task statuses with helper methods"""

    def copy(self) -> 'TaskStatusDict':
        """Return a copy that preserves the TaskStatusDict type"""
        new_dict = TaskStatusDict()
        new_dict.update(self)
        return new_dict

    def has_errors(self, task_id: str) -> bool:
        return self.get(task_id, TaskStatus.PENDING) == TaskStatus.ERROR

    def is_completed(self, task_ids: List[str]) -> bool:
        return all(self.get(task_id, TaskStatus.PENDING) == TaskStatus.COMPLETE for task_id in task_ids)

    def all_complete(self) -> bool:
        return len(self) > 0 and all(status == TaskStatus.COMPLETE for status in self.values())


class SweepOrchestrator:
    """Executes keyed tasks in parallel.

    Task lifecycle is PENDING -> STARTED -> COMPLETE/ERROR. A failing task does
    not cancel the others; the first failure (in submission order) is re-raised
    once every task has settled, unless raise_errors is False.
    """

    def __init__(self, max_workers: int = 4, logger_factory: Optional[LoggerFactory] = None):
        self._data: TaskStatusDict = TaskStatusDict()
        self._errors: Dict[str, BaseException] = {}
        self._lock = threading.Lock()
        self._max_workers = max_workers
        self._logger_factory = logger_factory or get_default_factory()
        self._logger = self._logger_factory.create_logger("sweep_orchestrator")

    def get(self, key: str) -> TaskStatus:
        with self._lock:
            return self._data.get(key, TaskStatus.PENDING)

    def set(self, key: str, value: TaskStatus) -> None:
        with self._lock:
            self._data[key] = value

    def statuses(self) -> TaskStatusDict:
        with self._lock:
            return self._data.copy()

    def errors(self) -> Dict[str, BaseException]:
        with self._lock:
            return dict(self._errors)

    def has_errors(self) -> bool:
        with self._lock:
            return any(status == TaskStatus.ERROR for status in self._data.values())

    def is_complete(self) -> bool:
        with self._lock:
            return self._data.all_complete()

    def _run_one(self, key: str, task: Callable[[], Any]) -> Tuple[str, Any]:
        self.set(key, TaskStatus.STARTED)
        try:
            result = task()
        except Exception as e:
            with self._lock:
                self._data[key] = TaskStatus.ERROR
                self._errors[key] = e
            self._logger.error(f"task {key} failed: {type(e).__name__}: {e}")
            return key, None
        self.set(key, TaskStatus.COMPLETE)
        self._logger.debug(f"task {key} complete")
        return key, result

    def run(self, tasks: Mapping[str, Callable[[], Any]], raise_errors: bool = True) -> Dict[str, Any]:
        """Run every task and return {key: result} in submission order."""
        keys = list(tasks)
        with self._lock:
            for key in keys:
                self._data[key] = TaskStatus.PENDING

        if self._max_workers == 1 or len(keys) <= 1:
            settled = [self._run_one(key, tasks[key]) for key in keys]
        else:
            with ThreadPoolExecutor(max_workers=self._max_workers, thread_name_prefix="sweep-") as executor:
                futures = [executor.submit(self._run_one, key, tasks[key]) for key in keys]
                settled = [future.result() for future in futures]

        results = dict(settled)
        if raise_errors:
            errors = self.errors()
            for key in keys:
                if key in errors:
                    raise errors[key]
        return results

    def map(self, fn: Callable[[Any], Any], items: List[Any], prefix: str = "item") -> List[Any]:
        """Apply fn to each item in parallel; results keep the order of items."""
        tasks = {f"{prefix}-{index}": (lambda item=item: fn(item)) for index, item in enumerate(items)}
        results = self.run(tasks)
        return [results[key] for key in tasks]
