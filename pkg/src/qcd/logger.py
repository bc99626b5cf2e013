"""Logger implementations for qcd with factory pattern.

Two main implementations:
- ConsoleLogger: writes to the console, filtered by the QCD_LOG threshold
- MemoryLogger: aggregates entries in memory for tests

Numerical routines take an optional LoggerFactory so that tests can capture
diagnostics (rejected eigenvalue pairings, truncation guards, self-check
residuals) without touching stdout.
"""

from __future__ import annotations

import os
import sys
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from datetime import datetime
from typing import List, Optional, Protocol, TextIO

LEVELS = {"error": 0, "info": 1, "debug": 2}
LOG_ENV = "QCD_LOG"


def threshold_from_env() -> int:
    """Numeric threshold for the QCD_LOG setting; unknown values mean info."""
    name = os.environ.get(LOG_ENV, "info").strip().lower()
    return LEVELS.get(name, LEVELS["info"])


@dataclass(frozen=True)
class LogEntry:
    ts: datetime
    component: str
    message: str
    level: str = "info"

    @property
    def is_error(self) -> bool:
        return self.level == "error"

    def format(self) -> str:
        return f"{self.ts.strftime('%H:%M:%S')} | {self.level.upper():<5} | {self.component} | {self.message}"


class Logger(Protocol):
    """What numerical routines need from a logger."""

    def log(self, message: str, component: str = "core") -> None: ...
    def debug(self, message: str, component: str = "core") -> None: ...
    def error(self, message: str, component: str = "core") -> None: ...


class ConsoleLogger:
    """Logger that writes to the console.

    Errors always go to stderr. Info and debug lines go to stdout when the
    threshold allows them.
    """

    def __init__(self, component: str = "core", threshold: Optional[int] = None, stream: Optional[TextIO] = None):
        self.component = component
        self.threshold = threshold_from_env() if threshold is None else threshold
        self.stream = stream

    def _emit(self, level: str, message: str, component: Optional[str]) -> None:
        if LEVELS[level] > self.threshold:
            return
        entry = LogEntry(datetime.now(), component or self.component, message, level)
        stream = sys.stderr if level == "error" else (self.stream or sys.stdout)
        print(entry.format(), file=stream)

    def log(self, message: str, component: Optional[str] = None) -> None:
        self._emit("info", message, component)

    def debug(self, message: str, component: Optional[str] = None) -> None:
        self._emit("debug", message, component)

    def error(self, message: str, component: Optional[str] = None) -> None:
        self._emit("error", message, component)


class MemoryLogger:
    """Keeps entries in memory so tests can assert on diagnostics."""

    def __init__(self, component: str = "core"):
        self.component = component
        self._lock = threading.RLock()
        self._entries: List[LogEntry] = []

    def _append(self, level: str, message: str, component: Optional[str]) -> None:
        entry = LogEntry(datetime.now(), component or self.component, message, level)
        with self._lock:
            self._entries.append(entry)

    def log(self, message: str, component: Optional[str] = None) -> None:
        self._append("info", message, component)

    def debug(self, message: str, component: Optional[str] = None) -> None:
        self._append("debug", message, component)

    def error(self, message: str, component: Optional[str] = None) -> None:
        self._append("error", message, component)

    def entries(self) -> List[LogEntry]:
        with self._lock:
            return list(self._entries)

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()

    def has_errors(self) -> bool:
        with self._lock:
            return any(entry.is_error for entry in self._entries)

    def get_messages(self, level: Optional[str] = None) -> List[str]:
        with self._lock:
            return [e.message for e in self._entries if level is None or e.level == level]


class LoggerFactory(ABC):
    """Creates one logger per component (spectra, bundles, cli, ...)."""

    @abstractmethod
    def create_logger(self, component: str = "core") -> Logger:
        """Logger whose entries are stamped with component."""


class ConsoleLoggerFactory(LoggerFactory):
    """Factory that creates console loggers sharing one threshold and info stream."""

    def __init__(self, threshold: Optional[int] = None, stream: Optional[TextIO] = None):
        self.threshold = threshold
        self.stream = stream

    def create_logger(self, component: str = "core") -> Logger:
        return ConsoleLogger(component, self.threshold, self.stream)


class MemoryLoggerFactory(LoggerFactory):
    """Factory for testing that captures logs of every component in one place."""

    def __init__(self):
        self._shared_logger: Optional[MemoryLogger] = None
        self._lock = threading.Lock()

    def create_logger(self, component: str = "core") -> Logger:
        with self._lock:
            if self._shared_logger is None:
                self._shared_logger = MemoryLogger(component)
            return _ComponentView(self._shared_logger, component)

    def get_entries(self) -> List[LogEntry]:
        if self._shared_logger:
            return self._shared_logger.entries()
        return []

    def get_messages(self, level: Optional[str] = None) -> List[str]:
        if self._shared_logger:
            return self._shared_logger.get_messages(level)
        return []

    def clear(self) -> None:
        if self._shared_logger:
            self._shared_logger.clear()

    def has_errors(self) -> bool:
        if self._shared_logger:
            return self._shared_logger.has_errors()
        return False


class _ComponentView:
    """Stamps the creating component on entries written to a shared MemoryLogger."""

    def __init__(self, target: MemoryLogger, component: str):
        self._target = target
        self.component = component

    def log(self, message: str, component: Optional[str] = None) -> None:
        self._target.log(message, component or self.component)

    def debug(self, message: str, component: Optional[str] = None) -> None:
        self._target.debug(message, component or self.component)

    def error(self, message: str, component: Optional[str] = None) -> None:
        self._target.error(message, component or self.component)


# Replaced by tests and by cli.main
_default_factory: Optional[LoggerFactory] = None


def get_default_factory() -> LoggerFactory:
    """Process-wide factory; console output unless a test replaced it."""
    global _default_factory
    if _default_factory is None:
        _default_factory = ConsoleLoggerFactory()
    return _default_factory


def set_default_factory(factory: LoggerFactory) -> None:
    """Replace the process-wide factory, e.g. with a MemoryLoggerFactory."""
    global _default_factory
    _default_factory = factory


def get_logger(component: str = "core") -> Logger:
    """Logger for component from the process-wide factory."""
    return get_default_factory().create_logger(component)
