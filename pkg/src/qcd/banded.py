"""Rule-defined infinite operators and their weight rules.

An operator is a constant diagonal, a superdiagonal weight sequence and a
finite patch of overrides in the top-left corner. With a 0-based basis e_0,
e_1, ..., the weight w_n (n >= 1) sits at entry (n-1, n), i.e. T e_n = e_{n-1} w_n.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from errors import ConfigError, PatchTooLarge
from qcore import ZERO, Quaternion, parse
from qlinalg import QMatrix


@dataclass(frozen=True)
class WeightRule:
    """n -> w_n for n >= 1, with a declared sup bound (None means unbounded)."""
    name: str
    fn: Callable[[int], Quaternion]
    bound: Optional[float]
    values: Tuple[Quaternion, ...] = ()

    def __call__(self, n: int) -> Quaternion:
        if n < 1:
            raise ValueError(f"weights are indexed from 1, got {n}")
        return Quaternion.coerce(self.fn(n))

    def moduli(self, n_max: int) -> np.ndarray:
        """|w_1|, ..., |w_{n_max}|."""
        return np.array([abs(self(n)) for n in range(1, n_max + 1)])

    def absolute(self) -> "WeightRule":
        return WeightRule(f"abs({self.name})", lambda n: Quaternion(abs(self(n))), self.bound)

    @classmethod
    def const(cls, c) -> "WeightRule":
        value = Quaternion.coerce(c)
        return cls(f"const:{value.to_text()}", lambda n: value, abs(value))

    @classmethod
    def ratio(cls) -> "WeightRule":
        """w_n = (n+1)/n; the products telescope to n+1."""
        return cls("ratio", lambda n: Quaternion((n + 1) / n), 2.0)

    @classmethod
    def from_values(cls, values: List[Quaternion], name: str = "custom") -> "WeightRule":
        """Finite list of weights; indices past the end repeat the last value."""
        if not values:
            raise ConfigError("custom weight list is empty")
        frozen = tuple(Quaternion.coerce(v) for v in values)
        return cls(name, lambda n: frozen[min(n, len(frozen)) - 1], max(abs(v) for v in frozen), frozen)

    @classmethod
    def pattern(cls, fn: Callable[[int], Quaternion], bound: Optional[float], name: str = "pattern") -> "WeightRule":
        return cls(name, fn, bound)

    def describe(self) -> Union[str, List[List[float]]]:
        """Form accepted back by operator files: the rule text, or the explicit weight list."""
        if self.values:
            return [v.to_list() for v in self.values]
        if self.name == "ratio" or self.name.startswith("const:"):
            return self.name
        raise ConfigError(f"weight rule '{self.name}' is a Python callable and cannot be written out")

    @classmethod
    def parse(cls, text: str) -> "WeightRule":
        """Weight DSL: 'const:c', 'ratio' or 'custom:file.json'."""
        text = text.strip()
        if text == "ratio":
            return cls.ratio()
        if text.startswith("const:"):
            try:
                return cls.const(parse(text[len("const:"):]))
            except ValueError as e:
                raise ConfigError(f"bad constant weight '{text}': {e}") from e
        if text.startswith("custom:"):
            return cls.from_file(text[len("custom:"):])
        raise ConfigError(f"unknown weight rule '{text}' (expected const:c, ratio or custom:file.json)")

    @classmethod
    def from_file(cls, path: str) -> "WeightRule":
        """JSON list of weights, each a number or a quaternion 4-array."""
        try:
            with open(path, "r") as handle:
                data = json.load(handle)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read weight file {path}: {e}") from e
        if isinstance(data, dict):
            data = data.get("weights")
        if not isinstance(data, list):
            raise ConfigError(f"weight file {path} must hold a list of weights")
        try:
            values = [Quaternion.from_list(v) if isinstance(v, list) else Quaternion.coerce(float(v)) for v in data]
        except (TypeError, ValueError) as e:
            raise ConfigError(f"bad weight in {path}: {e}") from e
        return cls.from_values(values, name=f"custom:{Path(path).name}")


@dataclass
class BandedOperator:
    """Constant diagonal + superdiagonal weights + top-left patch."""
    diag: Quaternion = ZERO
    weights: WeightRule = field(default_factory=lambda: WeightRule.const(1.0))
    patch: Dict[Tuple[int, int], Quaternion] = field(default_factory=dict)
    name: str = "banded"

    @property
    def patch_extent(self) -> int:
        if not self.patch:
            return 0
        return max(max(r, c) for r, c in self.patch) + 1

    @property
    def bandwidth(self) -> int:
        """Upper bandwidth including the patch (at least 1 for the weights)."""
        return max([1] + [c - r for r, c in self.patch])

    @property
    def bounded(self) -> bool:
        return self.weights.bound is not None

    def truncate(self, n: int) -> QMatrix:
        """Exact N x N leading corner."""
        if n < max(self.patch_extent, 1):
            raise PatchTooLarge(f"truncation {n} does not contain the patch of extent {self.patch_extent}")
        d1, d2 = self.diag.split()
        z1 = np.eye(n, dtype=complex) * d1
        z2 = np.eye(n, dtype=complex) * d2
        for col in range(1, n):
            w1, w2 = self.weights(col).split()
            z1[col - 1, col] = w1
            z2[col - 1, col] = w2
        for (r, c), value in self.patch.items():
            z1[r, c], z2[r, c] = Quaternion.coerce(value).split()
        return QMatrix(z1, z2)
