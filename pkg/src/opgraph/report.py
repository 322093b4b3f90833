"""Verification reports shared by every harness."""

from dataclasses import dataclass, field
import time

import numpy as np

from .formats import dumps, loads

__all__ = ["Report", "jsonable", "Timer"]


def jsonable(x):
    """Convert numpy scalars/arrays and complex numbers into JSON-ready values."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


@dataclass
class Report:
    """Outcome of one verification.

    ``passed`` is derived: every residual named in ``thresholds`` must be
    strictly below its threshold. Residuals without a threshold are recorded
    only.
    """

    check: str
    parameters: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    runtime_ms: int = 0

    @property
    def passed(self):
        return all(
            name in self.residuals and float(self.residuals[name]) < float(limit)
            for name, limit in self.thresholds.items()
        )

    def failures(self):
        return [
            name
            for name, limit in self.thresholds.items()
            if not (name in self.residuals and float(self.residuals[name]) < float(limit))
        ]

    def to_dict(self, include_runtime=True):
        d = {
            "check": self.check,
            "parameters": jsonable(self.parameters),
            "residuals": jsonable(self.residuals),
            "thresholds": jsonable(self.thresholds),
            "tables": jsonable(self.tables),
            "notes": list(self.notes),
            "pass": self.passed,
        }
        if include_runtime:
            d["runtime_ms"] = int(self.runtime_ms)
        return d

    def to_json(self, include_runtime=True, indent=2):
        return dumps(self.to_dict(include_runtime), indent=indent)

    @classmethod
    def from_dict(cls, d):
        r = cls(
            check=d["check"],
            parameters=dict(d.get("parameters", {})),
            residuals=dict(d.get("residuals", {})),
            thresholds=dict(d.get("thresholds", {})),
            tables=dict(d.get("tables", {})),
            notes=list(d.get("notes", [])),
            runtime_ms=int(d.get("runtime_ms", 0)),
        )
        if "pass" in d and bool(d["pass"]) != r.passed:
            raise ValueError("stored 'pass' disagrees with residuals and thresholds")
        return r

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(loads(text))


class Timer:
    """Context manager that stamps ``runtime_ms`` on a report."""

    def __init__(self):
        self.ms = 0

    def __enter__(self):
        self._t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = int(round((time.perf_counter() - self._t0) * 1000))
        return False
