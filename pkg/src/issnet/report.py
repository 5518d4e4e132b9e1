"""Certificate reports shared by the checking modules.

All numeric checks compare a left side against a right side and call a
point a violation when lhs > rhs + atol + rtol * |rhs|.  Reports store
the worst signed residual (max of lhs - rhs, negative when everything
passed with margin), a bounded list of the worst witnesses, and enough
metadata to rerun the check.  Nothing time- or host-dependent is
written, so serialized reports are bit-stable across reruns.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

MAX_WITNESSES = 32


@dataclass(frozen=True)
class Tolerances:
    atol: float = 1e-9
    rtol: float = 1e-9

    def violated(self, lhs: float, rhs: float) -> bool:
        return lhs - rhs > self.atol + self.rtol * abs(rhs)

    def to_dict(self) -> dict:
        return {"atol": self.atol, "rtol": self.rtol}


@dataclass(frozen=True)
class Witness:
    """One evaluated point: where, what was compared, the residual."""

    location: tuple[tuple[str, Any], ...]
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs

    def to_dict(self) -> dict:
        return {
            "location": {k: v for k, v in self.location},
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
        }

    def sort_key(self):
        # repr gives a total order over heterogeneous location values
        return (-self.residual, repr(self.location))


class ReportBuilder:
    """Accumulates comparisons; keeps the deterministic worst witnesses.

    Ties on residual break lexicographically on the witness location,
    so merging evaluation batches in any order yields the same report.
    """

    def __init__(self, check: str, tolerances: Tolerances):
        self.check = check
        self.tolerances = tolerances
        self.worst: Witness | None = None
        self.violations: list[Witness] = []
        self.count = 0

    def record(self, location: Mapping[str, Any] | Sequence[tuple[str, Any]], lhs: float, rhs: float) -> bool:
        loc = tuple(sorted(location.items())) if isinstance(location, Mapping) else tuple(location)
        w = Witness(loc, float(lhs), float(rhs))
        self.count += 1
        if self.worst is None or w.sort_key() < self.worst.sort_key():
            self.worst = w
        bad = self.tolerances.violated(w.lhs, w.rhs)
        if bad:
            self._add_violation(w)
        return not bad

    def fail(self, location: Mapping[str, Any] | Sequence[tuple[str, Any]], lhs: float, rhs: float) -> None:
        """Record a violation regardless of the numeric tolerances (used
        for strictness conditions that have their own margin rule)."""
        loc = tuple(sorted(location.items())) if isinstance(location, Mapping) else tuple(location)
        w = Witness(loc, float(lhs), float(rhs))
        self.count += 1
        if self.worst is None or w.sort_key() < self.worst.sort_key():
            self.worst = w
        self._add_violation(w)

    def _add_violation(self, w: Witness) -> None:
        self.violations.append(w)
        self.violations.sort(key=Witness.sort_key)
        del self.violations[MAX_WITNESSES:]

    def build(self, grid: Mapping[str, Any] | None = None, notes: Sequence[str] = ()) -> "CertificateReport":
        return CertificateReport(
            check=self.check,
            passed=not self.violations,
            worst_residual=self.worst.residual if self.worst is not None else float("-inf"),
            worst_witness=self.worst,
            witnesses=tuple(self.violations),
            evaluations=self.count,
            grid=dict(grid or {}),
            tolerances=self.tolerances,
            notes=tuple(notes),
        )


@dataclass(frozen=True)
class CertificateReport:
    check: str
    passed: bool
    worst_residual: float
    worst_witness: Witness | None
    witnesses: tuple[Witness, ...]
    evaluations: int
    grid: dict
    tolerances: Tolerances
    notes: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "passed": self.passed,
            "worst_residual": self.worst_residual,
            "worst_witness": self.worst_witness.to_dict() if self.worst_witness else None,
            "violation_witnesses": [w.to_dict() for w in self.witnesses],
            "evaluations": self.evaluations,
            "grid": self.grid,
            "tolerances": self.tolerances.to_dict(),
            "notes": list(self.notes),
        }

    def to_json_file(self, path) -> None:
        write_json(path, self.to_dict())


def write_json(path, payload) -> None:
    """Stable JSON: sorted keys, newline-terminated, exact float repr."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def write_witness_csv(path, reports: Sequence[CertificateReport]) -> None:
    """Violation witnesses of several reports flattened to CSV."""
    keys: list[str] = []
    for rep in reports:
        for w in rep.witnesses:
            for k, _ in w.location:
                if k not in keys:
                    keys.append(k)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["check"] + keys + ["lhs", "rhs", "residual"])
        for rep in reports:
            for w in rep.witnesses:
                loc = {k: v for k, v in w.location}
                cells: list[str] = [rep.check]
                for k in keys:
                    v = loc.get(k, "")
                    cells.append(repr(v) if isinstance(v, (float, tuple)) else str(v))
                cells += [repr(w.lhs), repr(w.rhs), repr(w.residual)]
                writer.writerow(cells)
