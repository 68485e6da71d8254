# The PKCS#1 v1.5 Fuzzer Evaluation Bench (fuzzbench) toolset.
#
# Copyright (C) 2024, The fuzzbench authors
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.
"""
Per-run metrics, cross-run aggregation and report export.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Sequence

from tabulate import tabulate

from ..pkcs1 import oracle as OR
from ..pkcs1 import types as TT
from ..validator.record import InputRecord
from .diversity import DiversityStats
from .series import ValiditySeries

METRICS = (
    "validity_percent",
    "throughput",
    "edit_dist_mean",
    "nlcs_mean",
    "edit_dist_valid",
    "nlcs_valid",
    "acceptance_percent",
    "disagreements",
    "crashes",
)

HEADLINE = (
    ("Validity %", "validity_percent"),
    ("Inputs/s", "throughput"),
    ("EditDist", "edit_dist_mean"),
    ("NLCS", "nlcs_mean"),
    ("EditDist (valid)", "edit_dist_valid"),
    ("NLCS (valid)", "nlcs_valid"),
    ("Accepted %", "acceptance_percent"),
)


class MetricStat(NamedTuple):
    mean: float
    std: float
    runs: int

    def __str__(self) -> str:
        return f"{self.mean:.2f} ({self.std:.2f})"


@dataclass
class RunMetrics:
    """Metrics of one campaign.

    Attributes
    ----------
    campaign_id : str
        Campaign the records belong to.
    group : str
        Campaign id without its repetition suffix.
    records : int
        Number of logged records.
    valid : int
        Records the oracle accepted.
    throughput : float
        Records per wall-clock second.
    wall_seconds : float
        Duration used for the throughput.
    crashes : int
        Records the harness flagged as crashes.
    acceptance_percent : Optional[float]
        Share of subject responses that accepted the input. ``None`` when no
        record carries a response.
    disagreements : int
        Inputs the subject accepted although the oracle rejects them.
    series : ValiditySeries
        Validity over time.
    diversity : Optional[DiversityStats]
        Pairwise diversity, when at least two inputs were logged.
    """

    campaign_id: str
    group: str
    records: int
    valid: int
    throughput: float
    wall_seconds: float
    crashes: int
    acceptance_percent: Optional[float]
    disagreements: int
    series: ValiditySeries
    diversity: Optional[DiversityStats] = None

    @property
    def validity_percent(self) -> float:
        return 100.0 * self.valid / self.records if self.records else 0.0

    def values(self) -> Dict[str, float]:
        """Every available metric, keyed as in ``METRICS``."""
        output: Dict[str, float] = {
            "validity_percent": self.validity_percent,
            "throughput": self.throughput,
            "disagreements": float(self.disagreements),
            "crashes": float(self.crashes),
        }
        if self.acceptance_percent is not None:
            output["acceptance_percent"] = self.acceptance_percent
        if self.diversity is not None:
            output["edit_dist_mean"] = self.diversity.edit_dist_mean
            output["nlcs_mean"] = self.diversity.nlcs_mean
            variant = self.diversity.valid_only_variant
            if variant is not None:
                output["edit_dist_valid"] = variant.edit_dist_mean
                output["nlcs_valid"] = variant.nlcs_mean
        return {name: output[name] for name in METRICS if name in output}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "campaign_id": self.campaign_id,
            "group": self.group,
            "records": self.records,
            "valid": self.valid,
            "wall_seconds": self.wall_seconds,
            "metrics": self.values(),
            "series": self.series.to_dict(),
            "diversity": None if self.diversity is None else self.diversity.to_dict(),
        }


def aggregate_metrics(runs: Sequence[RunMetrics]) -> Dict[str, MetricStat]:
    """Mean and population standard deviation of every metric across runs.

    Runs lacking a metric do not count towards it.
    """
    per_metric: Dict[str, List[float]] = defaultdict(list)
    for run in runs:
        for name, value in run.values().items():
            per_metric[name].append(value)
    return {
        name: MetricStat(
            math.fsum(per_metric[name]) / len(per_metric[name]),
            statistics.pstdev(per_metric[name]),
            len(per_metric[name]),
        )
        for name in METRICS
        if per_metric.get(name)
    }


@dataclass
class MetricsReport:
    runs: List[RunMetrics]
    overall: Dict[str, MetricStat]
    groups: Dict[str, Dict[str, MetricStat]] = field(default_factory=dict)
    revalidation_mismatches: int = 0

    @property
    def campaign_ids(self) -> List[str]:
        return [run.campaign_id for run in self.runs]

    def to_dict(self) -> Dict[str, Any]:
        def stats(aggregate: Dict[str, MetricStat]) -> Dict[str, Dict[str, float]]:
            return {name: stat._asdict() for name, stat in aggregate.items()}

        return {
            "campaign_ids": self.campaign_ids,
            "runs": [run.to_dict() for run in self.runs],
            "aggregate": stats(self.overall),
            "groups": {group: stats(aggregate) for group, aggregate in self.groups.items()},
            "revalidation_mismatches": self.revalidation_mismatches,
        }

    def write_json(self, path: Path) -> None:
        with open(path, "w", encoding="utf8") as f_out:
            json.dump(self.to_dict(), f_out, indent=4)

    def write_csv(self, path: Path) -> None:
        """One row per campaign and metric, then one per group and metric."""
        with open(path, "w", encoding="utf8", newline="") as f_out:
            writer = csv.writer(f_out)
            writer.writerow(["scope", "campaign_id", "metric", "value", "std", "runs"])
            for run in self.runs:
                for name, value in run.values().items():
                    writer.writerow(["run", run.campaign_id, name, repr(value), "", 1])
            for group, aggregate in self.groups.items():
                for name, stat in aggregate.items():
                    writer.writerow(
                        ["group", group, name, repr(stat.mean), repr(stat.std), stat.runs]
                    )

    def write_tsv(self, path: Path) -> None:
        """Validity series of every run as gnuplot data blocks."""
        with open(path, "w", encoding="utf8") as f_out:
            for run in self.runs:
                f_out.write(f"# {run.campaign_id}\n")
                f_out.write("# bucket\tseconds\tinputs\tvalid\tcumulative_valid_percent\n")
                for row in run.series.to_tsv_rows():
                    f_out.write(row + "\n")
                f_out.write("\n\n")

    def headline_table(self) -> str:
        """Per-group ``mean (std)`` table of the headline metrics."""
        rows = []
        for group, aggregate in self.groups.items():
            runs = max(stat.runs for stat in aggregate.values())
            rows.append(
                [group, runs]
                + [str(aggregate[key]) if key in aggregate else "-" for _, key in HEADLINE]
            )
        headers = ["Campaign", "Runs"] + [title for title, _ in HEADLINE]
        return tabulate(rows, headers=headers, disable_numparse=True)


def aggregate(runs: Sequence[RunMetrics]) -> MetricsReport:
    """Aggregate over all runs and over each group of repeated runs."""
    by_group: Dict[str, List[RunMetrics]] = defaultdict(list)
    for run in runs:
        by_group[run.group].append(run)
    return MetricsReport(
        runs=list(runs),
        overall=aggregate_metrics(runs),
        groups={group: aggregate_metrics(members) for group, members in by_group.items()},
    )


def revalidate(records: Sequence[InputRecord], params: TT.OracleParams) -> List[InputRecord]:
    """Records whose logged verdict differs from the oracle's verdict now."""
    mismatches = []
    for record in records:
        if record.decode_error:
            continue
        verdict = OR.validate(record.raw, params)
        if verdict.valid != record.valid or verdict.reason_names() != record.reasons:
            mismatches.append(record)
    return mismatches
