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
Validity over time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Sequence

from sortedcontainers import SortedDict, SortedList

from ..validator.record import InputRecord

DEFAULT_BUCKET_SECONDS = 600


class SeriesPoint(NamedTuple):
    bucket_index: int
    inputs: int
    valid: int
    cumulative_valid_percent: float


@dataclass
class ValiditySeries:
    """Cumulative validity percentage at the end of every time bucket.

    Buckets without records between the first and the last one are kept, with
    zero counts and the running percentage carried over.
    """

    bucket_seconds: int
    points: List[SeriesPoint] = field(default_factory=list)

    @property
    def final_percent(self) -> float:
        return self.points[-1].cumulative_valid_percent if self.points else 0.0

    def to_dict(self) -> Dict[str, object]:
        return {
            "bucket_seconds": self.bucket_seconds,
            "points": [point._asdict() for point in self.points],
        }

    def to_tsv_rows(self) -> List[str]:
        """Rows of ``bucket, elapsed seconds, inputs, valid, cumulative %``."""
        return [
            f"{point.bucket_index}\t{(point.bucket_index + 1) * self.bucket_seconds}\t"
            f"{point.inputs}\t{point.valid}\t{point.cumulative_valid_percent:.4f}"
            for point in self.points
        ]


def validity_series(
    records: Sequence[InputRecord], bucket_seconds: int = DEFAULT_BUCKET_SECONDS
) -> ValiditySeries:
    """Bucket records by arrival time relative to the first one.

    Parameters
    ----------
    records : Sequence[InputRecord]
        Records of one campaign, in any order.
    bucket_seconds : int
        Width of a bucket.

    Returns
    -------
    ValiditySeries
        One point per bucket; empty for an empty log.
    """
    if bucket_seconds <= 0:
        raise ValueError(f"bucket_seconds must be positive, got {bucket_seconds}")
    series = ValiditySeries(bucket_seconds)
    if not records:
        return series

    arrivals = SortedList((record.time, record.valid) for record in records)
    first = arrivals[0][0]
    buckets: SortedDict = SortedDict()
    for time, valid in arrivals:
        index = int((time - first).total_seconds() // bucket_seconds)
        inputs, valid_count = buckets.get(index, (0, 0))
        buckets[index] = (inputs + 1, valid_count + int(valid))

    total = valid_total = 0
    for index in range(buckets.keys()[-1] + 1):
        inputs, valid_count = buckets.get(index, (0, 0))
        total += inputs
        valid_total += valid_count
        percent = 100.0 * valid_total / total if total else 0.0
        series.points.append(SeriesPoint(index, inputs, valid_count, percent))
    return series
