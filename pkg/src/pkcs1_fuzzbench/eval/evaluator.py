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
Evaluation of campaign logs.
"""

import logging
from dataclasses import replace
from typing import List, Optional, Sequence
from warnings import warn

from ..controller.campaign import CampaignSummary
from ..validator.record import CRASH_STATUS, InputRecord
from .diversity import (
    DEFAULT_REPETITIONS,
    DEFAULT_SAMPLE_SIZE,
    DiversityStats,
    InsufficientRecordsError,
    diversity,
)
from .report import MetricsReport, RunMetrics, aggregate
from .sample_group import group_name
from .series import DEFAULT_BUCKET_SECONDS, validity_series

LOGGER = logging.getLogger(__name__)

ACCEPTED_STATUS = "1"
REJECTED_STATUS = "0"


def observed_span(records: Sequence[InputRecord]) -> float:
    """Seconds between the first and the last record, 1 s when they coincide."""
    times = [record.time for record in records]
    span = (max(times) - min(times)).total_seconds()
    return span if span > 0 else 1.0


class Evaluator:
    """Accumulates the metrics of campaign runs.

    Parameters
    ----------
    sample_size : int
        Inputs sampled per diversity repetition.
    repetitions : int
        Diversity repetitions.
    bucket_seconds : int
        Width of the validity series buckets.
    rng_seed : int
        Seed of the diversity sampling.
    progress : bool
        Show progress bars for diversity computations.
    """

    def __init__(
        self,
        sample_size: int = DEFAULT_SAMPLE_SIZE,
        repetitions: int = DEFAULT_REPETITIONS,
        bucket_seconds: int = DEFAULT_BUCKET_SECONDS,
        rng_seed: int = 0,
        progress: bool = False,
    ) -> None:
        self.sample_size = sample_size
        self.repetitions = repetitions
        self.bucket_seconds = bucket_seconds
        self.rng_seed = rng_seed
        self.progress = progress
        self.runs: List[RunMetrics] = []

    def update(
        self,
        campaign_id: str,
        records: Sequence[InputRecord],
        summary: Optional[CampaignSummary] = None,
        group: Optional[str] = None,
    ) -> RunMetrics:
        """Compute the metrics of one run and keep them for the summary.

        Runs are aggregated by ``group``, the campaign id without its ``-run<k>``
        suffix by default.

        Raises
        ------
        InsufficientRecordsError
            If the run has no records.
        """
        if not records:
            raise InsufficientRecordsError(f"Campaign {campaign_id} has no records")

        wall_seconds = summary.wall_seconds if summary is not None else observed_span(records)
        responses = [
            record for record in records if record.status in (ACCEPTED_STATUS, REJECTED_STATUS)
        ]
        accepted = [record for record in responses if record.status == ACCEPTED_STATUS]

        run = RunMetrics(
            campaign_id=campaign_id,
            group=group or group_name(campaign_id),
            records=len(records),
            valid=sum(record.valid for record in records),
            throughput=len(records) / wall_seconds,
            wall_seconds=wall_seconds,
            crashes=sum(record.status == CRASH_STATUS for record in records),
            acceptance_percent=(
                100.0 * len(accepted) / len(responses) if responses else None
            ),
            disagreements=sum(not record.valid for record in accepted),
            series=validity_series(records, self.bucket_seconds),
            diversity=self._diversity(campaign_id, records),
        )
        self.runs.append(run)
        LOGGER.debug(
            "%s: %.2f%% valid of %d records", campaign_id, run.validity_percent, run.records
        )
        return run

    def _diversity(
        self, campaign_id: str, records: Sequence[InputRecord]
    ) -> Optional[DiversityStats]:
        options = dict(
            sample_size=self.sample_size,
            repetitions=self.repetitions,
            rng_seed=self.rng_seed,
            progress=self.progress,
        )
        try:
            stats = diversity(records, **options)
        except InsufficientRecordsError as exc:
            warn(f"No diversity for {campaign_id}: {exc}")
            return None
        try:
            variant = diversity(records, valid_only=True, **options)
        except InsufficientRecordsError:
            return stats
        return replace(stats, valid_only_variant=variant)

    def summarise(self) -> MetricsReport:
        """Report over every run seen so far."""
        return aggregate(self.runs)
