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
Records of several campaign logs, one run per campaign and log file.
"""

from __future__ import annotations

import re
from collections import Counter, defaultdict
from pathlib import Path
from typing import Dict, Iterable, List, NamedTuple, Optional

from ..validator.record import InputRecord, read_log

_RUN_SUFFIX = re.compile(r"-run\d+$")


def group_name(campaign_id: str) -> str:
    """Campaign id without the ``-run<k>`` suffix of repeated campaigns."""
    return _RUN_SUFFIX.sub("", campaign_id)


class LoggedRun(NamedTuple):
    campaign_id: str
    source: Optional[Path]
    records: List[InputRecord]


def _split_by_campaign(
    records: Iterable[InputRecord], source: Optional[Path] = None
) -> List[LoggedRun]:
    by_campaign: Dict[str, List[InputRecord]] = defaultdict(list)
    for record in records:
        by_campaign[record.campaign_id].append(record)
    return [LoggedRun(campaign_id, source, rows) for campaign_id, rows in by_campaign.items()]


class RecordGroup:
    """Runs read from campaign logs.

    A run is identified by its campaign id. Campaign ids found in several
    logs are qualified with the log path, ``<campaign_id>@<path>``, so that
    repeated runs writing to different log directories stay apart.
    """

    def __init__(self, runs: List[LoggedRun]) -> None:
        self.runs = runs
        self.index = self._create_index(self.runs)

    @staticmethod
    def _create_index(runs: List[LoggedRun]) -> Dict[str, LoggedRun]:
        counts = Counter(run.campaign_id for run in runs)
        index: Dict[str, LoggedRun] = {}
        for run in runs:
            if counts[run.campaign_id] == 1:
                index[run.campaign_id] = run
            else:
                index[f"{run.campaign_id}@{run.source}"] = run
        return index

    @classmethod
    def from_records(cls, records: Iterable[InputRecord]) -> RecordGroup:
        return cls(_split_by_campaign(records))

    @classmethod
    def from_logs(cls, paths: Iterable[Path]) -> RecordGroup:
        runs: List[LoggedRun] = []
        for path in dict.fromkeys(paths):
            runs.extend(_split_by_campaign(read_log(path), path))
        return cls(runs)

    @property
    def records(self) -> List[InputRecord]:
        return [record for run in self.runs for record in run.records]

    def __getitem__(self, run_id: str) -> List[InputRecord]:
        return self.index[run_id].records

    def __len__(self) -> int:
        return len(self.index)

    def run(self, run_id: str) -> LoggedRun:
        return self.index[run_id]

    def get_index(self) -> List[str]:
        return sorted(self.index)

    def groups(self) -> Dict[str, List[str]]:
        """Run ids of every group of repeated runs."""
        output: Dict[str, List[str]] = defaultdict(list)
        for run_id in self.get_index():
            output[group_name(self.index[run_id].campaign_id)].append(run_id)
        return dict(output)
