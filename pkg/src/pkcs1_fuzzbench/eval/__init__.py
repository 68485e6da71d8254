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
Analysis of campaign logs: validity, throughput and diversity.
"""

from .diversity import (
    DiversityStats,
    InsufficientRecordsError,
    corpus_diversity,
)
from .evaluator import Evaluator
from .metrics import edit_distance, lcs_length, nlcs
from .report import MetricsReport, MetricStat, RunMetrics, aggregate, revalidate
from .sample_group import LoggedRun, RecordGroup, group_name
from .series import SeriesPoint, ValiditySeries, validity_series
