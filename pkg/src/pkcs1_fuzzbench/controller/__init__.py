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
Campaign controller: configuration, built-in harness and campaign runner.
"""

from .campaign import (
    CampaignError,
    CampaignSummary,
    find_collisions,
    read_summary,
    run_campaign,
    run_many,
    summary_path,
)
from .config import (
    BuiltinFuzzer,
    CampaignConfig,
    ConfigError,
    ExternalFuzzer,
    ExternalSubjectSpec,
    MockSubjectSpec,
    load_config,
    parse_config,
)
from .harness import Harness, send_input
