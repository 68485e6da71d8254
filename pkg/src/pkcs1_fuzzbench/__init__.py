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
Evaluation bench for fuzzers of PKCS#1 v1.5 signature verification.
"""

__version__ = "0.1.0"
__author__ = "The fuzzbench authors"

from .controller import (
    CampaignConfig,
    CampaignError,
    CampaignSummary,
    ConfigError,
    load_config,
    read_summary,
    run_campaign,
    run_many,
)
from .eval import (
    Evaluator,
    MetricsReport,
    RecordGroup,
    corpus_diversity,
    edit_distance,
    nlcs,
    revalidate,
)
from .generators import (
    ConstraintAwareGenerator,
    ContextFreeGenerator,
    FieldMutationGenerator,
    GeneratorStrategy,
    MutationConfig,
    MutationGenerator,
    build_generator,
    generator_types,
)
from .pkcs1 import oracle as OR
from .pkcs1 import rsa as RSA
from .pkcs1 import types as TT
from .subjects import ExternalSubject, MockSubject, SubjectPolicy, run_subject
from .validator import InputRecord, ValidatorService, read_log, serve, shutdown
