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
Reference input generators.
"""

from .base import (
    Generator,
    GeneratorConfigError,
    GeneratorStrategy,
    load_seed_corpus,
    write_inputs,
)
from .constraint_aware import ConstraintAwareGenerator, gen_constraint_aware
from .context_free import ContextFreeGenerator, expected_validity, gen_context_free
from .factory import build_generator, generator_types
from .field_mutation import FieldMutationGenerator, gen_field_mutation
from .mutation import MutationConfig, MutationGenerator, gen_mutation
