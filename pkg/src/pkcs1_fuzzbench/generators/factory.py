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
Build a generator instance from a strategy name and its settings.
"""

from typing import List, Optional, Type

from ..pkcs1 import types as TT
from .base import Generator, GeneratorConfigError, GeneratorStrategy
from .constraint_aware import ConstraintAwareGenerator
from .context_free import ContextFreeGenerator
from .field_mutation import FieldMutationGenerator
from .mutation import MutationConfig, MutationGenerator

generator_types: List[Type[Generator]] = [
    ConstraintAwareGenerator,
    ContextFreeGenerator,
    MutationGenerator,
    FieldMutationGenerator,
]


def build_generator(
    strategy: GeneratorStrategy,
    params: TT.OracleParams,
    rng_seed: int,
    mutation: Optional[MutationConfig] = None,
    mutation_rate: float = 0.5,
) -> Generator:
    """Instantiate the generator implementing ``strategy``.

    Parameters
    ----------
    strategy : GeneratorStrategy
        Which generator to build.
    params : TT.OracleParams
        Oracle parameters the black-box generators target.
    rng_seed : int
        Seed of the generator's pseudo-random state.
    mutation : Optional[MutationConfig]
        Required for ``MUTATION``; ignored otherwise.
    mutation_rate : float
        Probability of a field mutation for ``FIELD_MUTATION``.

    Returns
    -------
    Generator
        A freshly seeded generator.
    """
    cls = next(cls for cls in generator_types if cls.strategy is strategy)
    if cls is MutationGenerator:
        if mutation is None:
            raise GeneratorConfigError("The mutation strategy needs a seed corpus")
        return MutationGenerator(mutation, rng_seed)
    if cls is FieldMutationGenerator:
        return FieldMutationGenerator(params, rng_seed, mutation_rate)
    return cls(params, rng_seed)
