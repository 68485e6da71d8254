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
Black-box generator that knows the message fields and breaks them on purpose.

Each output starts as a well-formed message. With a given probability one
predefined field-level mutation is applied to it.
"""

from enum import Enum, unique
from typing import Iterator, List

from ..pkcs1 import types as TT
from .base import Generator, GeneratorConfigError, GeneratorStrategy
from .constraint_aware import ConstraintAwareGenerator


@unique
class FieldMutation(Enum):
    LEADING_BYTE = "leading_byte"
    BLOCK_TYPE = "block_type"
    PS_BYTE = "ps_byte"
    PS_SPLIT = "ps_split"
    SEPARATOR = "separator"
    LENGTH_GROW = "length_grow"
    LENGTH_SHRINK = "length_shrink"


FIELD_MUTATIONS = tuple(FieldMutation)


class FieldMutationGenerator(ConstraintAwareGenerator):
    strategy = GeneratorStrategy.FIELD_MUTATION

    def __init__(
        self, params: TT.OracleParams, rng_seed: int, mutation_rate: float = 0.5
    ) -> None:
        if not 0.0 <= mutation_rate <= 1.0:
            raise GeneratorConfigError(
                f"mutation_rate must lie in [0, 1], got {mutation_rate}"
            )
        super().__init__(params, rng_seed)
        self.mutation_rate = mutation_rate

    def stream(self) -> Iterator[bytes]:
        while True:
            message = bytearray(self.build_one())
            if self.rng.random() < self.mutation_rate:
                self.mutate(message, self.rng.choice(FIELD_MUTATIONS))
            yield bytes(message)

    def mutate(self, message: bytearray, mutation: FieldMutation) -> None:
        """Apply one field mutation in place to a well-formed message."""
        separator = message.index(TT.SEPARATOR_BYTE, 2)

        if mutation is FieldMutation.LEADING_BYTE:
            message[0] = self.rng.randint(1, 255)
        elif mutation is FieldMutation.BLOCK_TYPE:
            # Any value but 0x01
            message[1] = (1 + self.rng.randint(1, 255)) % 256
        elif mutation is FieldMutation.PS_BYTE:
            message[self.rng.randrange(2, separator)] = self.rng.randint(1, 254)
        elif mutation is FieldMutation.PS_SPLIT:
            message[self.rng.randrange(2, separator)] = TT.SEPARATOR_BYTE
        elif mutation is FieldMutation.SEPARATOR:
            message[separator] = self.rng.randint(1, 255)
        elif mutation is FieldMutation.LENGTH_GROW:
            message.append(self.rng.randrange(256))
        elif mutation is FieldMutation.LENGTH_SHRINK:
            del message[-1]


def gen_field_mutation(
    params: TT.OracleParams, rng_seed: int, count: int, mutation_rate: float = 0.5
) -> List[bytes]:
    return FieldMutationGenerator(params, rng_seed, mutation_rate).generate(count)
