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
Black-box generator that solves the length coupling between padding and payload.
"""

from typing import Iterator, List

from ..pkcs1 import types as TT
from .base import Generator, GeneratorStrategy


class ConstraintAwareGenerator(Generator):
    """Emit encoded messages that satisfy every layout constraint.

    The payload length is drawn uniformly from every length that still leaves
    room for the minimum padding; the padding fills the remainder.
    """

    strategy = GeneratorStrategy.CONSTRAINT_AWARE

    def __init__(self, params: TT.OracleParams, rng_seed: int) -> None:
        super().__init__(rng_seed)
        self.params = params

    def stream(self) -> Iterator[bytes]:
        while True:
            yield self.build_one()

    def build_one(self) -> bytes:
        pl_len = self.rng.randint(0, self.params.max_pl_len)
        ps_len = self.params.mod_len - pl_len - TT.FIXED_OVERHEAD
        return (
            bytes((TT.LEADING_BYTE, TT.SIGNATURE_BLOCK_TYPE))
            + bytes((TT.PADDING_BYTE,)) * ps_len
            + bytes((TT.SEPARATOR_BYTE,))
            + self.rng.randbytes(pl_len)
        )


def gen_constraint_aware(
    params: TT.OracleParams, rng_seed: int, count: int
) -> List[bytes]:
    return ConstraintAwareGenerator(params, rng_seed).generate(count)
