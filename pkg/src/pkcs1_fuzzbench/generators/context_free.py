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
Black-box generator following a context-free grammar of the encoded message.

The grammar is ``EM -> 0x00 0x01 PS 0x00 PL``, ``PS -> 0xFF*``, ``PL -> byte*``.
Both repetitions are sized independently, so the coupling between the padding
and payload lengths only holds by chance.
"""

from fractions import Fraction
from typing import Iterator, List

from ..pkcs1 import types as TT
from .base import Generator, GeneratorStrategy


class ContextFreeGenerator(Generator):
    strategy = GeneratorStrategy.CONTEXT_FREE

    def __init__(self, params: TT.OracleParams, rng_seed: int) -> None:
        super().__init__(rng_seed)
        self.params = params

    def stream(self) -> Iterator[bytes]:
        prefix = bytes((TT.LEADING_BYTE, TT.SIGNATURE_BLOCK_TYPE))
        while True:
            ps_len = self.rng.randint(0, self.params.mod_len)
            pl_len = self.rng.randint(0, self.params.mod_len)
            yield (
                prefix
                + bytes((TT.PADDING_BYTE,)) * ps_len
                + bytes((TT.SEPARATOR_BYTE,))
                + self.rng.randbytes(pl_len)
            )


def expected_validity(params: TT.OracleParams) -> Fraction:
    """Exact probability that a context-free output is valid.

    Both lengths range over ``[0, mod_len]``. The output is valid iff
    ``ps_len + pl_len + 3 == mod_len`` and ``ps_len >= min_ps_len``, which
    leaves ``mod_len - 2 - min_ps_len`` lattice points.
    """
    hits = max(0, params.mod_len - 2 - params.min_ps_len)
    return Fraction(hits, (params.mod_len + 1) ** 2)


def gen_context_free(params: TT.OracleParams, rng_seed: int, count: int) -> List[bytes]:
    return ContextFreeGenerator(params, rng_seed).generate(count)
