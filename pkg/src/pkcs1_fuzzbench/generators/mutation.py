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
Seed mutation generator with a deterministic sweep and a havoc stage.

The deterministic sweep walks every seed in corpus order:

1. Walking bit flips of width 1, 2 and 4 (most significant bit first).
2. Walking byte flips (xor 0xFF) of width 1, 2 and 4.
3. Byte-wise arithmetic, ``+d`` then ``-d`` modulo 256 for ``d`` in 1..35.
4. Substitution of every byte by each interesting value that differs from it.

Once the sweep is exhausted, or when it is disabled, every output is a copy of a
random seed with a stack of random havoc operations applied.
"""

from dataclasses import dataclass, field
from enum import Enum, unique
from typing import Iterator, List

from .base import Generator, GeneratorConfigError, GeneratorStrategy

ARITH_MAX = 35
INTERESTING_8 = (0x00, 0xFF, 0x7F, 0x80)
BIT_FLIP_WIDTHS = (1, 2, 4)
BYTE_FLIP_WIDTHS = (1, 2, 4)

HAVOC_BLOCK_SMALL = 32
HAVOC_BLOCK_MEDIUM = 128
HAVOC_BLOCK_LARGE = 1500
MAX_HAVOC_LEN = 8192


@unique
class HavocOp(Enum):
    BIT_FLIP = "bit_flip"
    RANDOM_BYTE = "random_byte"
    BLOCK_DELETE = "block_delete"
    BLOCK_INSERT = "block_insert"
    BLOCK_DUPLICATE = "block_duplicate"


HAVOC_OPS = tuple(HavocOp)


@dataclass
class MutationConfig:
    """Configuration of the mutation generator.

    Attributes
    ----------
    deterministic_stage_enabled : bool
        Run the deterministic sweep over every seed before havoc.
    havoc_stacking_max : int
        Upper bound of the number of stacked havoc operations per output. The
        actual count is a power of two drawn uniformly up to this bound.
    seed_corpus : List[bytes]
        Initial inputs. Must not be empty.
    """

    deterministic_stage_enabled: bool = True
    havoc_stacking_max: int = 16
    seed_corpus: List[bytes] = field(default_factory=list)

    def check(self) -> None:
        if not self.seed_corpus:
            raise GeneratorConfigError("The mutation strategy needs a non-empty seed corpus")
        if self.havoc_stacking_max < 1:
            raise GeneratorConfigError(
                f"havoc_stacking_max must be positive, got {self.havoc_stacking_max}"
            )


def flip_bit(buf: bytearray, bit: int) -> None:
    buf[bit >> 3] ^= 128 >> (bit & 7)


def deterministic_stage(seed: bytes) -> Iterator[bytes]:
    """Yield the ordered deterministic mutations of a single seed."""
    n_bits = len(seed) * 8
    for width in BIT_FLIP_WIDTHS:
        for start in range(n_bits - width + 1):
            buf = bytearray(seed)
            for bit in range(start, start + width):
                flip_bit(buf, bit)
            yield bytes(buf)

    for width in BYTE_FLIP_WIDTHS:
        for start in range(len(seed) - width + 1):
            buf = bytearray(seed)
            for pos in range(start, start + width):
                buf[pos] ^= 0xFF
            yield bytes(buf)

    for pos, original in enumerate(seed):
        for delta in range(1, ARITH_MAX + 1):
            for signed in (delta, -delta):
                buf = bytearray(seed)
                buf[pos] = (original + signed) & 0xFF
                yield bytes(buf)

    for pos, original in enumerate(seed):
        for value in INTERESTING_8:
            if value == original:
                continue
            buf = bytearray(seed)
            buf[pos] = value
            yield bytes(buf)


def deterministic_stage_size(seed: bytes) -> int:
    """Number of outputs ``deterministic_stage`` yields for ``seed``."""
    n_bits = len(seed) * 8
    bit_flips = sum(max(0, n_bits - width + 1) for width in BIT_FLIP_WIDTHS)
    byte_flips = sum(max(0, len(seed) - width + 1) for width in BYTE_FLIP_WIDTHS)
    interesting = sum(value != byte for byte in seed for value in INTERESTING_8)
    return bit_flips + byte_flips + len(seed) * 2 * ARITH_MAX + interesting


class MutationGenerator(Generator):
    strategy = GeneratorStrategy.MUTATION

    def __init__(self, config: MutationConfig, rng_seed: int) -> None:
        config.check()
        super().__init__(rng_seed)
        self.config = config
        self._stacking_pow2 = config.havoc_stacking_max.bit_length() - 1

    def stream(self) -> Iterator[bytes]:
        if self.config.deterministic_stage_enabled:
            for seed in self.config.seed_corpus:
                yield from deterministic_stage(seed)
        while True:
            yield self.havoc(self.rng.choice(self.config.seed_corpus))

    def havoc(self, seed: bytes) -> bytes:
        """Apply a stack of random operations to a copy of ``seed``."""
        buf = bytearray(seed)
        stacking = 1 << self.rng.randint(min(1, self._stacking_pow2), self._stacking_pow2)
        for _ in range(stacking):
            operation = self.rng.choice(HAVOC_OPS) if buf else HavocOp.BLOCK_INSERT
            self._apply(operation, buf)
            if len(buf) > MAX_HAVOC_LEN:
                del buf[MAX_HAVOC_LEN:]
        return bytes(buf)

    def _apply(self, operation: HavocOp, buf: bytearray) -> None:
        if operation is HavocOp.BIT_FLIP:
            flip_bit(buf, self.rng.randrange(len(buf) * 8))

        elif operation is HavocOp.RANDOM_BYTE:
            buf[self.rng.randrange(len(buf))] ^= self.rng.randint(1, 255)

        elif operation is HavocOp.BLOCK_DELETE:
            # Keep at least one byte
            if len(buf) < 2:
                return
            length = self._block_len(len(buf) - 1)
            start = self.rng.randint(0, len(buf) - length)
            del buf[start : start + length]

        elif operation is HavocOp.BLOCK_INSERT:
            length = self._block_len(max(1, len(buf)))
            position = self.rng.randint(0, len(buf))
            buf[position:position] = self.rng.randbytes(length)

        elif operation is HavocOp.BLOCK_DUPLICATE:
            length = self._block_len(len(buf))
            source = self.rng.randint(0, len(buf) - length)
            position = self.rng.randint(0, len(buf))
            buf[position:position] = buf[source : source + length]

    def _block_len(self, limit: int) -> int:
        """Block length in ``[1, limit]``, usually small, occasionally large."""
        tier = self.rng.randrange(3)
        if tier == 0:
            cap = HAVOC_BLOCK_SMALL
        elif tier == 1:
            cap = HAVOC_BLOCK_MEDIUM
        else:
            cap = HAVOC_BLOCK_LARGE
        return self.rng.randint(1, max(1, min(cap, limit)))


def gen_mutation(config: MutationConfig, rng_seed: int, count: int) -> List[bytes]:
    return MutationGenerator(config, rng_seed).generate(count)
