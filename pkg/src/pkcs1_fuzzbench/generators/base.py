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
Base class for any input generator.
"""

import logging
from abc import ABC, abstractmethod
from enum import Enum, unique
from itertools import islice
from pathlib import Path
from random import Random
from typing import Iterable, Iterator, List

LOGGER = logging.getLogger(__name__)


class GeneratorConfigError(ValueError):
    """A generator was configured in a way that cannot produce inputs."""


@unique
class GeneratorStrategy(Enum):
    """Built-in generation strategies, from black-box to grey-box."""

    CONSTRAINT_AWARE = "constraint_aware"
    CONTEXT_FREE = "context_free"
    MUTATION = "mutation"
    FIELD_MUTATION = "field_mutation"

    @classmethod
    def from_name(cls, name: str) -> "GeneratorStrategy":
        """Parse a strategy from its lowercase name, as used in configs and flags."""
        try:
            return cls(name.lower())
        except ValueError as exc:
            choices = ", ".join(strategy.value for strategy in cls)
            raise GeneratorConfigError(
                f"Unknown strategy '{name}' (expected one of {choices})"
            ) from exc


class Generator(ABC):
    """Interface defining methods for an input generator.

    A generator owns its own pseudo-random state, seeded explicitly, so equal
    seeds and configurations always yield equal input sequences.
    """

    strategy: GeneratorStrategy

    def __init__(self, rng_seed: int) -> None:
        self.rng_seed = rng_seed
        self.rng = Random(rng_seed)

    @abstractmethod
    def stream(self) -> Iterator[bytes]:
        """Yield candidate inputs indefinitely.

        Returns
        -------
        Iterator[bytes]
            Endless sequence of raw inputs.
        """
        raise NotImplementedError

    def generate(self, count: int) -> List[bytes]:
        """Produce the next ``count`` inputs from a freshly seeded state.

        Parameters
        ----------
        count : int
            Number of inputs to produce.

        Returns
        -------
        List[bytes]
            The inputs, in generation order.
        """
        self.reset()
        return list(islice(self.stream(), count))

    def reset(self) -> None:
        """Reset object to its default state."""
        self.rng = Random(self.rng_seed)


def load_seed_corpus(seed_dir: Path) -> List[bytes]:
    """Read every regular file in ``seed_dir`` as one raw seed, ordered by name."""
    if not seed_dir.is_dir():
        raise GeneratorConfigError(f"Seed directory {seed_dir} does not exist")
    corpus = [path.read_bytes() for path in sorted(seed_dir.iterdir()) if path.is_file()]
    LOGGER.debug("Loaded %d seeds from %s", len(corpus), seed_dir)
    return corpus


def write_inputs(inputs: Iterable[bytes], out_dir: Path, width: int = 6) -> int:
    """Write one file per input into ``out_dir``, named by zero-padded position.

    Returns
    -------
    int
        Number of files written.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    written = 0
    for index, data in enumerate(inputs):
        (out_dir / f"{index:0{width}d}").write_bytes(data)
        written += 1
    return written
