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
Diversity of a set of inputs.

Inputs are compared as lowercase hex strings. Each repetition samples up to
``sample_size`` inputs without replacement; the edit distance is averaged over
unordered pairs and the NLCS over ordered pairs whose first element is the
reference. The reported means average the repetition means.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from itertools import combinations, permutations
from random import Random
from typing import Any, Dict, List, Optional, Sequence, Tuple
from warnings import warn

from tqdm import tqdm

from ..validator.record import InputRecord
from .metrics import edit_distance, nlcs

DEFAULT_SAMPLE_SIZE = 100
DEFAULT_REPETITIONS = 10


class InsufficientRecordsError(ValueError):
    """Fewer than two usable inputs."""


@dataclass(frozen=True)
class DiversityStats:
    """Averaged pairwise metrics of a corpus.

    Attributes
    ----------
    edit_dist_mean : float
        Mean edit distance, higher is more diverse.
    nlcs_mean : float
        Mean normalised LCS in [0, 1], lower is more diverse.
    sample_size : int
        Requested inputs per repetition.
    repetitions : int
        Number of independent samples.
    population : int
        Inputs sampling drew from.
    nlcs_pairs_skipped : int
        Ordered pairs left out of the NLCS mean because one of their inputs
        was empty.
    valid_only_variant : Optional[DiversityStats]
        The same statistics over oracle-valid inputs only, when at least two
        exist.
    """

    edit_dist_mean: float
    nlcs_mean: float
    sample_size: int
    repetitions: int
    population: int
    nlcs_pairs_skipped: int = 0
    valid_only_variant: Optional[DiversityStats] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def pairwise_means(sample: Sequence[str]) -> Tuple[float, Optional[float], int]:
    """Mean edit distance and mean NLCS over every pair of ``sample``.

    Returns
    -------
    Tuple[float, Optional[float], int]
        Edit distance mean, NLCS mean (``None`` if every pair holds an empty
        input) and the number of skipped NLCS pairs.
    """
    distances = [edit_distance(a, b) for a, b in combinations(sample, 2)]
    ratios = [nlcs(a, b) for a, b in permutations(sample, 2) if a and b]
    skipped = len(sample) * (len(sample) - 1) - len(ratios)
    nlcs_mean = math.fsum(ratios) / len(ratios) if ratios else None
    return math.fsum(distances) / len(distances), nlcs_mean, skipped


def corpus_diversity(
    inputs: Sequence[str],
    sample_size: int = DEFAULT_SAMPLE_SIZE,
    repetitions: int = DEFAULT_REPETITIONS,
    rng_seed: int = 0,
    progress: bool = False,
) -> DiversityStats:
    """Diversity of a list of hex strings.

    Raises
    ------
    InsufficientRecordsError
        With fewer than two inputs, or when no sample holds a pair of
        non-empty inputs for the NLCS.
    """
    if len(inputs) < 2:
        raise InsufficientRecordsError(f"Diversity needs at least 2 inputs, got {len(inputs)}")
    if sample_size < 2 or repetitions < 1:
        raise ValueError("sample_size must be at least 2 and repetitions positive")

    rng = Random(rng_seed)
    population = list(inputs)
    k = min(sample_size, len(population))

    edit_means: List[float] = []
    nlcs_means: List[float] = []
    skipped = 0
    for _ in tqdm(range(repetitions), desc="diversity", disable=not progress):
        edit_mean, nlcs_mean, rep_skipped = pairwise_means(rng.sample(population, k))
        edit_means.append(edit_mean)
        if nlcs_mean is not None:
            nlcs_means.append(nlcs_mean)
        skipped += rep_skipped

    if not nlcs_means:
        raise InsufficientRecordsError("No sampled pair of non-empty inputs for the NLCS")
    if skipped:
        warn(f"{skipped} NLCS pairs skipped because they hold an empty input")

    return DiversityStats(
        edit_dist_mean=math.fsum(edit_means) / len(edit_means),
        nlcs_mean=math.fsum(nlcs_means) / len(nlcs_means),
        sample_size=sample_size,
        repetitions=repetitions,
        population=len(population),
        nlcs_pairs_skipped=skipped,
    )


def diversity(
    records: Sequence[InputRecord],
    sample_size: int = DEFAULT_SAMPLE_SIZE,
    repetitions: int = DEFAULT_REPETITIONS,
    rng_seed: int = 0,
    valid_only: bool = False,
    progress: bool = False,
) -> DiversityStats:
    """Diversity of the inputs of a campaign log.

    Records of undecodable payloads are not inputs and are left out.
    """
    usable = [
        record.hex
        for record in records
        if not record.decode_error and (record.valid or not valid_only)
    ]
    return corpus_diversity(usable, sample_size, repetitions, rng_seed, progress)
