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
Pairwise similarity metrics between inputs.
"""

from typing import Hashable, Sequence

import Levenshtein
from rapidfuzz.distance import LCSseq


def edit_distance(a: Sequence[Hashable], b: Sequence[Hashable]) -> int:
    """Levenshtein distance with unit costs for insertion, deletion and substitution.

    Examples
    --------
    >>> edit_distance("kitten", "sitting")
    3
    """
    return Levenshtein.distance(a, b)


def lcs_length(a: Sequence[Hashable], b: Sequence[Hashable]) -> int:
    return LCSseq.similarity(a, b)


def nlcs(a: Sequence[Hashable], b: Sequence[Hashable]) -> float:
    """Longest common subsequence length normalised by the reference ``a``.

    Raises
    ------
    ValueError
        If ``a`` is empty.
    """
    if len(a) == 0:
        raise ValueError("nlcs needs a non-empty reference sequence")
    return lcs_length(a, b) / len(a)
