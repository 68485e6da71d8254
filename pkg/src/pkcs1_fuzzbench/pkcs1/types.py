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
Encoded message data model and oracle verdict types.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, unique
from typing import FrozenSet, List, NamedTuple, Optional

LEADING_BYTE = 0x00
SIGNATURE_BLOCK_TYPE = 0x01
ENCRYPTION_BLOCK_TYPE = 0x02
PADDING_BYTE = 0xFF
SEPARATOR_BYTE = 0x00

DEFAULT_MOD_LEN = 256
DEFAULT_MIN_PS_LEN = 8

# 0x00 || BT || ... || 0x00
FIXED_OVERHEAD = 3


@unique
class ReasonCode(Enum):
    """Reasons an encoded message is rejected by the oracle.

    Every code corresponds to exactly one structural constraint of the
    signature block layout ``0x00 || BT || PS || 0x00 || PL``.
    """

    LENGTH_MISMATCH = "length_mismatch"
    BAD_LEADING_BYTE = "bad_leading_byte"
    BAD_BLOCK_TYPE = "bad_block_type"
    PS_NOT_FF = "ps_not_ff"
    PS_TOO_SHORT = "ps_too_short"
    MISSING_SEPARATOR = "missing_separator"

    @classmethod
    def from_name(cls, name: str) -> ReasonCode:
        """Get a reason code from its enumeration name (as stored in logs)."""
        return cls[name]


@dataclass(frozen=True)
class OracleParams:
    """Parameters of the format oracle.

    Attributes
    ----------
    mod_len : int
        Length in bytes of the public modulus. A valid encoded message has exactly
        this length.
    min_ps_len : int
        Minimum number of 0xFF padding bytes.
    """

    mod_len: int = DEFAULT_MOD_LEN
    min_ps_len: int = DEFAULT_MIN_PS_LEN

    def __post_init__(self) -> None:
        if self.min_ps_len < 1:
            raise ValueError(f"min_ps_len must be positive, got {self.min_ps_len}")
        if self.mod_len < self.min_ps_len + FIXED_OVERHEAD:
            raise ValueError(
                f"mod_len ({self.mod_len}) must be at least min_ps_len + "
                f"{FIXED_OVERHEAD} ({self.min_ps_len + FIXED_OVERHEAD})"
            )

    @property
    def max_pl_len(self) -> int:
        """Longest payload that still leaves room for the minimum padding."""
        return self.mod_len - self.min_ps_len - FIXED_OVERHEAD


class ParsedFields(NamedTuple):
    """Fields of a structurally parseable encoded message."""

    bt: int
    ps: bytes
    pl: bytes


@dataclass(frozen=True)
class EncodedMessage:
    """A candidate encoded message and, when possible, its field split.

    ``parsed`` is only present when the raw bytes start with 0x00, are at least
    three bytes long and contain a 0x00 separator at some index >= 2.
    """

    raw: bytes
    parsed: Optional[ParsedFields] = None

    def reassemble(self) -> bytes:
        """Rebuild the raw bytes from the parsed fields."""
        if self.parsed is None:
            raise ValueError("Cannot reassemble an unparsed encoded message")
        return (
            bytes((LEADING_BYTE, self.parsed.bt))
            + self.parsed.ps
            + bytes((SEPARATOR_BYTE,))
            + self.parsed.pl
        )

    @property
    def hex(self) -> str:
        return self.raw.hex()


@dataclass(frozen=True)
class Verdict:
    """Decision of the oracle: valid iff no reason was reported."""

    reasons: FrozenSet[ReasonCode] = field(default_factory=frozenset)

    @property
    def valid(self) -> bool:
        return len(self.reasons) == 0

    def reason_names(self) -> List[str]:
        """Reason names in a stable order, suitable for serialisation."""
        return sorted(reason.name for reason in self.reasons)
