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
Format oracle for PKCS#1 v1.5 signature encoded messages.

The payload is treated as an opaque byte sequence: no DigestInfo or hash checks
are performed.
"""

from typing import Set

from . import types as TT


def parse_em(raw: bytes) -> TT.EncodedMessage:
    """Split a candidate encoded message into its fields.

    Parsing is permissive: the padding string is whatever lies between the block
    type and the first 0x00 found at index 2 or later, regardless of its content
    or length. Inputs that cannot be split are returned without ``parsed``.

    Parameters
    ----------
    raw : bytes
        Any byte sequence.

    Returns
    -------
    TT.EncodedMessage
        The input, with ``parsed`` populated when the layout could be located.
    """
    raw = bytes(raw)
    if len(raw) < TT.FIXED_OVERHEAD or raw[0] != TT.LEADING_BYTE:
        return TT.EncodedMessage(raw)

    separator = raw.find(TT.SEPARATOR_BYTE, 2)
    if separator < 0:
        return TT.EncodedMessage(raw)

    return TT.EncodedMessage(
        raw,
        TT.ParsedFields(bt=raw[1], ps=raw[2:separator], pl=raw[separator + 1 :]),
    )


def validate(raw: bytes, params: TT.OracleParams) -> TT.Verdict:
    """Decide whether ``raw`` is a well-formed signature encoded message.

    Every violated constraint is reported, not only the first one. The padding
    checks are only meaningful once a separator has been found, so
    ``PS_NOT_FF`` and ``PS_TOO_SHORT`` are never reported together with
    ``MISSING_SEPARATOR``.

    Parameters
    ----------
    raw : bytes
        Candidate encoded message.
    params : TT.OracleParams
        Modulus length and minimum padding length.

    Returns
    -------
    TT.Verdict
        Valid iff the reason set is empty.
    """
    raw = bytes(raw)
    reasons: Set[TT.ReasonCode] = set()

    if len(raw) != params.mod_len:
        reasons.add(TT.ReasonCode.LENGTH_MISMATCH)
    if len(raw) < 1 or raw[0] != TT.LEADING_BYTE:
        reasons.add(TT.ReasonCode.BAD_LEADING_BYTE)
    if len(raw) < 2 or raw[1] != TT.SIGNATURE_BLOCK_TYPE:
        reasons.add(TT.ReasonCode.BAD_BLOCK_TYPE)

    separator = raw.find(TT.SEPARATOR_BYTE, 2)
    if separator < 0:
        reasons.add(TT.ReasonCode.MISSING_SEPARATOR)
    else:
        padding = raw[2:separator]
        if padding.count(TT.PADDING_BYTE) != len(padding):
            reasons.add(TT.ReasonCode.PS_NOT_FF)
        if len(padding) < params.min_ps_len:
            reasons.add(TT.ReasonCode.PS_TOO_SHORT)

    return TT.Verdict(frozenset(reasons))


def is_valid(raw: bytes, params: TT.OracleParams) -> bool:
    """Shorthand for ``validate(raw, params).valid``."""
    return validate(raw, params).valid
