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
Harness to validator wire format.

One message per TCP connection, terminated by the client closing its side::

    <hex of the encoded message>[,<decimal status>]

Hex digits may be upper or lower case. A status of ``-1`` reports a crash of the
subject; any other status is kept verbatim.
"""

import re
from typing import NamedTuple, Optional

from .record import CRASH_STATUS

_HEX_RE = re.compile(r"[0-9a-fA-F]*")
_STATUS_RE = re.compile(r"-?[0-9]+")


class WireDecodeError(ValueError):
    """The payload does not follow the wire format."""


class WireMessage(NamedTuple):
    raw: bytes
    status: Optional[str] = None

    @property
    def crashed(self) -> bool:
        return self.status == CRASH_STATUS


def encode_message(raw: bytes, status: Optional[str] = None) -> bytes:
    text = raw.hex()
    if status is not None:
        text += f",{status}"
    return text.encode("ascii")


def decode_message(payload: bytes) -> WireMessage:
    """Parse one wire payload.

    Raises
    ------
    WireDecodeError
        On non-ASCII data, non-hex characters, an odd number of hex digits or a
        non-numeric status.
    """
    try:
        text = payload.decode("ascii").strip()
    except UnicodeDecodeError as exc:
        raise WireDecodeError("payload is not ASCII") from exc

    hex_part, comma, status = text.partition(",")
    hex_part = hex_part.strip()
    if not _HEX_RE.fullmatch(hex_part):
        raise WireDecodeError(f"non-hex characters in {hex_part[:32]!r}")
    if len(hex_part) % 2:
        raise WireDecodeError("odd number of hex digits")

    if not comma:
        return WireMessage(bytes.fromhex(hex_part))
    status = status.strip()
    if not _STATUS_RE.fullmatch(status):
        raise WireDecodeError(f"malformed status {status[:16]!r}")
    return WireMessage(bytes.fromhex(hex_part), status)
