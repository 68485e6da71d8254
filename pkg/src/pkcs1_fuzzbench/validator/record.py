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
Campaign log records, stored as JSON Lines.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

WIRE_DECODE_ERROR = "WIRE_DECODE_ERROR"
CRASH_STATUS = "-1"


def utc_timestamp(moment: Optional[datetime] = None) -> str:
    """ISO 8601 UTC timestamp with millisecond precision, e.g. ``...T10:00:00.123Z``."""
    moment = moment or datetime.now(timezone.utc)
    return (
        moment.astimezone(timezone.utc)
        .isoformat(timespec="milliseconds")
        .replace("+00:00", "Z")
    )


def parse_timestamp(value: str) -> datetime:
    if value.endswith("Z"):
        value = value[:-1] + "+00:00"
    return datetime.fromisoformat(value)


@dataclass
class InputRecord:
    """One observation of the validator.

    Attributes
    ----------
    timestamp : str
        Arrival time, see ``utc_timestamp``.
    campaign_id : str
        Campaign the input belongs to.
    hex : str
        Lowercase hex of the validated bytes. Empty when the payload could not
        be decoded.
    valid : bool
        Oracle decision.
    reasons : List[str]
        Names of the violated constraints, sorted. Empty iff ``valid``.
    crashed : bool
        The harness reported a crash of the subject.
    status : Optional[str]
        Raw status field sent by the harness, if any.
    payload : Optional[str]
        Undecodable wire payload, kept for inspection.
    """

    timestamp: str
    campaign_id: str
    hex: str
    valid: bool
    reasons: List[str] = field(default_factory=list)
    crashed: bool = False
    status: Optional[str] = None
    payload: Optional[str] = None

    @property
    def raw(self) -> bytes:
        return bytes.fromhex(self.hex)

    @property
    def time(self) -> datetime:
        return parse_timestamp(self.timestamp)

    @property
    def decode_error(self) -> bool:
        return WIRE_DECODE_ERROR in self.reasons

    def to_dict(self) -> Dict[str, Any]:
        output = asdict(self)
        for optional in ("status", "payload"):
            if output[optional] is None:
                del output[optional]
        return output

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> InputRecord:
        return cls(
            timestamp=str(data["timestamp"]),
            campaign_id=str(data["campaign_id"]),
            hex=str(data["hex"]),
            valid=bool(data["valid"]),
            reasons=[str(reason) for reason in data.get("reasons", [])],
            crashed=bool(data.get("crashed", False)),
            status=data.get("status"),
            payload=data.get("payload"),
        )

    @classmethod
    def from_json(cls, line: str) -> InputRecord:
        return cls.from_dict(json.loads(line))


def read_log(path: Path) -> List[InputRecord]:
    """Load every record of a JSON Lines campaign log.

    Raises
    ------
    ValueError
        If a non-empty line is not a well-formed record. The message names the
        file and the line number.
    """
    records = []
    with open(path, "r", encoding="utf8") as f_log:
        for lineno, line in enumerate(f_log, start=1):
            if not line.strip():
                continue
            try:
                records.append(InputRecord.from_json(line))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed record ({exc})") from exc
    return records
