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
Validator service: wire format, campaign log records and the TCP server.
"""

from .record import (
    CRASH_STATUS,
    WIRE_DECODE_ERROR,
    InputRecord,
    parse_timestamp,
    read_log,
    utc_timestamp,
)
from .server import ValidatorService, ValidatorStartupError, serve, shutdown
from .wire import WireDecodeError, WireMessage, decode_message, encode_message
