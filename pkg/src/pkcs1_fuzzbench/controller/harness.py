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
Built-in test harness.

Feeds every generated input to a subject and forwards the raw input, tagged
with the subject's response, to the campaign validator.
"""

import socket
from typing import Callable, Optional

from ..subjects import SubjectOutcome
from ..validator.wire import encode_message

SEND_TIMEOUT = 10.0


def send_input(
    host: str,
    port: int,
    em: bytes,
    status: Optional[str] = None,
    timeout: float = SEND_TIMEOUT,
) -> None:
    """Send one wire message and wait until the validator has logged it.

    The write side is closed to end the message; the validator closes the
    connection once the record is written.
    """
    with socket.create_connection((host, port), timeout=timeout) as sock:
        sock.sendall(encode_message(em, status))
        sock.shutdown(socket.SHUT_WR)
        while sock.recv(64):
            pass


class Harness:
    """Callable harness bound to a subject and a validator address."""

    def __init__(
        self, subject: Callable[[bytes], SubjectOutcome], host: str, port: int
    ) -> None:
        self.subject = subject
        self.host = host
        self.port = port

    def __call__(self, em: bytes) -> SubjectOutcome:
        outcome = self.subject(em)
        send_input(self.host, self.port, em, outcome.status)
        return outcome
