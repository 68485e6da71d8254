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
Locally hosted TCP validator.

Every connection carries one harness message. The validator decodes it, asks the
oracle for a verdict and appends one record to the campaign log.
"""

from __future__ import annotations

import logging
import selectors
import socketserver
import threading
from pathlib import Path
from typing import IO, Optional

from ..pkcs1 import oracle as OR
from ..pkcs1 import types as TT
from .record import WIRE_DECODE_ERROR, InputRecord, utc_timestamp
from .wire import WireDecodeError, decode_message

LOGGER = logging.getLogger(__name__)

DEFAULT_HOST = "127.0.0.1"
READ_TIMEOUT = 30.0
POLL_INTERVAL = 0.05


class ValidatorStartupError(OSError):
    """The validator could not bind its port or open its log."""


class _ConnectionHandler(socketserver.StreamRequestHandler):
    timeout = READ_TIMEOUT

    def handle(self) -> None:
        try:
            payload = self.rfile.read()
        except OSError as exc:
            LOGGER.warning("Dropped connection from %s: %s", self.client_address, exc)
            return
        self.server.service.ingest(payload)  # type: ignore[attr-defined]


class _ValidatorTCPServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = False
    block_on_close = True
    request_queue_size = 128

    def __init__(self, address, service: ValidatorService) -> None:
        self.service = service
        super().__init__(address, _ConnectionHandler)


class ValidatorService:
    """Validator bound to one campaign and one log file.

    Parameters
    ----------
    params : TT.OracleParams
        Parameters of the format oracle.
    log_path : Path
        JSON Lines file records are appended to.
    campaign_id : str
        Identifier stamped on every record.
    host : str
        Interface to listen on.
    port : int
        TCP port, 0 picks a free one.
    """

    _active = 0
    _active_lock = threading.Lock()

    def __init__(
        self,
        params: TT.OracleParams,
        log_path: Path,
        campaign_id: str,
        host: str = DEFAULT_HOST,
        port: int = 0,
    ) -> None:
        self.params = params
        self.log_path = Path(log_path)
        self.campaign_id = campaign_id
        self.host = host
        self.requested_port = port

        self.records_written = 0
        self._write_lock = threading.Lock()
        self._log: Optional[IO[str]] = None
        self._server: Optional[_ValidatorTCPServer] = None
        self._thread: Optional[threading.Thread] = None

    @classmethod
    def active_count(cls) -> int:
        """Number of validators currently serving in this process."""
        with cls._active_lock:
            return cls._active

    @property
    def running(self) -> bool:
        return self._server is not None

    @property
    def port(self) -> int:
        if self._server is None:
            return self.requested_port
        return self._server.server_address[1]

    def start(self) -> ValidatorService:
        if self._server is not None:
            raise RuntimeError("Validator already running")
        try:
            self.log_path.parent.mkdir(parents=True, exist_ok=True)
            self._log = open(self.log_path, "a", encoding="utf8")
        except OSError as exc:
            raise ValidatorStartupError(f"Cannot open log {self.log_path}: {exc}") from exc
        try:
            self._server = _ValidatorTCPServer((self.host, self.requested_port), self)
        except OSError as exc:
            self._log.close()
            self._log = None
            raise ValidatorStartupError(
                f"Cannot listen on {self.host}:{self.requested_port}: {exc}"
            ) from exc

        self._thread = threading.Thread(
            target=self._server.serve_forever,
            kwargs={"poll_interval": POLL_INTERVAL},
            name=f"validator-{self.campaign_id}",
            daemon=True,
        )
        self._thread.start()
        with ValidatorService._active_lock:
            ValidatorService._active += 1
        LOGGER.info(
            "Validator for %s listening on %s:%d", self.campaign_id, self.host, self.port
        )
        return self

    def ingest(self, payload: bytes) -> InputRecord:
        """Validate one wire payload and append its record to the log."""
        timestamp = utc_timestamp()
        try:
            message = decode_message(payload)
        except WireDecodeError as exc:
            LOGGER.warning("Undecodable payload for %s: %s", self.campaign_id, exc)
            record = InputRecord(
                timestamp=timestamp,
                campaign_id=self.campaign_id,
                hex="",
                valid=False,
                reasons=[WIRE_DECODE_ERROR],
                payload=payload.decode("ascii", errors="backslashreplace"),
            )
        else:
            verdict = OR.validate(message.raw, self.params)
            record = InputRecord(
                timestamp=timestamp,
                campaign_id=self.campaign_id,
                hex=message.raw.hex(),
                valid=verdict.valid,
                reasons=verdict.reason_names(),
                crashed=message.crashed,
                status=message.status,
            )
        self._append(record)
        return record

    def _append(self, record: InputRecord) -> None:
        line = record.to_json() + "\n"
        with self._write_lock:
            if self._log is None:
                raise RuntimeError("Validator log is closed")
            self._log.write(line)
            self._log.flush()
            self.records_written += 1

    def shutdown(self) -> int:
        """Stop accepting connections, finish in-flight ones and close the log.

        Returns
        -------
        int
            Total number of records written.
        """
        if self._server is None:
            return self.records_written

        self._server.shutdown()
        # Connections already queued by the kernel still count
        with selectors.DefaultSelector() as selector:
            selector.register(self._server.socket, selectors.EVENT_READ)
            while selector.select(timeout=0):
                self._server.handle_request()
        # Joins every handler thread
        self._server.server_close()
        if self._thread is not None:
            self._thread.join()

        with self._write_lock:
            if self._log is not None:
                self._log.flush()
                self._log.close()
                self._log = None
        self._server = None
        with ValidatorService._active_lock:
            ValidatorService._active -= 1
        LOGGER.info(
            "Validator for %s stopped after %d records",
            self.campaign_id,
            self.records_written,
        )
        return self.records_written

    def __enter__(self) -> ValidatorService:
        if self._server is None:
            self.start()
        return self

    def __exit__(self, *_) -> None:
        self.shutdown()


def serve(
    port: int,
    params: TT.OracleParams,
    log_path: Path,
    campaign_id: str,
    host: str = DEFAULT_HOST,
) -> ValidatorService:
    """Start a validator and return its running handle."""
    return ValidatorService(params, log_path, campaign_id, host, port).start()


def shutdown(handle: ValidatorService) -> int:
    """Gracefully stop a validator, returning the final record count."""
    return handle.shutdown()
