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
Test subjects standing in for signature verification libraries.

A subject receives a candidate encoded message the way a harness does: the
message is signed with the private key, then handed to the subject's
verification routine, which recovers the message with the public key and
applies its own acceptance policy.
"""

import logging
import subprocess
import tempfile
from enum import Enum, unique
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

from .pkcs1 import rsa as RSA
from .pkcs1 import types as TT

LOGGER = logging.getLogger(__name__)

DEFAULT_CRASH_TRIGGER = 0x41
DEFAULT_SUBJECT_TIMEOUT = 5.0

# Exit codes of an external harness
EXIT_ACCEPTED = 0
EXIT_REJECTED = 1


@unique
class SubjectPolicy(Enum):
    """Acceptance policies of the built-in mock subjects."""

    STRICT = "strict"
    LENIENT_PS = "lenient_ps"
    CRASHY = "crashy"

    @classmethod
    def from_name(cls, name: str) -> "SubjectPolicy":
        try:
            return cls(name.lower())
        except ValueError as exc:
            choices = ", ".join(policy.value for policy in cls)
            raise ValueError(
                f"Unknown subject policy '{name}' (expected one of {choices})"
            ) from exc


class SubjectOutcome(NamedTuple):
    accepted: bool
    crashed: bool

    @property
    def status(self) -> str:
        """Wire status reported by a harness for this outcome."""
        if self.crashed:
            return "-1"
        return "1" if self.accepted else "0"


REJECTED = SubjectOutcome(accepted=False, crashed=False)


def check_padding(recovered: bytes, min_ps_len: int) -> Optional[bytes]:
    """Library-style check of a recovered encoded message.

    Parameters
    ----------
    recovered : bytes
        Output of the public key operation, modulus-sized.
    min_ps_len : int
        Smallest padding length the library tolerates.

    Returns
    -------
    Optional[bytes]
        The payload if the padding is accepted, ``None`` otherwise.
    """
    if not recovered.startswith(b"\x00\x01"):
        return None
    try:
        separator = recovered.index(b"\x00", 2)
    except ValueError:
        return None
    padding = recovered[2:separator]
    if any(byte != 0xFF for byte in padding) or len(padding) < min_ps_len:
        return None
    return recovered[separator + 1 :]


def run_subject(
    em: bytes,
    policy: SubjectPolicy,
    key: RSA.RsaKey,
    params: Optional[TT.OracleParams] = None,
    crash_trigger: int = DEFAULT_CRASH_TRIGGER,
) -> SubjectOutcome:
    """Sign ``em`` and feed the signature to a mock verification routine.

    Parameters
    ----------
    em : bytes
        Raw fuzzer output. Shorter inputs are left-padded with zeros, longer
        inputs are rejected without signing.
    policy : SubjectPolicy
        Acceptance policy of the mock library.
    key : RSA.RsaKey
        Key pair used for signing and verification.
    params : Optional[TT.OracleParams]
        Padding rules of the strict policies. Defaults to the key's modulus
        length and the standard minimum padding.
    crash_trigger : int
        Payload byte on which a ``CRASHY`` subject crashes.

    Returns
    -------
    SubjectOutcome
        Whether the library accepted the signature, and whether it crashed.
    """
    params = params or TT.OracleParams(mod_len=key.mod_len)
    if len(em) > key.mod_len:
        return REJECTED

    try:
        signature = RSA.sign(em.rjust(key.mod_len, b"\x00"), key)
    except RSA.RsaRangeError:
        return REJECTED
    recovered = RSA.verify_raw(signature, key)

    min_ps_len = 1 if policy is SubjectPolicy.LENIENT_PS else params.min_ps_len
    payload = check_padding(recovered, min_ps_len)
    if payload is None:
        return REJECTED

    if policy is SubjectPolicy.CRASHY and crash_trigger in payload:
        return SubjectOutcome(accepted=False, crashed=True)
    return SubjectOutcome(accepted=True, crashed=False)


class MockSubject:
    """A built-in subject bound to one policy and key."""

    def __init__(
        self,
        policy: SubjectPolicy,
        key: RSA.RsaKey,
        params: Optional[TT.OracleParams] = None,
        crash_trigger: int = DEFAULT_CRASH_TRIGGER,
    ) -> None:
        self.policy = policy
        self.key = key
        self.params = params
        self.crash_trigger = crash_trigger

    @property
    def name(self) -> str:
        return self.policy.value

    def __call__(self, em: bytes) -> SubjectOutcome:
        return run_subject(em, self.policy, self.key, self.params, self.crash_trigger)


class ExternalSubject:
    """A harness executable invoked once per input.

    The input is written to a temporary file whose path is the last argument.
    Exit code 0 means accepted, 1 means rejected, and termination by a signal
    means the library crashed. Any other exit code, or a timeout, is a
    rejection.
    """

    def __init__(
        self,
        executable: Path,
        args: Sequence[str] = (),
        timeout: float = DEFAULT_SUBJECT_TIMEOUT,
    ) -> None:
        self.executable = executable
        self.args = list(args)
        self.timeout = timeout

    @property
    def name(self) -> str:
        return self.executable.name

    def __call__(self, em: bytes) -> SubjectOutcome:
        with tempfile.NamedTemporaryFile(prefix="fuzzbench-", delete=False) as f_in:
            f_in.write(em)
            input_path = Path(f_in.name)
        try:
            return self._execute(input_path)
        finally:
            input_path.unlink(missing_ok=True)

    def _execute(self, input_path: Path) -> SubjectOutcome:
        proc = subprocess.Popen(
            [str(self.executable), *self.args, str(input_path)],
            stdout=subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
        )
        try:
            returncode = proc.wait(timeout=self.timeout)
        except subprocess.TimeoutExpired:
            proc.terminate()
            try:
                proc.wait(timeout=1.0)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()
            LOGGER.warning("Subject %s timed out after %.1f s", self.name, self.timeout)
            return REJECTED

        if returncode < 0:
            return SubjectOutcome(accepted=False, crashed=True)
        if returncode not in (EXIT_ACCEPTED, EXIT_REJECTED):
            LOGGER.debug("Subject %s exited with code %d", self.name, returncode)
        return SubjectOutcome(accepted=returncode == EXIT_ACCEPTED, crashed=False)
