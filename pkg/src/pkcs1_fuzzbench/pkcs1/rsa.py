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
Textbook RSA signing primitives used by the mock test subjects.

No hashing, padding or constant-time hardening happens here: the encoded message
is exponentiated as is, exactly like the harness does before calling a library's
verification routine.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import lcm
from pathlib import Path
from random import Random
from typing import Any, Dict, Optional

KEY_DIR = Path(__file__).parent / "keys"
DEFAULT_KEY_PATH = KEY_DIR / "rsa2048_e3.json"


class RsaRangeError(ValueError):
    """An octet string does not represent an integer in [0, n)."""


class KeyFormatError(ValueError):
    """A key file or key component is malformed."""


def os2ip(data: bytes) -> int:
    """Octet string to non-negative integer (big-endian)."""
    return int.from_bytes(data, "big")


def i2osp(value: int, length: int) -> bytes:
    """Non-negative integer to a fixed-width big-endian octet string."""
    if value < 0 or value >= 256**length:
        raise RsaRangeError(f"integer does not fit in {length} bytes")
    return value.to_bytes(length, "big")


@dataclass(frozen=True)
class RsaKey:
    """RSA key pair. ``p`` and ``q`` are optional and only speed up signing."""

    n: int
    e: int
    d: int
    p: Optional[int] = None
    q: Optional[int] = None

    _crt: Optional[tuple] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name in ("n", "e", "d"):
            if getattr(self, name) <= 0:
                raise KeyFormatError(f"RSA component {name} must be positive")
        if (self.p is None) != (self.q is None):
            raise KeyFormatError("Both primes must be given, or neither")
        if self.p is not None and self.q is not None:
            if self.p * self.q != self.n:
                raise KeyFormatError("p * q does not match the modulus")
            object.__setattr__(
                self,
                "_crt",
                (
                    self.d % (self.p - 1),
                    self.d % (self.q - 1),
                    pow(self.q, -1, self.p),
                ),
            )

    @property
    def mod_len(self) -> int:
        """Length of the modulus in bytes."""
        return (self.n.bit_length() + 7) // 8

    @classmethod
    def from_primes(cls, p: int, q: int, e: int) -> RsaKey:
        """Derive the private exponent for the given primes and public exponent.

        Uses the Carmichael function, so ``d`` is the smallest valid exponent.
        """
        carmichael = lcm(p - 1, q - 1)
        try:
            d = pow(e, -1, carmichael)
        except ValueError as exc:
            raise KeyFormatError(f"e={e} is not invertible for these primes") from exc
        return cls(n=p * q, e=e, d=d, p=p, q=q)

    def private_op(self, value: int) -> int:
        if self._crt is None or self.p is None or self.q is None:
            return pow(value, self.d, self.n)
        dp, dq, q_inv = self._crt
        m_p = pow(value % self.p, dp, self.p)
        m_q = pow(value % self.q, dq, self.q)
        h = (q_inv * (m_p - m_q)) % self.p
        return m_q + h * self.q

    def public_op(self, value: int) -> int:
        return pow(value, self.e, self.n)

    def check_consistency(self, rng: Random, trials: int = 16) -> bool:
        """Probabilistic check that ``(m^d)^e mod n == m`` on random ``m``."""
        samples = [0, 1, self.n - 1] + [rng.randrange(self.n) for _ in range(trials)]
        return all(self.public_op(self.private_op(m)) == m for m in samples)

    def to_dict(self) -> Dict[str, str]:
        output = {"n": f"{self.n:x}", "e": f"{self.e:x}", "d": f"{self.d:x}"}
        if self.p is not None and self.q is not None:
            output["p"] = f"{self.p:x}"
            output["q"] = f"{self.q:x}"
        return output

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> RsaKey:
        try:
            components = {
                name: int(str(data[name]), 16)
                for name in ("n", "e", "d", "p", "q")
                if name in data
            }
            return cls(**components)
        except KeyError as exc:
            raise KeyFormatError(f"Missing key component {exc}") from exc
        except (TypeError, ValueError) as exc:
            if isinstance(exc, KeyFormatError):
                raise
            raise KeyFormatError(f"Malformed key component: {exc}") from exc


def sign(em: bytes, key: RsaKey) -> bytes:
    """Compute ``em^d mod n`` as a fixed-width big-endian octet string.

    Parameters
    ----------
    em : bytes
        Encoded message, exactly ``key.mod_len`` bytes long.
    key : RsaKey
        Signing key.

    Returns
    -------
    bytes
        The signature, ``key.mod_len`` bytes long.

    Raises
    ------
    RsaRangeError
        If ``em`` has the wrong length or its integer value is not below ``n``.
    """
    if len(em) != key.mod_len:
        raise RsaRangeError(
            f"encoded message has {len(em)} bytes, the modulus has {key.mod_len}"
        )
    value = os2ip(em)
    if value >= key.n:
        raise RsaRangeError("message representative out of range")
    return i2osp(key.private_op(value), key.mod_len)


def verify_raw(sig: bytes, key: RsaKey) -> bytes:
    """Recover ``sig^e mod n`` as a fixed-width big-endian octet string."""
    if len(sig) != key.mod_len:
        raise RsaRangeError(
            f"signature has {len(sig)} bytes, the modulus has {key.mod_len}"
        )
    value = os2ip(sig)
    if value >= key.n:
        raise RsaRangeError("signature representative out of range")
    return i2osp(key.public_op(value), key.mod_len)


def load_key(path: Path) -> RsaKey:
    """Load a key stored as a JSON object of hex strings."""
    with open(path, "r", encoding="utf8") as f_key:
        try:
            data = json.load(f_key)
        except json.JSONDecodeError as exc:
            raise KeyFormatError(f"{path} is not valid JSON: {exc}") from exc
    return RsaKey.from_dict(data)


def save_key(key: RsaKey, path: Path) -> None:
    with open(path, "w", encoding="utf8") as f_key:
        json.dump(key.to_dict(), f_key, indent=4)


@lru_cache(maxsize=None)
def default_key() -> RsaKey:
    """The packaged 2048-bit key with public exponent 3."""
    return load_key(DEFAULT_KEY_PATH)
