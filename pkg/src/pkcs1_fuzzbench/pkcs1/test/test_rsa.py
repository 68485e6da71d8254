"""Test the textbook RSA helpers and the packaged key."""

import random
import tempfile
import unittest
from pathlib import Path

from .. import rsa as RSA

TOY_KEY = RSA.RsaKey(n=3233, e=17, d=413)

# Two 48-bit primes, both congruent to 2 mod 3, giving a 12-byte modulus.
SMALL_P = 212547533494091
SMALL_Q = 270924716085677


class TestToyKey(unittest.TestCase):
    """Hand-checkable values on the classic 3233 = 61 * 53 modulus."""

    def test_sign_known_value(self) -> None:
        self.assertEqual(TOY_KEY.mod_len, 2)
        self.assertEqual(RSA.sign(bytes.fromhex("022c"), TOY_KEY), bytes.fromhex("04f0"))

    def test_verify_known_value(self) -> None:
        self.assertEqual(
            RSA.verify_raw(bytes.fromhex("04f0"), TOY_KEY), bytes.fromhex("022c")
        )

    def test_equivalent_private_exponent(self) -> None:
        other = RSA.RsaKey(n=3233, e=17, d=2753)
        self.assertEqual(RSA.sign(bytes.fromhex("022c"), other), bytes.fromhex("04f0"))

    def test_fixed_points(self) -> None:
        for value in [0, 1]:
            em = RSA.i2osp(value, 2)
            with self.subTest(value=value):
                self.assertEqual(RSA.sign(em, TOY_KEY), em)
                self.assertEqual(RSA.verify_raw(em, TOY_KEY), em)

    def test_full_round_trip(self) -> None:
        for value in range(TOY_KEY.n):
            em = RSA.i2osp(value, 2)
            self.assertEqual(RSA.verify_raw(RSA.sign(em, TOY_KEY), TOY_KEY), em)

    def test_out_of_range(self) -> None:
        test_cases = [
            # operation, input
            (RSA.sign, RSA.i2osp(3233, 2)),
            (RSA.sign, b"\xff\xff"),
            (RSA.sign, b"\x00"),
            (RSA.sign, b"\x00\x00\x01"),
            (RSA.verify_raw, RSA.i2osp(4000, 2)),
            (RSA.verify_raw, b"\x01"),
        ]
        for ii, (operation, data) in enumerate(test_cases):
            with self.subTest(i=ii):
                with self.assertRaises(RSA.RsaRangeError):
                    operation(data, TOY_KEY)


class TestSmallKey(unittest.TestCase):
    """A 12-byte key built from primes, using the CRT path."""

    def setUp(self) -> None:
        self.key = RSA.RsaKey.from_primes(SMALL_P, SMALL_Q, 3)

    def test_modulus_length(self) -> None:
        self.assertEqual(self.key.mod_len, 12)
        self.assertEqual(self.key.e, 3)

    def test_round_trip_encoded_message(self) -> None:
        em = bytes.fromhex("0001ffffffffffffffff00aa")
        signature = RSA.sign(em, self.key)
        self.assertEqual(len(signature), 12)
        self.assertNotEqual(signature, em)
        self.assertEqual(RSA.verify_raw(signature, self.key), em)

    def test_crt_matches_plain_exponentiation(self) -> None:
        plain = RSA.RsaKey(n=self.key.n, e=self.key.e, d=self.key.d)
        rng = random.Random(3)
        for _ in range(200):
            value = rng.randrange(self.key.n)
            self.assertEqual(self.key.private_op(value), plain.private_op(value))

    def test_consistency(self) -> None:
        self.assertTrue(self.key.check_consistency(random.Random(0), trials=64))

    def test_non_invertible_exponent(self) -> None:
        # 61 - 1 and 53 - 1 are both divisible by 2 and 3
        with self.assertRaises(RSA.KeyFormatError):
            RSA.RsaKey.from_primes(61, 53, 3)

    def test_mismatched_primes(self) -> None:
        with self.assertRaises(RSA.KeyFormatError):
            RSA.RsaKey(n=self.key.n, e=3, d=self.key.d, p=SMALL_P, q=SMALL_P)
        with self.assertRaises(RSA.KeyFormatError):
            RSA.RsaKey(n=self.key.n, e=3, d=self.key.d, p=SMALL_P)


class TestKeyFiles(unittest.TestCase):
    """Test the JSON key fixtures."""

    def test_default_key(self) -> None:
        key = RSA.default_key()
        self.assertEqual(key.mod_len, 256)
        self.assertEqual(key.e, 3)
        self.assertTrue(key.check_consistency(random.Random(11), trials=4))

    def test_default_key_signs_valid_message(self) -> None:
        key = RSA.default_key()
        em = b"\x00\x01" + b"\xff" * 8 + b"\x00" + bytes(range(245))
        self.assertEqual(RSA.verify_raw(RSA.sign(em, key), key), em)

    def test_save_and_load(self) -> None:
        key = RSA.RsaKey.from_primes(SMALL_P, SMALL_Q, 3)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "key.json"
            RSA.save_key(key, path)
            self.assertEqual(RSA.load_key(path), key)

    def test_malformed_files(self) -> None:
        test_cases = [
            # file contents
            "not json",
            '{"n": "0bb1", "e": "11"}',
            '{"n": "zz", "e": "11", "d": "19d"}',
            '{"n": "0", "e": "11", "d": "19d"}',
        ]
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "key.json"
            for ii, contents in enumerate(test_cases):
                path.write_text(contents, encoding="utf8")
                with self.subTest(i=ii):
                    with self.assertRaises(RSA.KeyFormatError):
                        RSA.load_key(path)
