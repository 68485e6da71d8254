"""Test the campaign configuration loader."""

import os
import tempfile
import textwrap
import unittest
from pathlib import Path
from unittest import mock

from ...generators import GeneratorStrategy
from ...pkcs1 import rsa as RSA
from ...pkcs1 import types as TT
from ...subjects import SubjectPolicy
from .. import config as CFG

MINIMAL = """
[[campaign]]
campaign_id = "ca-strict"
fuzzer = "constraint_aware"
subject = "strict"
duration = 60
validator_port = 9000
log_path = "logs/ca-strict.jsonl"
"""


class ConfigTestCase(unittest.TestCase):
    def setUp(self) -> None:
        self.tmp = tempfile.TemporaryDirectory()
        self.base = Path(self.tmp.name).resolve()

    def tearDown(self) -> None:
        self.tmp.cleanup()

    def load(self, text: str):
        path = self.base / "campaigns.toml"
        path.write_text(textwrap.dedent(text), encoding="utf8")
        return CFG.load_config(path)

    def assertConfigError(self, text: str, field: str) -> None:
        with self.assertRaises(CFG.ConfigError) as ctx:
            self.load(text)
        self.assertEqual(ctx.exception.field, field)


class TestLoadConfig(ConfigTestCase):
    """Well-formed files."""

    @mock.patch.dict(os.environ, {}, clear=False)
    def test_minimal(self) -> None:
        os.environ.pop(CFG.LOG_DIR_ENV, None)
        (config,) = self.load(MINIMAL)
        self.assertEqual(config.campaign_id, "ca-strict")
        self.assertEqual(config.fuzzer, CFG.BuiltinFuzzer(GeneratorStrategy.CONSTRAINT_AWARE))
        self.assertEqual(config.subject, CFG.MockSubjectSpec(SubjectPolicy.STRICT))
        self.assertEqual(config.duration, 60.0)
        self.assertEqual(config.validator_port, 9000)
        self.assertEqual(config.log_path, self.base / "logs" / "ca-strict.jsonl")
        self.assertEqual(config.rng_seed, 0)
        self.assertIsNone(config.max_inputs)
        self.assertIsNone(config.seed_dir)
        self.assertEqual(config.oracle, TT.OracleParams())
        self.assertEqual(config.host, "127.0.0.1")
        self.assertTrue(config.builtin)

    def test_two_campaigns(self) -> None:
        second = MINIMAL.replace("ca-strict", "cf-lenient").replace("9000", "9001")
        second = second.replace('"constraint_aware"', '"context_free"')
        second = second.replace('"strict"', '"lenient_ps"')
        configs = self.load(MINIMAL + second)
        self.assertEqual([config.campaign_id for config in configs], ["ca-strict", "cf-lenient"])
        self.assertEqual(configs[1].fuzzer.strategy, GeneratorStrategy.CONTEXT_FREE)
        self.assertEqual(configs[1].subject.policy, SubjectPolicy.LENIENT_PS)

    def test_tables(self) -> None:
        (config,) = self.load(
            """
            [[campaign]]
            campaign_id = "mut"
            duration = 30.5
            validator_port = 0
            log_path = "/tmp/mut.jsonl"
            rng_seed = 7
            max_inputs = 100
            host = "localhost"
            subject = { policy = "crashy", crash_trigger = 0x42 }
            oracle = { mod_len = 256, min_ps_len = 4 }

            [campaign.fuzzer]
            strategy = "MUTATION"
            deterministic = false
            havoc_stacking_max = 4
            seeds = ["0001ff00", "00"]
            """
        )
        self.assertEqual(
            config.fuzzer,
            CFG.BuiltinFuzzer(
                GeneratorStrategy.MUTATION,
                deterministic=False,
                havoc_stacking_max=4,
                seeds=(b"\x00\x01\xff\x00", b"\x00"),
            ),
        )
        self.assertEqual(config.subject, CFG.MockSubjectSpec(SubjectPolicy.CRASHY, 0x42))
        self.assertEqual(config.oracle, TT.OracleParams(mod_len=256, min_ps_len=4))
        self.assertEqual(config.log_path, Path("/tmp/mut.jsonl"))
        self.assertEqual(config.duration, 30.5)
        self.assertEqual(config.max_inputs, 100)
        self.assertEqual(config.seed_corpus(), [b"\x00\x01\xff\x00", b"\x00"])

        mutation = config.mutation_config()
        self.assertFalse(mutation.deterministic_stage_enabled)
        self.assertEqual(mutation.havoc_stacking_max, 4)

    def test_external_fuzzer_and_subject(self) -> None:
        (config,) = self.load(
            """
            [[campaign]]
            campaign_id = "ext"
            duration = 10
            validator_port = 9100
            log_path = "ext.jsonl"
            seed_dir = "seeds"
            fuzzer = { executable = "bin/fuzz.sh", args = "-p {port} -i '{seed_dir}' -o {out_dir}" }
            subject = { executable = "harness", timeout = 2 }
            """
        )
        self.assertFalse(config.builtin)
        self.assertEqual(config.fuzzer.executable, self.base / "bin" / "fuzz.sh")
        self.assertEqual(
            config.fuzzer.args, ("-p", "{port}", "-i", "{seed_dir}", "-o", "{out_dir}")
        )
        self.assertEqual(config.subject, CFG.ExternalSubjectSpec(Path("harness"), 2.0))
        self.assertEqual(config.seed_dir, self.base / "seeds")
        self.assertIsNone(config.mutation_config())

    def test_log_dir_environment(self) -> None:
        log_dir = self.base / "elsewhere"
        with mock.patch.dict(os.environ, {CFG.LOG_DIR_ENV: str(log_dir)}):
            (config,) = self.load(MINIMAL)
        self.assertEqual(config.log_path, log_dir / "logs" / "ca-strict.jsonl")

    def test_repeat(self) -> None:
        text = MINIMAL.replace("duration = 60", "duration = 60\nrepeat = 3\nrng_seed = 10")
        configs = self.load(text)
        self.assertEqual(
            [config.campaign_id for config in configs],
            ["ca-strict-run1", "ca-strict-run2", "ca-strict-run3"],
        )
        self.assertEqual([config.rng_seed for config in configs], [10, 11, 12])
        self.assertEqual([config.validator_port for config in configs], [9000, 9001, 9002])
        self.assertEqual(
            [config.log_path.name for config in configs],
            ["ca-strict-run1.jsonl", "ca-strict-run2.jsonl", "ca-strict-run3.jsonl"],
        )

    def test_repeat_ephemeral_port(self) -> None:
        text = MINIMAL.replace("9000", "0").replace("duration = 60", "duration = 60\nrepeat = 2")
        self.assertEqual([config.validator_port for config in self.load(text)], [0, 0])


class TestConfigErrors(ConfigTestCase):
    """Malformed files name the offending field."""

    def test_invalid_campaigns(self) -> None:
        test_cases = [
            # replaced text, replacement, field
            ("duration = 60", "duration = 0", "campaign[0].duration"),
            ("duration = 60", "duration = -1.5", "campaign[0].duration"),
            ("duration = 60", "", "campaign[0].duration"),
            ('campaign_id = "ca-strict"', "", "campaign[0].campaign_id"),
            ('campaign_id = "ca-strict"', 'campaign_id = ""', "campaign[0].campaign_id"),
            ("validator_port = 9000", "validator_port = 70000", "campaign[0].validator_port"),
            ("validator_port = 9000", "validator_port = true", "campaign[0].validator_port"),
            ("validator_port = 9000", 'validator_port = "9000"', "campaign[0].validator_port"),
            ('fuzzer = "constraint_aware"', 'fuzzer = "afl"', "campaign[0].fuzzer.strategy"),
            ('fuzzer = "constraint_aware"', 'fuzzer = "mutation"', "campaign[0].fuzzer"),
            ('fuzzer = "constraint_aware"', "fuzzer = 3", "campaign[0].fuzzer"),
            ('subject = "strict"', 'subject = "paranoid"', "campaign[0].subject.policy"),
            (
                'subject = "strict"',
                'subject = { policy = "crashy", crash_trigger = 256 }',
                "campaign[0].subject.crash_trigger",
            ),
            (
                'subject = "strict"',
                'subject = { policy = "strict", colour = 1 }',
                "campaign[0].subject.colour",
            ),
            ("duration = 60", "duration = 60\nverbose = true", "campaign[0].verbose"),
            ("duration = 60", "duration = 60\nmax_inputs = 0", "campaign[0].max_inputs"),
            ("duration = 60", "duration = 60\nrepeat = 0", "campaign[0].repeat"),
            ("duration = 60", "duration = 60\noracle = { mod_len = 10 }", "campaign[0].oracle"),
            (
                "duration = 60",
                "duration = 60\noracle = { modulus = 10 }",
                "campaign[0].oracle.modulus",
            ),
        ]
        for ii, (old, new, field) in enumerate(test_cases):
            with self.subTest(i=ii):
                self.assertIn(old, MINIMAL, f"Subtest {ii}")
                self.assertConfigError(MINIMAL.replace(old, new), field)

    def test_duplicate_ids(self) -> None:
        self.assertConfigError(MINIMAL + MINIMAL.replace("9000", "9001"), "campaign[1].campaign_id")

    def test_duplicate_ids_after_repeat(self) -> None:
        first = MINIMAL.replace("duration = 60", "duration = 60\nrepeat = 2")
        second = MINIMAL.replace('"ca-strict"', '"ca-strict-run2"').replace("9000", "9500")
        self.assertConfigError(first + second, "campaign[1].campaign_id")

    def test_key_must_match_oracle(self) -> None:
        # toy key, two-byte modulus
        RSA.save_key(RSA.RsaKey.from_primes(61, 53, 17), self.base / "toy.json")
        test_cases = [
            # added lines, field
            ("oracle = { mod_len = 128 }", "campaign[0].oracle.mod_len"),
            ('key_file = "toy.json"', "campaign[0].key_file"),
            ('key_file = "missing.json"', "campaign[0].key_file"),
        ]
        for ii, (lines, field) in enumerate(test_cases):
            with self.subTest(i=ii):
                text = MINIMAL.replace("duration = 60", f"duration = 60\n{lines}")
                with self.assertRaises(CFG.ConfigError, msg=f"Subtest {ii}") as ctx:
                    self.load(text)
                self.assertEqual(ctx.exception.field, field, f"Subtest {ii}")

    def test_key_ignored_by_external_subjects(self) -> None:
        text = MINIMAL.replace('subject = "strict"', 'subject = { executable = "harness" }')
        text = text.replace("duration = 60", "duration = 60\noracle = { mod_len = 12 }")
        (config,) = self.load(text)
        self.assertEqual(config.oracle.mod_len, 12)

    def test_no_campaigns(self) -> None:
        self.assertConfigError("", "campaign")
        self.assertConfigError("title = 'nothing'", "title")

    def test_not_toml(self) -> None:
        with self.assertRaises(CFG.ConfigError):
            self.load("[[campaign]\n")


class TestCampaignKey(ConfigTestCase):
    """Mock subjects sign with a key as long as the oracle's modulus."""

    # 2^61 - 1 and 2^31 - 1, a 92-bit modulus
    KEY_12 = RSA.RsaKey.from_primes(2**61 - 1, 2**31 - 1, 65537)

    def test_matching_key_file(self) -> None:
        RSA.save_key(self.KEY_12, self.base / "key12.json")
        text = MINIMAL.replace(
            "duration = 60",
            'duration = 60\nkey_file = "key12.json"\noracle = { mod_len = 12 }',
        )
        (config,) = self.load(text)
        self.assertEqual(config.key().mod_len, 12)

        subject = config.build_subject()
        valid = bytes.fromhex("0001ffffffffffffffff00aa")
        self.assertTrue(subject(valid).accepted)

    def test_build_subject_rejects_mismatch(self) -> None:
        (config,) = self.load(MINIMAL)
        mismatched = CFG.CampaignConfig(
            campaign_id="small",
            fuzzer=config.fuzzer,
            subject=config.subject,
            duration=1.0,
            validator_port=0,
            log_path=self.base / "small.jsonl",
            oracle=TT.OracleParams(mod_len=12),
        )
        with self.assertRaises(CFG.ConfigError) as ctx:
            mismatched.build_subject()
        self.assertEqual(ctx.exception.field, "small.oracle.mod_len")
