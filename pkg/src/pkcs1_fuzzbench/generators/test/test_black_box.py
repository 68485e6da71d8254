"""Test the black-box generators: constraint-aware, context-free and field mutation."""

import math
import tempfile
import unittest
from pathlib import Path

from ...pkcs1 import oracle as OR
from ...pkcs1 import types as TT
from .. import base as BASE
from .. import constraint_aware as CA
from .. import context_free as CF
from .. import factory as FACTORY
from .. import field_mutation as FM

PARAMS_12 = TT.OracleParams(mod_len=12)
PARAMS_256 = TT.OracleParams(mod_len=256)


def validity_rate(inputs, params: TT.OracleParams) -> float:
    return sum(OR.is_valid(raw, params) for raw in inputs) / len(inputs)


class TestConstraintAware(unittest.TestCase):
    """Every output must satisfy the oracle."""

    def test_all_valid_small_modulus(self) -> None:
        inputs = CA.gen_constraint_aware(PARAMS_12, 3, 1000)
        self.assertEqual(len(inputs), 1000)
        self.assertEqual(validity_rate(inputs, PARAMS_12), 1.0)

    def test_all_valid_full_modulus(self) -> None:
        inputs = CA.gen_constraint_aware(PARAMS_256, 17, 10_000)
        self.assertEqual(len(inputs), 10_000)
        self.assertEqual(validity_rate(inputs, PARAMS_256), 1.0)

    def test_all_valid_for_every_small_parameter_set(self) -> None:
        for mod_len in range(4, 20):
            for min_ps_len in range(1, mod_len - 2):
                params = TT.OracleParams(mod_len=mod_len, min_ps_len=min_ps_len)
                with self.subTest(mod_len=mod_len, min_ps_len=min_ps_len):
                    inputs = CA.gen_constraint_aware(params, mod_len, 50)
                    self.assertEqual(validity_rate(inputs, params), 1.0)

    def test_payload_lengths_span_the_range(self) -> None:
        params = TT.OracleParams(mod_len=16)
        inputs = CA.gen_constraint_aware(params, 0, 2000)
        pl_lengths = set()
        for raw in inputs:
            parsed = OR.parse_em(raw).parsed
            assert parsed is not None
            pl_lengths.add(len(parsed.pl))
        self.assertEqual(pl_lengths, set(range(params.max_pl_len + 1)))

    def test_reproducible(self) -> None:
        self.assertEqual(
            CA.gen_constraint_aware(PARAMS_256, 5, 50),
            CA.gen_constraint_aware(PARAMS_256, 5, 50),
        )
        self.assertNotEqual(
            CA.gen_constraint_aware(PARAMS_256, 5, 50),
            CA.gen_constraint_aware(PARAMS_256, 6, 50),
        )

    def test_generate_restarts_the_sequence(self) -> None:
        generator = CA.ConstraintAwareGenerator(PARAMS_12, 9)
        self.assertEqual(generator.generate(20), generator.generate(20))


class TestContextFree(unittest.TestCase):
    """Outputs follow the grammar, validity only holds by chance."""

    def test_closed_form(self) -> None:
        test_cases = [
            # params, probability
            (PARAMS_12, (2, 169)),
            (PARAMS_256, (246, 66049)),
            (TT.OracleParams(mod_len=4, min_ps_len=1), (1, 25)),
        ]
        for ii, (params, (num, den)) in enumerate(test_cases):
            with self.subTest(i=ii):
                probability = CF.expected_validity(params)
                self.assertEqual(probability.numerator * den, num * probability.denominator)

    def test_closed_form_matches_lattice_enumeration(self) -> None:
        for mod_len in range(4, 30):
            params = TT.OracleParams(mod_len=mod_len, min_ps_len=min(8, mod_len - 3))
            hits = sum(
                1
                for ps_len in range(mod_len + 1)
                for pl_len in range(mod_len + 1)
                if ps_len + pl_len + 3 == mod_len and ps_len >= params.min_ps_len
            )
            with self.subTest(mod_len=mod_len):
                self.assertEqual(
                    CF.expected_validity(params) * (mod_len + 1) ** 2, hits
                )

    def _assert_within_three_standard_errors(
        self, params: TT.OracleParams, count: int, rng_seed: int
    ) -> None:
        inputs = CF.gen_context_free(params, rng_seed, count)
        expected = float(CF.expected_validity(params))
        standard_error = math.sqrt(expected * (1 - expected) / count)
        empirical = validity_rate(inputs, params)
        self.assertGreater(empirical, 0.0)
        self.assertLess(empirical, 1.0)
        self.assertLessEqual(abs(empirical - expected), 3 * standard_error)

    def test_empirical_validity_small_modulus(self) -> None:
        self._assert_within_three_standard_errors(PARAMS_12, 100_000, 2024)

    def test_empirical_validity_full_modulus(self) -> None:
        self._assert_within_three_standard_errors(PARAMS_256, 10_000, 7)

    def test_grammar_prefix(self) -> None:
        for raw in CF.gen_context_free(PARAMS_12, 1, 1000):
            self.assertEqual(raw[:2], b"\x00\x01")
            parsed = OR.parse_em(raw).parsed
            assert parsed is not None
            self.assertEqual(parsed.ps, b"\xff" * len(parsed.ps))
            self.assertLessEqual(len(parsed.ps), 12)

    def test_reproducible(self) -> None:
        self.assertEqual(
            CF.gen_context_free(PARAMS_12, 42, 100), CF.gen_context_free(PARAMS_12, 42, 100)
        )


class TestFieldMutation(unittest.TestCase):
    """Well-formed messages with one field deliberately broken."""

    def test_each_mutation_breaks_its_field(self) -> None:
        message = bytes.fromhex("0001ffffffffffffffff00aabbccdd")
        params = TT.OracleParams(mod_len=len(message))
        generator = FM.FieldMutationGenerator(params, 0)
        test_cases = [
            # mutation, expected reason
            (FM.FieldMutation.LEADING_BYTE, TT.ReasonCode.BAD_LEADING_BYTE),
            (FM.FieldMutation.BLOCK_TYPE, TT.ReasonCode.BAD_BLOCK_TYPE),
            (FM.FieldMutation.PS_BYTE, TT.ReasonCode.PS_NOT_FF),
            (FM.FieldMutation.SEPARATOR, TT.ReasonCode.MISSING_SEPARATOR),
            (FM.FieldMutation.LENGTH_GROW, TT.ReasonCode.LENGTH_MISMATCH),
            (FM.FieldMutation.LENGTH_SHRINK, TT.ReasonCode.LENGTH_MISMATCH),
        ]
        for mutation, reason in test_cases:
            for _ in range(50):
                mutated = bytearray(message)
                generator.mutate(mutated, mutation)
                with self.subTest(mutation=mutation.name):
                    self.assertIn(reason, OR.validate(bytes(mutated), params).reasons)

    def test_padding_split_keeps_the_length(self) -> None:
        message = bytes.fromhex("0001ffffffffffffffff00aa")
        generator = FM.FieldMutationGenerator(PARAMS_12, 3)
        for _ in range(50):
            mutated = bytearray(message)
            generator.mutate(mutated, FM.FieldMutation.PS_SPLIT)
            self.assertEqual(len(mutated), 12)
            self.assertEqual(mutated.count(0), 3)
            self.assertIn(TT.ReasonCode.PS_TOO_SHORT, OR.validate(bytes(mutated), PARAMS_12).reasons)

    def test_rate_extremes(self) -> None:
        self.assertEqual(
            validity_rate(FM.gen_field_mutation(PARAMS_256, 1, 500, mutation_rate=0.0), PARAMS_256),
            1.0,
        )
        always = validity_rate(
            FM.gen_field_mutation(PARAMS_256, 1, 2000, mutation_rate=1.0), PARAMS_256
        )
        self.assertLess(always, 0.5)

    def test_partial_validity(self) -> None:
        rate = validity_rate(FM.gen_field_mutation(PARAMS_256, 8, 10_000), PARAMS_256)
        self.assertGreater(rate, 0.0)
        self.assertLess(rate, 1.0)

    def test_reproducible(self) -> None:
        self.assertEqual(
            FM.gen_field_mutation(PARAMS_256, 4, 200), FM.gen_field_mutation(PARAMS_256, 4, 200)
        )

    def test_bad_rate(self) -> None:
        for rate in [-0.1, 1.5]:
            with self.subTest(rate=rate):
                with self.assertRaises(BASE.GeneratorConfigError):
                    FM.FieldMutationGenerator(PARAMS_12, 0, rate)


class TestGeneratorPlumbing(unittest.TestCase):
    """Strategy names, the factory and corpus files."""

    def test_strategy_names(self) -> None:
        for strategy in BASE.GeneratorStrategy:
            with self.subTest(strategy=strategy.name):
                self.assertIs(BASE.GeneratorStrategy.from_name(strategy.value), strategy)
                self.assertIs(
                    BASE.GeneratorStrategy.from_name(strategy.value.upper()), strategy
                )
        with self.assertRaises(BASE.GeneratorConfigError):
            BASE.GeneratorStrategy.from_name("grammarinator")

    def test_factory(self) -> None:
        generator = FACTORY.build_generator(
            BASE.GeneratorStrategy.CONTEXT_FREE, PARAMS_12, 11
        )
        self.assertIsInstance(generator, CF.ContextFreeGenerator)
        self.assertEqual(generator.generate(30), CF.gen_context_free(PARAMS_12, 11, 30))
        with self.assertRaises(BASE.GeneratorConfigError):
            FACTORY.build_generator(BASE.GeneratorStrategy.MUTATION, PARAMS_12, 11)

    def test_write_and_load_corpus(self) -> None:
        inputs = CA.gen_constraint_aware(PARAMS_12, 0, 12)
        with tempfile.TemporaryDirectory() as tmp:
            out_dir = Path(tmp) / "corpus"
            self.assertEqual(BASE.write_inputs(inputs, out_dir), 12)
            names = sorted(path.name for path in out_dir.iterdir())
            self.assertEqual(names[0], "000000")
            self.assertEqual(names[-1], "000011")
            self.assertEqual(BASE.load_seed_corpus(out_dir), inputs)

    def test_missing_seed_dir(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(BASE.GeneratorConfigError):
                BASE.load_seed_corpus(Path(tmp) / "absent")
