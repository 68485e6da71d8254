"""Test run evaluation, aggregation and report export."""

import csv
import json
import tempfile
import unittest
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import List

from ...controller.campaign import CampaignSummary
from ...pkcs1 import oracle as OR
from ...pkcs1 import types as TT
from ...validator.record import WIRE_DECODE_ERROR, InputRecord, utc_timestamp
from .. import evaluator as EV
from .. import report as REP
from .. import sample_group as SG
from ..series import ValiditySeries

PARAMS_12 = TT.OracleParams(mod_len=12)
START = datetime(2024, 5, 1, 12, 0, 0, tzinfo=timezone.utc)
VALID = bytes.fromhex("0001ffffffffffffffff00aa")
VALID_2 = bytes.fromhex("0001ffffffffffffffff00bb")
INVALID = bytes.fromhex("0002ffffffffffffffff00aa")


def observe(campaign_id: str, raw: bytes, seconds: float = 0.0, status=None) -> InputRecord:
    verdict = OR.validate(raw, PARAMS_12)
    return InputRecord(
        timestamp=utc_timestamp(START + timedelta(seconds=seconds)),
        campaign_id=campaign_id,
        hex=raw.hex(),
        valid=verdict.valid,
        reasons=verdict.reason_names(),
        crashed=status == "-1",
        status=status,
    )


def hexes(records: List[InputRecord]) -> List[str]:
    return [record.hex for record in records]

def run_with_validity(campaign_id: str, percent: int) -> REP.RunMetrics:
    return REP.RunMetrics(
        campaign_id=campaign_id,
        group=SG.group_name(campaign_id),
        records=100,
        valid=percent,
        throughput=10.0,
        wall_seconds=10.0,
        crashes=0,
        acceptance_percent=None,
        disagreements=0,
        series=ValiditySeries(600),
    )


class TestAggregate(unittest.TestCase):
    def test_mean_and_population_std(self) -> None:
        runs = [run_with_validity(f"ca-run{kk}", pct) for kk, pct in enumerate((10, 20, 30), 1)]
        report = REP.aggregate(runs)
        stat = report.overall["validity_percent"]
        self.assertAlmostEqual(stat.mean, 20.0)
        self.assertAlmostEqual(stat.std, 8.16496580927726)
        self.assertEqual(stat.runs, 3)
        self.assertEqual(report.groups["ca"]["validity_percent"], stat)
        self.assertEqual(report.campaign_ids, ["ca-run1", "ca-run2", "ca-run3"])

    def test_zero_std(self) -> None:
        test_cases = [
            [run_with_validity("single", 42)],
            [run_with_validity("same-run1", 42), run_with_validity("same-run2", 42)],
        ]
        for ii, runs in enumerate(test_cases):
            with self.subTest(i=ii):
                report = REP.aggregate(runs)
                for name, stat in report.overall.items():
                    self.assertEqual(stat.std, 0.0, f"Subtest {ii}: {name}")
                self.assertIn("42.00 (0.00)", report.headline_table())

    def test_missing_metrics_are_left_out(self) -> None:
        report = REP.aggregate([run_with_validity("a", 50)])
        self.assertNotIn("edit_dist_mean", report.overall)
        self.assertNotIn("acceptance_percent", report.overall)
        self.assertIn("-", report.headline_table())


class TestEvaluator(unittest.TestCase):
    def test_update(self) -> None:
        records = [
            observe("ca", VALID, 0, "1"),
            observe("ca", VALID_2, 1, "1"),
            observe("ca", INVALID, 2, "0"),
            observe("ca", INVALID, 3, "1"),
            observe("ca", VALID, 4, "-1"),
        ]
        summary = CampaignSummary("ca", 5, 2.5, 2.0, "", "")
        evaluator = EV.Evaluator(sample_size=5, repetitions=2, bucket_seconds=2)
        run = evaluator.update("ca", records, summary)

        self.assertEqual(run.records, 5)
        self.assertEqual(run.valid, 3)
        self.assertAlmostEqual(run.validity_percent, 60.0)
        self.assertAlmostEqual(run.throughput, 2.0)
        self.assertEqual(run.crashes, 1)
        self.assertAlmostEqual(run.acceptance_percent, 75.0)
        self.assertEqual(run.disagreements, 1)
        self.assertEqual(len(run.series.points), 3)
        self.assertIsNotNone(run.diversity)
        self.assertIsNotNone(run.diversity.valid_only_variant)
        self.assertEqual(run.diversity.valid_only_variant.population, 3)

    def test_throughput_without_summary(self) -> None:
        test_cases = [
            # offsets in seconds, throughput
            ([0, 1, 2, 4], 1.0),
            ([0, 0, 0], 3.0),
        ]
        for ii, (offsets, throughput) in enumerate(test_cases):
            with self.subTest(i=ii):
                records = [observe("t", VALID, offset) for offset in offsets]
                run = EV.Evaluator(repetitions=1).update("t", records)
                self.assertAlmostEqual(run.throughput, throughput, msg=f"Subtest {ii}")
                self.assertIsNone(run.acceptance_percent)

    def test_no_records(self) -> None:
        with self.assertRaises(EV.InsufficientRecordsError):
            EV.Evaluator().update("empty", [])

    def test_single_record_has_no_diversity(self) -> None:
        with self.assertWarns(UserWarning):
            run = EV.Evaluator().update("one", [observe("one", VALID)])
        self.assertIsNone(run.diversity)
        self.assertEqual(run.validity_percent, 100.0)

    def test_summarise_groups_runs(self) -> None:
        evaluator = EV.Evaluator(sample_size=4, repetitions=2)
        evaluator.update("ca-run1", [observe("ca-run1", VALID, ii) for ii in range(4)])
        evaluator.update("ca-run2", [observe("ca-run2", VALID_2, ii) for ii in range(4)])
        evaluator.update("cf", [observe("cf", INVALID, ii) for ii in range(4)])
        report = evaluator.summarise()
        self.assertEqual(sorted(report.groups), ["ca", "cf"])
        self.assertEqual(report.groups["ca"]["validity_percent"].runs, 2)
        self.assertEqual(report.groups["ca"]["validity_percent"].mean, 100.0)
        self.assertEqual(report.groups["cf"]["validity_percent"].mean, 0.0)
        self.assertAlmostEqual(report.overall["validity_percent"].mean, 200 / 3)
        self.assertIn("100.00 (0.00)", report.headline_table())


class TestReportExport(unittest.TestCase):
    def test_files(self) -> None:
        evaluator = EV.Evaluator(sample_size=4, repetitions=2, bucket_seconds=1)
        evaluator.update("ca", [observe("ca", VALID, ii, "1") for ii in range(3)])
        evaluator.update("cf", [observe("cf", raw, ii) for ii, raw in enumerate((VALID, INVALID))])
        report = evaluator.summarise()

        with tempfile.TemporaryDirectory() as tmp:
            base = Path(tmp)
            report.write_json(base / "report.json")
            report.write_csv(base / "report.csv")
            report.write_tsv(base / "series.tsv")

            data = json.loads((base / "report.json").read_text(encoding="utf8"))
            self.assertEqual(data["campaign_ids"], ["ca", "cf"])
            self.assertEqual(data["runs"][0]["metrics"]["validity_percent"], 100.0)
            self.assertEqual(data["aggregate"]["validity_percent"]["mean"], 75.0)

            with open(base / "report.csv", encoding="utf8", newline="") as f_csv:
                rows = list(csv.DictReader(f_csv))
            run_rows = [row for row in rows if row["scope"] == "run"]
            expected = sum(len(run.values()) for run in report.runs)
            self.assertEqual(len(run_rows), expected)
            ca_validity = [
                row for row in run_rows
                if row["campaign_id"] == "ca" and row["metric"] == "validity_percent"
            ]
            self.assertEqual(float(ca_validity[0]["value"]), 100.0)

            tsv = (base / "series.tsv").read_text(encoding="utf8")
            self.assertIn("# ca\n", tsv)
            self.assertIn("0\t1\t1\t1\t100.0000\n", tsv)
            self.assertIn("1\t2\t1\t0\t50.0000\n", tsv)


class TestRevalidate(unittest.TestCase):
    def test_mismatches(self) -> None:
        good = observe("c", VALID)
        tampered = observe("c", INVALID)
        tampered.valid = True
        tampered.reasons = []
        wrong_reason = observe("c", INVALID)
        wrong_reason.reasons = ["PS_NOT_FF"]
        undecodable = InputRecord(good.timestamp, "c", "", False, [WIRE_DECODE_ERROR], payload="zz")

        mismatches = REP.revalidate([good, tampered, wrong_reason, undecodable], PARAMS_12)
        self.assertEqual(mismatches, [tampered, wrong_reason])
        self.assertEqual(REP.revalidate([good], TT.OracleParams(mod_len=256)), [good])


class TestRecordGroup(unittest.TestCase):
    def test_index_and_groups(self) -> None:
        records = [
            observe("ca-run1", VALID),
            observe("ca-run2", VALID),
            observe("ca-run2", INVALID),
            observe("cf", INVALID),
        ]
        group = SG.RecordGroup.from_records(records)
        self.assertEqual(len(group), 3)
        self.assertEqual(group.get_index(), ["ca-run1", "ca-run2", "cf"])
        self.assertEqual(group["ca-run2"], records[1:3])
        self.assertEqual(group.groups(), {"ca": ["ca-run1", "ca-run2"], "cf": ["cf"]})

    def test_group_name(self) -> None:
        test_cases = [
            ("ca-run1", "ca"),
            ("ca-run12", "ca"),
            ("ca", "ca"),
            ("ca-run", "ca-run"),
            ("run1-x", "run1-x"),
        ]
        for ii, (campaign_id, expected) in enumerate(test_cases):
            with self.subTest(i=ii):
                self.assertEqual(SG.group_name(campaign_id), expected, f"Subtest {ii}")

    def test_load_keeps_logs_apart(self) -> None:
        first = [observe("a", VALID, 0), observe("a", INVALID, 1)]
        second = [observe("a", INVALID, 1), observe("b", VALID, 2)]
        with tempfile.TemporaryDirectory() as tmp:
            paths = []
            for name, records in (("first", first), ("second", second)):
                path = Path(tmp) / f"{name}.jsonl"
                path.write_text("".join(r.to_json() + "\n" for r in records), encoding="utf8")
                paths.append(path)
            group = SG.RecordGroup.from_logs(paths + paths[:1])

        self.assertEqual(len(group.records), 4)
        self.assertEqual(group.get_index(), [f"a@{paths[0]}", f"a@{paths[1]}", "b"])
        self.assertEqual(hexes(group[f"a@{paths[0]}"]), hexes(first))
        self.assertEqual(hexes(group[f"a@{paths[1]}"]), hexes(second[:1]))
        run = group.run("b")
        self.assertEqual((run.campaign_id, run.source), ("b", paths[1]))
        self.assertEqual(hexes(run.records), hexes(second[1:]))
        self.assertEqual(group.groups(), {"a": [f"a@{paths[0]}", f"a@{paths[1]}"], "b": ["b"]})

    def test_run_group_overrides_campaign_id(self) -> None:
        evaluator = EV.Evaluator(sample_size=2, repetitions=1)
        evaluator.update("a@first.jsonl", [observe("a", VALID, 0)], group="a")
        evaluator.update("a@second.jsonl", [observe("a", INVALID, 0)], group="a")
        report = evaluator.summarise()
        self.assertEqual(list(report.groups), ["a"])
        self.assertEqual(report.groups["a"]["validity_percent"], REP.MetricStat(50.0, 50.0, 2))
