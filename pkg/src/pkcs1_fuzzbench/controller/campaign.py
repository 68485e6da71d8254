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
Run fuzz campaigns.

A campaign starts its own validator, runs a built-in generator or an external
fuzzer against a subject until its bounds are reached, then shuts the
validator down and writes a summary next to the log.
"""

from __future__ import annotations

import json
import logging
import os
import shutil
import signal
import subprocess
import time
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from tqdm import tqdm

from ..generators import Generator, build_generator
from ..validator import serve
from ..validator.record import utc_timestamp
from .config import BuiltinFuzzer, CampaignConfig, ExternalFuzzer, ExternalSubjectSpec
from .harness import Harness

LOGGER = logging.getLogger(__name__)

SHUTDOWN_GRACE = 2.0
DRAIN_POLL = 0.25
MONITOR_POLL = 0.1
TERMINATE_TIMEOUT = 1.0
SUMMARY_SUFFIX = ".summary.json"


class CampaignError(RuntimeError):
    """A campaign could not be started or completed."""


@dataclass
class CampaignSummary:
    campaign_id: str
    records_written: int
    wall_seconds: float
    throughput: float
    started_at: str
    finished_at: str

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> CampaignSummary:
        return cls(
            campaign_id=str(data["campaign_id"]),
            records_written=int(data["records_written"]),  # type: ignore[arg-type]
            wall_seconds=float(data["wall_seconds"]),  # type: ignore[arg-type]
            throughput=float(data["throughput"]),  # type: ignore[arg-type]
            started_at=str(data["started_at"]),
            finished_at=str(data["finished_at"]),
        )


def summary_path(log_path: Path) -> Path:
    return log_path.with_name(log_path.name + SUMMARY_SUFFIX)


def write_summary(summary: CampaignSummary, log_path: Path) -> Path:
    path = summary_path(log_path)
    with open(path, "w", encoding="utf8") as f_summary:
        json.dump(summary.to_dict(), f_summary, indent=2)
        f_summary.write("\n")
    return path


def read_summary(log_path: Path) -> Optional[CampaignSummary]:
    """Load the summary written next to ``log_path``, if there is one."""
    path = summary_path(Path(log_path))
    if not path.is_file():
        return None
    with open(path, "r", encoding="utf8") as f_summary:
        return CampaignSummary.from_dict(json.load(f_summary))


def locate_executable(executable: Path) -> Path:
    """Find an executable by path, or on ``PATH`` for a bare name."""
    if executable.parent == Path("."):
        found = shutil.which(str(executable))
        if found is not None:
            return Path(found)
    elif executable.is_file() and os.access(executable, os.X_OK):
        return executable
    raise CampaignError(f"Executable {executable} not found")


def render_args(args: Sequence[str], values: Dict[str, object]) -> List[str]:
    """Fill the placeholders of an external fuzzer's argument template."""
    try:
        return [arg.format_map(values) for arg in args]
    except (KeyError, IndexError, ValueError) as exc:
        raise CampaignError(f"Malformed argument template {list(args)}: {exc!r}") from exc


def _template_values(config: CampaignConfig, port: int, out_dir: Path) -> Dict[str, object]:
    return {
        "port": port,
        "seed_dir": config.seed_dir or "",
        "out_dir": out_dir,
        "subject": config.subject.name,
        "campaign_id": config.campaign_id,
    }


def _run_builtin(
    config: CampaignConfig,
    generator: Generator,
    harness: Harness,
    deadline: float,
    progress: bool,
) -> int:
    sent = 0
    generator.reset()
    with tqdm(
        total=config.max_inputs, unit="input", desc=config.campaign_id, disable=not progress
    ) as bar:
        for em in generator.stream():
            if time.monotonic() >= deadline:
                break
            if config.max_inputs is not None and sent >= config.max_inputs:
                break
            harness(em)
            sent += 1
            bar.update()
    return sent


def _stop_process(proc: subprocess.Popen) -> None:
    if proc.poll() is not None:
        return
    # the fuzzer runs in its own session, so its children go too
    try:
        os.killpg(proc.pid, signal.SIGTERM)
        proc.wait(timeout=TERMINATE_TIMEOUT)
    except ProcessLookupError:
        pass
    except subprocess.TimeoutExpired:
        os.killpg(proc.pid, signal.SIGKILL)
    proc.wait()


def _run_external(
    config: CampaignConfig,
    command: List[str],
    out_dir: Path,
    service_records: Callable[[], int],
    deadline: float,
) -> None:
    LOGGER.debug("Starting %s", " ".join(command))
    with open(out_dir / "fuzzer.log", "wb") as f_out:
        proc = subprocess.Popen(
            command,
            stdin=subprocess.DEVNULL,
            stdout=f_out,
            stderr=subprocess.STDOUT,
            cwd=out_dir,
            start_new_session=True,
        )
        try:
            while time.monotonic() < deadline:
                if proc.poll() is not None:
                    LOGGER.warning(
                        "%s: fuzzer exited early with code %d",
                        config.campaign_id,
                        proc.returncode,
                    )
                    break
                if config.max_inputs is not None and service_records() >= config.max_inputs:
                    break
                time.sleep(MONITOR_POLL)
        finally:
            _stop_process(proc)


def _drain(records: Callable[[], int], grace: float) -> None:
    """Wait until no record arrived for one poll interval, at most ``grace`` seconds."""
    end = time.monotonic() + grace
    last = records()
    while time.monotonic() < end:
        time.sleep(min(DRAIN_POLL, max(0.0, end - time.monotonic())))
        current = records()
        if current == last:
            return
        last = current


def run_campaign(
    config: CampaignConfig, progress: bool = False, grace: float = SHUTDOWN_GRACE
) -> CampaignSummary:
    """Run one campaign to completion.

    Parameters
    ----------
    config : CampaignConfig
        The campaign.
    progress : bool
        Show a progress bar for built-in fuzzers.
    grace : float
        Longest wait for in-flight records once an external fuzzer stopped.

    Returns
    -------
    CampaignSummary
        Record count, wall-clock time and throughput of the campaign.

    Raises
    ------
    CampaignError
        If an external executable is missing or its argument template is
        malformed. Raised before the validator starts.
    ValidatorStartupError
        If the validator port is busy.
    """
    command: List[str] = []
    out_dir = config.log_path.parent / f"{config.campaign_id}-out"
    if isinstance(config.subject, ExternalSubjectSpec):
        locate_executable(config.subject.executable)
    if isinstance(config.fuzzer, ExternalFuzzer):
        command = [str(locate_executable(config.fuzzer.executable))]
        values = _template_values(config, config.validator_port, out_dir)
        render_args(config.fuzzer.args, values)
    else:
        generator = build_generator(
            config.fuzzer.strategy,
            config.oracle,
            config.rng_seed,
            mutation=config.mutation_config(),
            mutation_rate=config.fuzzer.mutation_rate,
        )
        subject = config.build_subject()

    LOGGER.info(
        "Starting campaign %s: %s against %s for %.1f s",
        config.campaign_id,
        config.fuzzer.name,
        config.subject.name,
        config.duration,
    )
    if config.log_path.is_file() and config.log_path.stat().st_size:
        LOGGER.warning("%s: appending to existing log %s", config.campaign_id, config.log_path)
    started_at = datetime.now(timezone.utc)
    start = time.monotonic()
    deadline = start + config.duration
    service = serve(
        config.validator_port, config.oracle, config.log_path, config.campaign_id, config.host
    )
    try:
        if isinstance(config.fuzzer, BuiltinFuzzer):
            harness = Harness(subject, config.host, service.port)
            _run_builtin(config, generator, harness, deadline, progress)
        else:
            out_dir.mkdir(parents=True, exist_ok=True)
            command += render_args(
                config.fuzzer.args, _template_values(config, service.port, out_dir)
            )
            _run_external(config, command, out_dir, lambda: service.records_written, deadline)
            _drain(lambda: service.records_written, grace)
    finally:
        records_written = service.shutdown()
    wall_seconds = time.monotonic() - start
    finished_at = datetime.now(timezone.utc)

    summary = CampaignSummary(
        campaign_id=config.campaign_id,
        records_written=records_written,
        wall_seconds=wall_seconds,
        throughput=records_written / wall_seconds,
        started_at=utc_timestamp(started_at),
        finished_at=utc_timestamp(finished_at),
    )
    write_summary(summary, config.log_path)
    LOGGER.info(
        "Finished campaign %s: %d records in %.1f s (%.1f inputs/s)",
        config.campaign_id,
        records_written,
        wall_seconds,
        summary.throughput,
    )
    return summary


def find_collisions(configs: Sequence[CampaignConfig]) -> List[str]:
    """Describe every validator port, log path or id shared by several campaigns."""
    ports: Dict[int, List[str]] = defaultdict(list)
    logs: Dict[Path, List[str]] = defaultdict(list)
    ids: Dict[str, int] = defaultdict(int)
    for config in configs:
        if config.validator_port:
            ports[config.validator_port].append(config.campaign_id)
        logs[config.log_path.resolve()].append(config.campaign_id)
        ids[config.campaign_id] += 1

    collisions = [
        f"port {port}: {', '.join(owners)}"
        for port, owners in ports.items()
        if len(owners) > 1
    ]
    collisions += [
        f"log {path}: {', '.join(owners)}" for path, owners in logs.items() if len(owners) > 1
    ]
    collisions += [
        f"campaign_id {cid} used {count} times" for cid, count in ids.items() if count > 1
    ]
    return collisions


def run_many(
    configs: Sequence[CampaignConfig], parallelism: int = 1, progress: bool = False
) -> List[CampaignSummary]:
    """Run several campaigns, at most ``parallelism`` of them at a time.

    Returns
    -------
    List[CampaignSummary]
        One summary per campaign, in the order of ``configs``.

    Raises
    ------
    CampaignError
        If campaigns share a validator port or a log file, before any of them
        starts. The message lists every collision.
    """
    if parallelism < 1:
        raise ValueError(f"parallelism must be positive, got {parallelism}")
    collisions = find_collisions(configs)
    if collisions:
        raise CampaignError("Campaigns collide: " + "; ".join(collisions))

    with ThreadPoolExecutor(max_workers=parallelism, thread_name_prefix="campaign") as pool:
        futures = [pool.submit(run_campaign, config, progress) for config in configs]
        return [future.result() for future in futures]
