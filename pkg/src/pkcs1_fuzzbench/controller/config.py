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
Campaign configuration files.

A configuration file is TOML with one ``[[campaign]]`` table per campaign::

    [[campaign]]
    campaign_id = "ca-strict"
    fuzzer = "constraint_aware"
    subject = "strict"
    duration = 60
    validator_port = 9000
    log_path = "logs/ca-strict.jsonl"

``fuzzer`` and ``subject`` also accept tables for the longer forms, see
``FUZZER_KEYS`` and ``SUBJECT_KEYS``.
"""

from __future__ import annotations

import logging
import os
import shlex
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .. import subjects as SUB
from ..generators import GeneratorStrategy, MutationConfig, load_seed_corpus
from ..pkcs1 import rsa as RSA
from ..pkcs1 import types as TT

LOGGER = logging.getLogger(__name__)

LOG_DIR_ENV = "FUZZEVAL_LOG_DIR"
DEFAULT_HOST = "127.0.0.1"

CAMPAIGN_KEYS = {
    "campaign_id",
    "fuzzer",
    "subject",
    "duration",
    "validator_port",
    "log_path",
    "rng_seed",
    "seed_dir",
    "max_inputs",
    "repeat",
    "key_file",
    "oracle",
    "host",
}
FUZZER_KEYS = {
    "strategy",
    "deterministic",
    "havoc_stacking_max",
    "seeds",
    "mutation_rate",
    "executable",
    "args",
}
SUBJECT_KEYS = {"policy", "crash_trigger", "executable", "timeout"}
ORACLE_KEYS = {"mod_len", "min_ps_len"}

_REQUIRED = object()


class ConfigError(ValueError):
    """Invalid campaign configuration.

    Attributes
    ----------
    field : Optional[str]
        Dotted name of the offending entry, e.g. ``campaign[1].duration``.
    """

    def __init__(self, message: str, field: Optional[str] = None) -> None:
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


@dataclass(frozen=True)
class BuiltinFuzzer:
    strategy: GeneratorStrategy
    deterministic: bool = True
    havoc_stacking_max: int = 16
    seeds: Tuple[bytes, ...] = ()
    mutation_rate: float = 0.5

    @property
    def name(self) -> str:
        return self.strategy.value


@dataclass(frozen=True)
class ExternalFuzzer:
    """A fuzzer executable started once per campaign.

    Every argument may use the placeholders ``{port}``, ``{seed_dir}``,
    ``{out_dir}``, ``{subject}`` and ``{campaign_id}``.
    """

    executable: Path
    args: Tuple[str, ...] = ()

    @property
    def name(self) -> str:
        return self.executable.name


@dataclass(frozen=True)
class MockSubjectSpec:
    policy: SUB.SubjectPolicy
    crash_trigger: int = SUB.DEFAULT_CRASH_TRIGGER

    @property
    def name(self) -> str:
        return self.policy.value


@dataclass(frozen=True)
class ExternalSubjectSpec:
    executable: Path
    timeout: float = SUB.DEFAULT_SUBJECT_TIMEOUT

    @property
    def name(self) -> str:
        return str(self.executable)


FuzzerSpec = Union[BuiltinFuzzer, ExternalFuzzer]
SubjectSpec = Union[MockSubjectSpec, ExternalSubjectSpec]


@dataclass
class CampaignConfig:
    """One bounded run of a fuzzer against a subject.

    Attributes
    ----------
    campaign_id : str
        Identifier stamped on every log record.
    fuzzer : FuzzerSpec
        Built-in generator or external fuzzer executable.
    subject : SubjectSpec
        Built-in mock library or external harness executable.
    duration : float
        Wall-clock bound in seconds.
    validator_port : int
        Port of the campaign's validator, 0 for an ephemeral one.
    log_path : Path
        JSON Lines log written by the validator.
    rng_seed : int
        Seed of the built-in generator.
    seed_dir : Optional[Path]
        Seed corpus directory.
    max_inputs : Optional[int]
        Count bound of built-in campaigns, checked alongside ``duration``.
    key_file : Optional[Path]
        RSA key of the built-in subjects, the packaged key otherwise.
    oracle : TT.OracleParams
        Parameters of the validator's oracle.
    host : str
        Interface of the validator.
    """

    campaign_id: str
    fuzzer: FuzzerSpec
    subject: SubjectSpec
    duration: float
    validator_port: int
    log_path: Path
    rng_seed: int = 0
    seed_dir: Optional[Path] = None
    max_inputs: Optional[int] = None
    key_file: Optional[Path] = None
    oracle: TT.OracleParams = field(default_factory=TT.OracleParams)
    host: str = DEFAULT_HOST

    @property
    def builtin(self) -> bool:
        return isinstance(self.fuzzer, BuiltinFuzzer)

    def check(self, where: str = "campaign") -> None:
        """Check the invariants that do not depend on the file layout."""
        if not self.campaign_id:
            raise ConfigError("must not be empty", f"{where}.campaign_id")
        if self.duration <= 0:
            raise ConfigError(f"must be positive, got {self.duration}", f"{where}.duration")
        if not 0 <= self.validator_port <= 65535:
            raise ConfigError(
                f"must be in 0..65535, got {self.validator_port}",
                f"{where}.validator_port",
            )
        if self.max_inputs is not None and self.max_inputs < 1:
            raise ConfigError(
                f"must be positive, got {self.max_inputs}", f"{where}.max_inputs"
            )
        if (
            isinstance(self.fuzzer, BuiltinFuzzer)
            and self.fuzzer.strategy is GeneratorStrategy.MUTATION
            and self.seed_dir is None
            and not self.fuzzer.seeds
        ):
            raise ConfigError(
                "the mutation strategy needs seed_dir or fuzzer.seeds", f"{where}.fuzzer"
            )
        if isinstance(self.subject, MockSubjectSpec):
            self.checked_key(where)

    def seed_corpus(self) -> List[bytes]:
        """Inline seeds followed by the files of ``seed_dir``."""
        corpus = list(self.fuzzer.seeds) if isinstance(self.fuzzer, BuiltinFuzzer) else []
        if self.seed_dir is not None:
            corpus.extend(load_seed_corpus(self.seed_dir))
        return corpus

    def mutation_config(self) -> Optional[MutationConfig]:
        if not isinstance(self.fuzzer, BuiltinFuzzer):
            return None
        if self.fuzzer.strategy is not GeneratorStrategy.MUTATION:
            return None
        return MutationConfig(
            deterministic_stage_enabled=self.fuzzer.deterministic,
            havoc_stacking_max=self.fuzzer.havoc_stacking_max,
            seed_corpus=self.seed_corpus(),
        )

    def key(self) -> RSA.RsaKey:
        if self.key_file is None:
            return RSA.default_key()
        return RSA.load_key(self.key_file)

    def checked_key(self, where: str = "campaign") -> RSA.RsaKey:
        """Signing key of the mock subjects, whose modulus must match the oracle.

        Raises
        ------
        ConfigError
            If the key cannot be loaded or its modulus length differs from
            ``oracle.mod_len``.
        """
        culprit = f"{where}.key_file" if self.key_file is not None else f"{where}.oracle.mod_len"
        try:
            key = self.key()
        except (OSError, RSA.KeyFormatError) as exc:
            raise ConfigError(str(exc), f"{where}.key_file") from exc
        if key.mod_len != self.oracle.mod_len:
            raise ConfigError(
                f"the key modulus has {key.mod_len} bytes, the oracle expects "
                f"{self.oracle.mod_len}",
                culprit,
            )
        return key

    def build_subject(self) -> Union[SUB.MockSubject, SUB.ExternalSubject]:
        if isinstance(self.subject, ExternalSubjectSpec):
            return SUB.ExternalSubject(self.subject.executable, timeout=self.subject.timeout)
        key = self.checked_key(self.campaign_id)
        return SUB.MockSubject(
            self.subject.policy, key, self.oracle, self.subject.crash_trigger
        )


def _take(
    table: Dict[str, Any],
    key: str,
    types: Union[type, Tuple[type, ...]],
    where: str,
    default: Any = _REQUIRED,
) -> Any:
    if key not in table:
        if default is _REQUIRED:
            raise ConfigError("missing required field", f"{where}.{key}")
        return default
    value = table[key]
    allowed = types if isinstance(types, tuple) else (types,)
    # booleans pass isinstance checks for int
    if isinstance(value, bool) and bool not in allowed:
        raise ConfigError(f"expected {_type_names(types)}, got a boolean", f"{where}.{key}")
    if not isinstance(value, types):
        raise ConfigError(
            f"expected {_type_names(types)}, got {type(value).__name__}", f"{where}.{key}"
        )
    return value


def _type_names(types: Union[type, Tuple[type, ...]]) -> str:
    if isinstance(types, tuple):
        return " or ".join(tt.__name__ for tt in types)
    return types.__name__


def _reject_unknown(table: Dict[str, Any], allowed: set, where: str) -> None:
    for key in table:
        if key not in allowed:
            raise ConfigError("unknown key", f"{where}.{key}" if where else key)


def _resolve(path: Union[str, Path], base_dir: Path) -> Path:
    path = Path(path).expanduser()
    return path if path.is_absolute() else base_dir / path


def _resolve_executable(name: str, base_dir: Path) -> Path:
    # bare names are looked up on PATH when the campaign starts
    if os.sep not in name and "/" not in name:
        return Path(name)
    return _resolve(name, base_dir)


def _parse_fuzzer(value: Any, where: str, base_dir: Path) -> FuzzerSpec:
    if isinstance(value, str):
        value = {"strategy": value}
    if not isinstance(value, dict):
        raise ConfigError("expected a strategy name or a table", where)
    _reject_unknown(value, FUZZER_KEYS, where)

    if "executable" in value:
        if "strategy" in value:
            raise ConfigError("strategy and executable are exclusive", where)
        args = _take(value, "args", (list, str), where, [])
        if isinstance(args, str):
            args = shlex.split(args)
        elif not all(isinstance(arg, str) for arg in args):
            raise ConfigError("expected a list of strings", f"{where}.args")
        return ExternalFuzzer(
            _resolve_executable(_take(value, "executable", str, where), base_dir),
            tuple(args),
        )

    for key in ("executable", "args"):
        if key in value:
            raise ConfigError("only valid for external fuzzers", f"{where}.{key}")
    try:
        strategy = GeneratorStrategy.from_name(_take(value, "strategy", str, where))
    except ValueError as exc:
        raise ConfigError(str(exc), f"{where}.strategy") from exc

    seeds = _take(value, "seeds", list, where, [])
    try:
        seed_bytes = tuple(bytes.fromhex(seed) for seed in seeds)
    except (TypeError, ValueError) as exc:
        raise ConfigError("expected a list of hex strings", f"{where}.seeds") from exc

    stacking = _take(value, "havoc_stacking_max", int, where, 16)
    if stacking < 1:
        raise ConfigError(f"must be positive, got {stacking}", f"{where}.havoc_stacking_max")
    rate = float(_take(value, "mutation_rate", (int, float), where, 0.5))
    if not 0.0 <= rate <= 1.0:
        raise ConfigError(f"must be in [0, 1], got {rate}", f"{where}.mutation_rate")

    return BuiltinFuzzer(
        strategy=strategy,
        deterministic=_take(value, "deterministic", bool, where, True),
        havoc_stacking_max=stacking,
        seeds=seed_bytes,
        mutation_rate=rate,
    )


def _parse_subject(value: Any, where: str, base_dir: Path) -> SubjectSpec:
    if isinstance(value, str):
        value = {"policy": value}
    if not isinstance(value, dict):
        raise ConfigError("expected a policy name or a table", where)
    _reject_unknown(value, SUBJECT_KEYS, where)

    if "executable" in value:
        if "policy" in value or "crash_trigger" in value:
            raise ConfigError("policy and executable are exclusive", where)
        timeout = float(
            _take(value, "timeout", (int, float), where, SUB.DEFAULT_SUBJECT_TIMEOUT)
        )
        if timeout <= 0:
            raise ConfigError(f"must be positive, got {timeout}", f"{where}.timeout")
        return ExternalSubjectSpec(
            _resolve_executable(_take(value, "executable", str, where), base_dir), timeout
        )

    if "timeout" in value:
        raise ConfigError("only valid for external subjects", f"{where}.timeout")
    try:
        policy = SUB.SubjectPolicy.from_name(_take(value, "policy", str, where))
    except ValueError as exc:
        raise ConfigError(str(exc), f"{where}.policy") from exc
    trigger = _take(value, "crash_trigger", int, where, SUB.DEFAULT_CRASH_TRIGGER)
    if not 0 <= trigger <= 255:
        raise ConfigError(f"must be a byte value, got {trigger}", f"{where}.crash_trigger")
    return MockSubjectSpec(policy, trigger)


def _parse_oracle(value: Any, where: str) -> TT.OracleParams:
    if not isinstance(value, dict):
        raise ConfigError("expected a table", where)
    _reject_unknown(value, ORACLE_KEYS, where)
    try:
        return TT.OracleParams(
            mod_len=_take(value, "mod_len", int, where, TT.DEFAULT_MOD_LEN),
            min_ps_len=_take(value, "min_ps_len", int, where, TT.DEFAULT_MIN_PS_LEN),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc), where) from exc


def resolve_log_path(value: str, base_dir: Path) -> Path:
    """Resolve a relative log path against ``$FUZZEVAL_LOG_DIR`` or ``base_dir``."""
    path = Path(value).expanduser()
    if path.is_absolute():
        return path
    log_dir = os.environ.get(LOG_DIR_ENV)
    return Path(log_dir) / path if log_dir else base_dir / path


def parse_campaign(table: Any, where: str, base_dir: Path) -> Tuple[CampaignConfig, int]:
    """Parse one ``[[campaign]]`` table.

    Returns
    -------
    Tuple[CampaignConfig, int]
        The campaign and its ``repeat`` count.
    """
    if not isinstance(table, dict):
        raise ConfigError("expected a table", where)
    _reject_unknown(table, CAMPAIGN_KEYS, where)

    duration = _take(table, "duration", (int, float), where)
    max_inputs = _take(table, "max_inputs", int, where, None)
    repeat = _take(table, "repeat", int, where, 1)
    if repeat < 1:
        raise ConfigError(f"must be at least 1, got {repeat}", f"{where}.repeat")
    seed_dir = _take(table, "seed_dir", str, where, None)
    key_file = _take(table, "key_file", str, where, None)

    config = CampaignConfig(
        campaign_id=_take(table, "campaign_id", str, where),
        fuzzer=_parse_fuzzer(
            _take(table, "fuzzer", (str, dict), where), f"{where}.fuzzer", base_dir
        ),
        subject=_parse_subject(
            _take(table, "subject", (str, dict), where), f"{where}.subject", base_dir
        ),
        duration=float(duration),
        validator_port=_take(table, "validator_port", int, where),
        log_path=resolve_log_path(_take(table, "log_path", str, where), base_dir),
        rng_seed=_take(table, "rng_seed", int, where, 0),
        seed_dir=None if seed_dir is None else _resolve(seed_dir, base_dir),
        max_inputs=max_inputs,
        key_file=None if key_file is None else _resolve(key_file, base_dir),
        oracle=_parse_oracle(table.get("oracle", {}), f"{where}.oracle"),
        host=_take(table, "host", str, where, DEFAULT_HOST),
    )
    config.check(where)
    return config, repeat


def expand_repeats(config: CampaignConfig, repeat: int) -> List[CampaignConfig]:
    """Expand a campaign into ``repeat`` runs ``<id>-run<k>``.

    Run ``k`` uses ``rng_seed + k - 1``, ``validator_port + k - 1`` (an
    ephemeral port stays ephemeral) and the log ``<stem>-run<k><suffix>``.
    """
    if repeat == 1:
        return [config]
    runs = []
    for kk in range(1, repeat + 1):
        log_path = config.log_path
        runs.append(
            replace(
                config,
                campaign_id=f"{config.campaign_id}-run{kk}",
                rng_seed=config.rng_seed + kk - 1,
                validator_port=config.validator_port + kk - 1 if config.validator_port else 0,
                log_path=log_path.with_name(f"{log_path.stem}-run{kk}{log_path.suffix}"),
            )
        )
    if runs[-1].validator_port > 65535:
        raise ConfigError(
            f"repeat {repeat} pushes the port past 65535", f"{config.campaign_id}.repeat"
        )
    return runs


def parse_config(data: Dict[str, Any], base_dir: Path) -> List[CampaignConfig]:
    """Build the campaigns of an already decoded TOML document."""
    _reject_unknown(data, {"campaign"}, "")
    tables = data.get("campaign")
    if not isinstance(tables, list) or not tables:
        raise ConfigError("expected at least one [[campaign]] table", "campaign")

    configs: List[CampaignConfig] = []
    seen: Dict[str, str] = {}
    for index, table in enumerate(tables):
        where = f"campaign[{index}]"
        config, repeat = parse_campaign(table, where, base_dir)
        for run in expand_repeats(config, repeat):
            if run.campaign_id in seen:
                raise ConfigError(
                    f"duplicate campaign_id '{run.campaign_id}'"
                    f" (first in {seen[run.campaign_id]})",
                    f"{where}.campaign_id",
                )
            seen[run.campaign_id] = where
            configs.append(run)
    return configs


def load_config(path: Path) -> List[CampaignConfig]:
    """Load the campaigns of a TOML configuration file.

    Relative paths resolve against the directory of the file, log paths
    against ``$FUZZEVAL_LOG_DIR`` when it is set.

    Raises
    ------
    ConfigError
        If the file is not valid TOML or a campaign is malformed. ``field``
        names the offending entry.
    """
    path = Path(path)
    try:
        with open(path, "rb") as f_config:
            data = tomllib.load(f_config)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    configs = parse_config(data, path.resolve().parent)
    LOGGER.debug("Loaded %d campaigns from %s", len(configs), path)
    return configs
