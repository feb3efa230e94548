"""Run configuration files for the batch runner.

A run file is TOML with top-level keys and one level of sections:

    scenario = "adpf"
    seed = 7

    [params]
    gamma = 0.5
    p = 0.3333333333333333
    q = 0.0

    [state]
    kind = "maximally_coherent"

    [sweep]
    variable = "delta_rho"
    start = -1.0
    stop = 1.0
    count = 401

Validation failures are raised as ConfigValidationError naming the dotted
key and, where the key appears in the file, its line.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
import sys
from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ergoswitch.channels import Hamiltonian
from ergoswitch.errors import ConfigValidationError
from ergoswitch.models import AdpfParams, MeasurementMode, Scenario

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

_TOML_POSITION = re.compile(r"line (\d+)")


class StateKind(str, Enum):
    """How the input state is specified."""

    COHERENT = "coherent"
    MAXIMALLY_COHERENT = "maximally_coherent"
    THERMAL = "thermal"
    MATRIX = "matrix"
    RANDOM = "random"


class SweepVariable(str, Enum):
    """Quantities a sweep can vary."""

    DELTA_RHO = "delta_rho"
    BETA_IN = "beta_in"
    BETA = "beta"
    PHI = "phi"
    GAMMA = "gamma"
    P = "p"
    Q = "q"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ChannelSection(_Section):
    """One channel of a custom pair: a zoo name plus its parameters."""

    name: str
    gamma: float | None = None
    p: float | None = None
    q: float | None = None
    beta: float | None = Field(default=None, ge=0.0)
    theta: float | None = None
    dim: int | None = Field(default=None, ge=2)

    def params(self) -> dict[str, float]:
        """Parameters that were given, by name."""
        values = self.model_dump(exclude={"name", "dim"}, exclude_none=True)
        return {k: float(v) for k, v in values.items()}


class ParamsSection(_Section):
    """Named-scenario parameters."""

    gamma: float | None = Field(default=None, ge=0.0, le=1.0)
    p: float | None = Field(default=None, ge=0.0, le=1.0)
    q: float | None = Field(default=None, ge=0.0, le=1.0)
    beta: float | None = Field(default=None, ge=0.0)
    dim: int | None = Field(default=None, ge=2)


class HamiltonianSection(_Section):
    """System energies; the qubit convention (0, 1) when omitted."""

    energies: list[float] | None = None


class StateSection(_Section):
    """Input state of the work medium."""

    kind: StateKind = StateKind.COHERENT
    delta_rho: float = Field(default=0.0, ge=-1.0, le=1.0)
    coherence: float = Field(default=0.0, ge=0.0)
    coherence_phase: float = 0.0
    populations: list[float] | None = None
    beta_in: float | None = Field(default=None, ge=0.0)
    matrix_real: list[list[float]] | None = None
    matrix_imag: list[list[float]] | None = None

    @model_validator(mode="after")
    def check_kind(self) -> StateSection:
        """Each state kind needs its own keys."""
        if self.kind is StateKind.THERMAL and self.beta_in is None:
            raise ValueError("state kind 'thermal' requires beta_in")
        if self.kind is StateKind.MATRIX and self.matrix_real is None:
            raise ValueError("state kind 'matrix' requires matrix_real")
        if self.populations is not None:
            if self.kind is not StateKind.COHERENT:
                raise ValueError("populations are only used by state kind 'coherent'")
            if min(self.populations) < 0.0 or abs(sum(self.populations) - 1.0) > 1e-9:
                raise ValueError("populations must be non-negative and sum to 1")
        elif self.kind is StateKind.COHERENT:
            limit = ((1 - self.delta_rho) * (1 + self.delta_rho)) ** 0.5 / 2
            if self.coherence > limit + 1e-12:
                msg = f"coherence {self.coherence} exceeds sqrt(rho_11 rho_22) = {limit}"
                raise ValueError(msg)
        return self


class ControlSection(_Section):
    """Control-qubit preparation."""

    phi: float = Field(default=0.5, ge=0.0, le=1.0)
    alpha: float = 0.0


class MeasurementSection(_Section):
    """Control-qubit measurement: a fixed basis or optimized per point."""

    mode: MeasurementMode = MeasurementMode.FIXED
    phi: float = Field(default=0.5, ge=0.0, le=1.0)
    alpha: float = 0.0


class SweepSection(_Section):
    """Inclusive linear sweep, optionally crossed with a second variable."""

    variable: SweepVariable
    start: float
    stop: float
    count: int = Field(ge=1)
    secondary: SweepVariable | None = None
    secondary_start: float | None = None
    secondary_stop: float | None = None
    secondary_count: int | None = Field(default=None, ge=1)

    @model_validator(mode="after")
    def check_secondary(self) -> SweepSection:
        """A secondary variable needs its whole range."""
        if self.secondary is None:
            return self
        missing = [
            name
            for name in ("secondary_start", "secondary_stop", "secondary_count")
            if getattr(self, name) is None
        ]
        if missing:
            raise ValueError(f"secondary sweep requires {', '.join(missing)}")
        if self.secondary == self.variable:
            raise ValueError("secondary must differ from variable")
        return self


class OutputSection(_Section):
    """Where results are written."""

    directory: str | None = None


_SCENARIO_SWEEPS: dict[Scenario, frozenset[SweepVariable]] = {
    Scenario.DEPOL_QUBIT: frozenset({SweepVariable.DELTA_RHO, SweepVariable.PHI}),
    Scenario.DEPOL_DDIM: frozenset({SweepVariable.PHI}),
    Scenario.THERMAL: frozenset(
        {SweepVariable.DELTA_RHO, SweepVariable.BETA_IN, SweepVariable.BETA, SweepVariable.PHI}
    ),
    Scenario.ADPF: frozenset(
        {
            SweepVariable.DELTA_RHO,
            SweepVariable.PHI,
            SweepVariable.GAMMA,
            SweepVariable.P,
            SweepVariable.Q,
        }
    ),
    Scenario.CUSTOM: frozenset({SweepVariable.DELTA_RHO, SweepVariable.PHI}),
}

_TWO_LEVEL = frozenset({Scenario.DEPOL_QUBIT, Scenario.THERMAL, Scenario.ADPF})


class RunConfig(BaseModel):
    """A validated run: scenario, channels, state, control, measurement and sweep."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    scenario: Scenario
    seed: int | None = None
    channel_a: ChannelSection | None = None
    channel_b: ChannelSection | None = None
    params: ParamsSection = ParamsSection()
    hamiltonian: HamiltonianSection = HamiltonianSection()
    state: StateSection = StateSection()
    control: ControlSection = ControlSection()
    measurement: MeasurementSection = MeasurementSection()
    sweep: SweepSection | None = None
    output: OutputSection = OutputSection()

    @model_validator(mode="after")
    def check_scenario(self) -> RunConfig:
        """Scenario-required keys and scenario-compatible sweeps."""
        if self.scenario is Scenario.CUSTOM and (self.channel_a is None or self.channel_b is None):
            raise ValueError("scenario 'custom' requires [channel_a] and [channel_b]")
        if self.scenario is Scenario.ADPF:
            missing = [k for k in ("gamma", "p", "q") if getattr(self.params, k) is None]
            if missing:
                raise ValueError(f"scenario 'adpf' requires params {', '.join(missing)}")
        if self.scenario is Scenario.THERMAL and self.params.beta is None:
            raise ValueError("scenario 'thermal' requires params beta")
        if self.scenario is Scenario.DEPOL_DDIM and (
            self.params.dim is None and self.hamiltonian.energies is None
        ):
            raise ValueError("scenario 'depol_ddim' requires params dim or hamiltonian energies")

        dim = self.dimension
        if self.scenario in _TWO_LEVEL and dim != 2:
            raise ValueError(f"scenario '{self.scenario.value}' is two-level, got d = {dim}")
        if self.scenario is Scenario.ADPF and self.hamiltonian.energies is not None:
            raise ValueError("scenario 'adpf' works in units of e_2 with H = diag(0, 1)")
        if self.state.populations is not None:
            if len(self.state.populations) != dim:
                raise ValueError(f"state populations must have {dim} entries")
        elif self.state.kind in (StateKind.COHERENT, StateKind.MAXIMALLY_COHERENT) and dim != 2:
            raise ValueError(f"state kind '{self.state.kind.value}' needs d = 2 or populations")
        if self.state.kind is StateKind.MATRIX and len(self.state.matrix_real or []) != dim:
            raise ValueError(f"state matrix must be {dim} x {dim}")
        if self.sweep is not None:
            allowed = _SCENARIO_SWEEPS[self.scenario]
            for variable in (self.sweep.variable, self.sweep.secondary):
                if variable is not None and variable not in allowed:
                    names = ", ".join(sorted(v.value for v in allowed))
                    raise ValueError(
                        f"sweep variable '{variable.value}' not supported for scenario "
                        f"'{self.scenario.value}' (supported: {names})"
                    )
            if self.sweep.secondary is not None and self.scenario is not Scenario.THERMAL:
                raise ValueError("a secondary sweep is only supported for scenario 'thermal'")
            imbalance_state = self.state.populations is None and self.state.kind in (
                StateKind.COHERENT,
                StateKind.MAXIMALLY_COHERENT,
            )
            if SweepVariable.DELTA_RHO in (self.sweep.variable, self.sweep.secondary) and not (
                imbalance_state
            ):
                raise ValueError("a delta_rho sweep needs a coherent or maximally_coherent state")
        return self

    @property
    def dimension(self) -> int:
        """System dimension implied by the configuration."""
        if self.hamiltonian.energies is not None:
            return len(self.hamiltonian.energies)
        if self.scenario is Scenario.DEPOL_DDIM and self.params.dim is not None:
            return self.params.dim
        if self.scenario is Scenario.CUSTOM and self.channel_a and self.channel_a.dim:
            return self.channel_a.dim
        return 2

    def build_hamiltonian(self) -> Hamiltonian:
        """Hamiltonian from [hamiltonian] energies, else equally spaced 0, 1, ..., d-1."""
        if self.hamiltonian.energies is not None:
            return Hamiltonian.diagonal(self.hamiltonian.energies)
        return Hamiltonian.diagonal([float(k) for k in range(self.dimension)])

    def adpf_params(self) -> AdpfParams:
        """The damping / phase-flip parameters of an adpf run."""
        return AdpfParams(
            gamma=self.params.gamma or 0.0, p=self.params.p or 0.0, q=self.params.q or 0.0
        )

    def echo(self) -> dict[str, Any]:
        """Plain-JSON form; validating it reproduces an equal RunConfig."""
        return self.model_dump(mode="json", exclude_none=True)

    def digest(self) -> str:
        """First 12 hex characters of the SHA-256 of the sorted echo."""
        return hashlib.sha256(json.dumps(self.echo(), sort_keys=True).encode()).hexdigest()[:12]

    def with_value(self, variable: SweepVariable, value: float) -> RunConfig:
        """Copy of this configuration with one sweep variable set.

        Raises:
            ConfigValidationError: If the value is out of range for the variable.
        """
        data = self.echo()
        section, key = _SWEEP_TARGETS[variable]
        data.setdefault(section, {})[key] = value
        if variable is SweepVariable.BETA_IN:
            data["state"]["kind"] = StateKind.THERMAL.value
        return validate_run_config(data)


_SWEEP_TARGETS: dict[SweepVariable, tuple[str, str]] = {
    SweepVariable.DELTA_RHO: ("state", "delta_rho"),
    SweepVariable.BETA_IN: ("state", "beta_in"),
    SweepVariable.BETA: ("params", "beta"),
    SweepVariable.PHI: ("control", "phi"),
    SweepVariable.GAMMA: ("params", "gamma"),
    SweepVariable.P: ("params", "p"),
    SweepVariable.Q: ("params", "q"),
}


def _locate(text: str, loc: tuple[str | int, ...]) -> int | None:
    """1-based line of a dotted key in TOML text, falling back to its section header."""
    if not loc:
        return None
    keys = [str(part) for part in loc]
    section = keys[0] if len(keys) > 1 else None
    key = keys[1] if len(keys) > 1 else keys[0]
    current: str | None = None
    header_line: int | None = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        header = re.match(r"^\[([^\[\]]+)\]", line)
        if header:
            current = header.group(1).strip()
            if current == section:
                header_line = number
            elif section is None and current == key:
                return number
            continue
        if current == section and re.match(rf"^{re.escape(key)}\s*=", line):
            return number
    return header_line


def _first_error(error: ValidationError) -> tuple[tuple[str | int, ...], str]:
    first = error.errors()[0]
    return tuple(first["loc"]), str(first["msg"])


def validate_run_config(data: dict[str, Any], text: str | None = None) -> RunConfig:
    """Validate parsed configuration data.

    Args:
        data: Parsed TOML (or a config echo).
        text: Original file text, used to attach line numbers.

    Raises:
        ConfigValidationError: On the first validation failure.
    """
    for name, value in data.items():
        if isinstance(value, dict) and any(isinstance(v, dict) for v in value.values()):
            raise ConfigValidationError(
                "nested tables are not supported",
                key=name,
                line=_locate(text, (name, "")) if text else None,
            )
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        loc, msg = _first_error(e)
        key = ".".join(str(part) for part in loc) or None
        line = _locate(text, loc) if text else None
        extra = len(e.errors()) - 1
        if extra:
            msg = f"{msg} (and {extra} more error{'s' if extra > 1 else ''})"
        raise ConfigValidationError(msg, key=key, line=line) from e


def load_run_config(path: Path) -> RunConfig:
    """Read and validate a TOML run file.

    Raises:
        ConfigValidationError: If the file cannot be read, is not valid TOML,
            or fails validation.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigValidationError(f"cannot read {path}: {e.strerror or e}") from e
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        match = _TOML_POSITION.search(str(e))
        line = int(match.group(1)) if match else None
        raise ConfigValidationError(f"invalid TOML: {e}", line=line) from e
    config = validate_run_config(data, text)
    logger.debug("Loaded run config %s (digest %s)", path, config.digest())
    return config


__all__ = [
    "StateKind",
    "SweepVariable",
    "ChannelSection",
    "ParamsSection",
    "HamiltonianSection",
    "StateSection",
    "ControlSection",
    "MeasurementSection",
    "SweepSection",
    "OutputSection",
    "RunConfig",
    "validate_run_config",
    "load_run_config",
]
