"""Pydantic models for ergoswitch parameters and reports."""

from __future__ import annotations

import math
from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

TWO_PI = 2.0 * math.pi

# Ledger closure dW = dW_i + dW_c
LEDGER_TOL = 1e-10


def normalize_phase(value: float) -> float:
    """Map a phase into [0, 2*pi)."""
    wrapped = math.fmod(value, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # fmod can land exactly on 2*pi after the shift for tiny negative inputs
    if wrapped >= TWO_PI:
        wrapped = 0.0
    return wrapped


class Scenario(str, Enum):
    """Named computation scenarios understood by the batch runner."""

    DEPOL_QUBIT = "depol_qubit"
    DEPOL_DDIM = "depol_ddim"
    THERMAL = "thermal"
    ADPF = "adpf"
    CUSTOM = "custom"

    @property
    def has_oracle(self) -> bool:
        """Whether a closed-form oracle exists for this scenario."""
        return self is not Scenario.CUSTOM


class MeasurementMode(str, Enum):
    """How the control-qubit measurement basis is chosen."""

    FIXED = "fixed"
    OPTIMIZE = "optimize"


class ZeroGainStatus(str, Enum):
    """Outcome of the zero-gain condition check."""

    ZERO = "zero"
    NONZERO = "nonzero"
    INDETERMINATE = "indeterminate"


class ControlSpec(BaseModel):
    """Control-qubit preparation |phi, alpha> = sqrt(phi)|0> + e^{i alpha} sqrt(1-phi)|1>."""

    model_config = ConfigDict(frozen=True)

    phi: float = Field(ge=0.0, le=1.0)
    alpha: float = 0.0

    @field_validator("alpha")
    @classmethod
    def wrap_alpha(cls, v: float) -> float:
        """Normalize the phase into [0, 2*pi)."""
        return normalize_phase(v)


class MeasureSpec(BaseModel):
    """Control-qubit measurement basis {|phi', alpha'>_+, |phi', alpha'>_-}."""

    model_config = ConfigDict(frozen=True)

    phi_m: float = Field(ge=0.0, le=1.0)
    alpha_m: float = 0.0

    @field_validator("alpha_m")
    @classmethod
    def wrap_alpha(cls, v: float) -> float:
        """Normalize the phase into [0, 2*pi)."""
        return normalize_phase(v)


class DaemonicReport(BaseModel):
    """Daemonic ergotropy, classical ergotropy and the gain, each split in i/c parts.

    Energies are absolute (units of the Hamiltonian); for the qubit convention
    H = diag(0, 1) they are in units of the excited-state energy.
    """

    model_config = ConfigDict(frozen=True)

    measure: MeasureSpec
    p_plus: float
    p_minus: float
    WD: float
    WD_i: float
    WD_c: float
    W_class: float
    W_class_i: float
    W_class_c: float
    dW: float
    dW_i: float
    dW_c: float

    @property
    def ledger_residual(self) -> float:
        """|dW - dW_i - dW_c|."""
        return abs(self.dW - self.dW_i - self.dW_c)


class AdpfParams(BaseModel):
    """Generalized amplitude damping (gamma, p) paired with a phase flip (q)."""

    model_config = ConfigDict(frozen=True)

    gamma: float = Field(ge=0.0, le=1.0)
    p: float = Field(ge=0.0, le=1.0)
    q: float = Field(ge=0.0, le=1.0)


class GainWindow(BaseModel):
    """Initial population imbalances [-x_minus, x_plus] without incoherent gain.

    A degenerate window means the incoherent daemonic gain vanishes for
    every initial imbalance.
    """

    model_config = ConfigDict(frozen=True)

    x_minus: float = Field(ge=0.0, le=1.0)
    x_plus: float = Field(ge=0.0, le=1.0)
    degenerate: bool = False

    def contains(self, delta_rho: float, tol: float = 0.0) -> bool:
        """Whether an initial imbalance lies inside the zero-gain window."""
        if self.degenerate:
            return True
        return -self.x_minus - tol <= delta_rho <= self.x_plus + tol


class SweepRecord(BaseModel):
    """One point of a population-imbalance sweep."""

    model_config = ConfigDict(frozen=True)

    delta_rho: float
    dW: float
    dW_i: float
    dW_c: float

    @model_validator(mode="after")
    def check_ledger(self) -> SweepRecord:
        """Reject records whose gain components do not add up."""
        if abs(self.dW - self.dW_i - self.dW_c) > LEDGER_TOL:
            msg = f"dW={self.dW!r} != dW_i + dW_c ({self.dW_i!r} + {self.dW_c!r})"
            raise ValueError(msg)
        return self


class RunStatus(str, Enum):
    """Outcome of a batch run."""

    OK = "ok"
    RESIDUAL_EXCEEDED = "residual_exceeded"


class RunRecord(BaseModel):
    """One evaluated point of a run: the full daemonic report plus oracle and sweep columns.

    delta_rho is the energy-basis imbalance of the input for two-level systems
    and None otherwise. residual_oracle is None when the scenario has no oracle.
    Sweep values and scenario quantities go into extras.
    """

    model_config = ConfigDict(frozen=True)

    delta_rho: float | None
    p_plus: float
    p_minus: float
    W_class: float
    WD: float
    dW: float
    dW_i: float
    dW_c: float
    residual_oracle: float | None
    phi_opt: float
    alpha_opt: float
    WD_i: float
    WD_c: float
    W_class_i: float
    W_class_c: float
    extras: dict[str, float | bool] = Field(default_factory=dict)

    @property
    def ledger_residual(self) -> float:
        """|dW - dW_i - dW_c|."""
        return abs(self.dW - self.dW_i - self.dW_c)


class ResultEnvelope(BaseModel):
    """Everything a run produced, with the configuration that produced it."""

    model_config = ConfigDict(frozen=True)

    tool: str = "ergoswitch"
    version: str
    config: dict[str, Any]
    config_digest: str
    seed: int
    records: list[RunRecord]
    max_residual: float | None
    residual_limit: float
    status: RunStatus

    @property
    def exit_code(self) -> int:
        """0 on success, 3 when an oracle residual exceeds the limit."""
        return 0 if self.status is RunStatus.OK else 3


class CheckResult(BaseModel):
    """One invariant checked over seeded random draws."""

    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    trials: int = Field(ge=0)
    max_residual: float
    tolerance: float


class VerificationReport(BaseModel):
    """Outcome of a verification suite."""

    model_config = ConfigDict(frozen=True)

    tool: str = "ergoswitch"
    version: str
    suite: str
    seed: int
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        """Whether every check passed."""
        return all(check.passed for check in self.checks)


__all__ = [
    "TWO_PI",
    "LEDGER_TOL",
    "normalize_phase",
    "Scenario",
    "MeasurementMode",
    "ZeroGainStatus",
    "ControlSpec",
    "MeasureSpec",
    "DaemonicReport",
    "AdpfParams",
    "GainWindow",
    "SweepRecord",
    "RunStatus",
    "RunRecord",
    "ResultEnvelope",
    "CheckResult",
    "VerificationReport",
]
