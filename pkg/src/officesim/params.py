"""Model parameters and domain enums."""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields


class ParamError(ValueError):
    """Raised for invalid model parameter combinations."""


class Stereotype(enum.IntEnum):
    EXTROVERT = 0
    INTROVERT = 1

    @property
    def short(self) -> str:
        return "e" if self is Stereotype.EXTROVERT else "i"


@dataclass(frozen=True)
class ModelParams:
    """All scalar knobs of one simulated workday.

    ``motivation_cap`` defaults to ``horizon`` (a worker talking every single
    minute of the day cannot exceed it), so leaving it unset keeps the upper
    clamp out of reach for ordinary configurations.
    """

    n_agents: int
    n_extroverts: int
    horizon: int = 480
    max_duration: int = 20
    contact_rate: float = 2.0
    tau_extrovert: float = 1.0
    tau_introvert: float = 5.0
    motivation_cap: int | None = None

    def __post_init__(self) -> None:
        if self.motivation_cap is None:
            object.__setattr__(self, "motivation_cap", self.horizon)
        if self.n_agents < 1:
            raise ParamError(f"n_agents must be >= 1, got {self.n_agents}")
        if not 0 <= self.n_extroverts <= self.n_agents:
            raise ParamError(
                f"n_extroverts must lie in [0, {self.n_agents}], got {self.n_extroverts}"
            )
        if self.horizon < 1:
            raise ParamError(f"horizon must be >= 1, got {self.horizon}")
        if self.max_duration < 1:
            raise ParamError(f"max_duration must be >= 1, got {self.max_duration}")
        if self.contact_rate < 0:
            raise ParamError(f"contact_rate must be >= 0, got {self.contact_rate}")
        if self.tau_extrovert <= 0 or self.tau_introvert <= 0:
            raise ParamError("tau_extrovert and tau_introvert must be > 0")
        if self.tau_introvert < self.tau_extrovert:
            raise ParamError(
                "tau_introvert must be >= tau_extrovert "
                f"(got {self.tau_introvert} < {self.tau_extrovert})"
            )
        if self.motivation_cap < 1:
            raise ParamError(f"motivation_cap must be >= 1, got {self.motivation_cap}")

    @property
    def n_introverts(self) -> int:
        return self.n_agents - self.n_extroverts

    @property
    def eta(self) -> float:
        """Realized extrovert fraction."""
        return self.n_extroverts / self.n_agents

    def tau(self, stereotype: Stereotype) -> float:
        return self.tau_extrovert if stereotype is Stereotype.EXTROVERT else self.tau_introvert

    def replace(self, **changes) -> "ModelParams":
        kwargs = {f.name: getattr(self, f.name) for f in fields(self)}
        kwargs.update(changes)
        return ModelParams(**kwargs)
