"""Balanced design container: sequences x participants x periods x measurements."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParameterError
from .model import Sequence
from .sequences import RandomizationScheme, enumerate_sequences


@dataclass(frozen=True)
class BalancedDesign:
    """A balanced series of n-of-1 trials.

    Every sequence gets J participants, every participant runs the same K
    periods, every period contains L measurements; total measurements are
    I*J*K*L.
    """

    sequences: tuple[Sequence, ...]
    n_participants_per_sequence: int
    n_per_period: int
    scheme: RandomizationScheme | None = None

    def __post_init__(self):
        seqs = tuple(
            s if isinstance(s, Sequence) else Sequence(tuple(s)) for s in self.sequences
        )
        if not seqs:
            raise ParameterError("design needs at least one sequence", field="sequences")
        if len({s.n_periods for s in seqs}) != 1:
            raise ParameterError(
                "all sequences in a balanced design share the period count K",
                field="sequences",
            )
        if len(set(seqs)) != len(seqs):
            raise ParameterError("duplicate sequences in design", field="sequences")
        object.__setattr__(self, "sequences", seqs)
        if self.n_participants_per_sequence < 1:
            raise ParameterError(
                f"J must be >= 1, got {self.n_participants_per_sequence}", field="J"
            )
        if self.n_per_period < 1:
            raise ParameterError(f"L must be >= 1, got {self.n_per_period}", field="L")

    @classmethod
    def from_scheme(
        cls,
        scheme: RandomizationScheme,
        n_periods: int,
        n_participants_per_sequence: int,
        n_per_period: int,
    ) -> "BalancedDesign":
        return cls(
            sequences=tuple(enumerate_sequences(scheme, n_periods)),
            n_participants_per_sequence=n_participants_per_sequence,
            n_per_period=n_per_period,
            scheme=scheme,
        )

    @property
    def n_sequences(self) -> int:
        return len(self.sequences)

    @property
    def n_periods(self) -> int:
        return self.sequences[0].n_periods

    @property
    def n_participants(self) -> int:
        return self.n_sequences * self.n_participants_per_sequence

    @property
    def measurements_per_participant(self) -> int:
        return self.n_periods * self.n_per_period

    @property
    def total_measurements(self) -> int:
        return self.n_participants * self.measurements_per_participant

    def ijkl(self) -> tuple[int, int, int, int]:
        return (
            self.n_sequences,
            self.n_participants_per_sequence,
            self.n_periods,
            self.n_per_period,
        )
