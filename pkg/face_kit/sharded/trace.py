"""Ordered log of the simulated collective reductions."""

from dataclasses import dataclass, field
from pathlib import Path

from face_kit.errors import ShapeError

PHASES = ("max", "sumexp", "grad")


@dataclass(frozen=True)
class TraceEntry:
    phase: str
    shard_index: int
    summary: str

    def to_line(self) -> str:
        return f"{self.phase}\tshard={self.shard_index}\t{self.summary}"


@dataclass
class ReduceTrace:
    """
    One entry per (phase, shard) in the order the reductions consumed them.

    Stands in for the wire traffic of a real model-parallel classifier.
    """

    entries: list[TraceEntry] = field(default_factory=list)

    def record(self, phase: str, shard_index: int, summary: str) -> None:
        if phase not in PHASES:
            raise ValueError(f"unknown reduction phase: {phase}")
        self.entries.append(TraceEntry(phase, shard_index, summary))

    def phase_entries(self, phase: str) -> list[TraceEntry]:
        return [e for e in self.entries if e.phase == phase]

    def check(self, num_shards: int) -> None:
        """Each phase in order max, sumexp, grad with every shard once, ascending."""
        expected = [(phase, i) for phase in PHASES for i in range(num_shards)]
        actual = [(e.phase, e.shard_index) for e in self.entries]
        if actual != expected:
            raise ShapeError(f"reduce trace out of order: {actual}")

    def to_lines(self) -> list[str]:
        return [e.to_line() for e in self.entries]

    def write(self, path: str | Path) -> None:
        Path(path).write_text("".join(line + "\n" for line in self.to_lines()), encoding="utf-8")
