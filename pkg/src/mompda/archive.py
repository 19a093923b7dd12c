"""External archive of mutually non-dominated feasible solutions."""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import ObjectiveVector, dominates
from .simulator import Evaluation, SolutionMatrix


@dataclass(frozen=True)
class ArchiveEntry:
    solution: SolutionMatrix
    objectives: ObjectiveVector


@dataclass
class ParetoArchive:
    entries: list[ArchiveEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def update(self, solution: SolutionMatrix, evaluation: Evaluation) -> bool:
        """Insert if feasible and not dominated; returns whether it was added.

        Entries dominated by the newcomer are dropped. A newcomer whose
        objective vector is already present is rejected, so the first
        representative is kept.
        """
        if not evaluation.feasible:
            return False
        obj = evaluation.objectives
        for e in self.entries:
            if e.objectives == obj or dominates(e.objectives, obj):
                return False
        self.entries = [e for e in self.entries if not dominates(obj, e.objectives)]
        self.entries.append(ArchiveEntry(solution, obj))
        return True

    def front(self) -> list[ObjectiveVector]:
        """Objective vectors sorted by robot count."""
        return sorted((e.objectives for e in self.entries), key=lambda o: (o.robot_count, o.makespan))

    def is_nondominated(self) -> bool:
        objs = [e.objectives for e in self.entries]
        return not any(dominates(a, b) for a in objs for b in objs)


def archive_update(archive: ParetoArchive, solution: SolutionMatrix, evaluation: Evaluation) -> ParetoArchive:
    archive.update(solution, evaluation)
    return archive
