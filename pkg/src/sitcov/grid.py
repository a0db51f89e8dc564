"""Situation coverage grids: pruned Cartesian expansion of one factor type.

Rows are ordered by mixed-radix key over state ordinals, factors nesting
left to right with the rightmost factor varying fastest, and numbered 1..n
after pruning. Only hard constraints whose two ends sit in the expanded type
prune rows; notes and cross-type constraints are inert here.

Three routes produce the same rows:

* :func:`expand` -- depth-first search that rejects a prefix as soon as a
  constraint between two assigned factors fails (optionally fanned out over
  worker processes, merged in order);
* :func:`row_by_id` on a :class:`LazyGrid` -- skip-counting using
  :meth:`_CompiledType.completions`, no materialisation;
* :func:`oracle_expand` -- naive product-then-filter, for tests.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

from .model import (Factor, NoiseFactorModel, SitcovError, active,
                    constraint_holds)

ORACLE_LIMIT = 10**6


class OutOfRange(SitcovError, IndexError):
    def __init__(self, value: int, maximum: int, what: str = "row id"):
        self.value = value
        self.maximum = maximum
        super().__init__(f"{what} {value} outside 1..{maximum}")


class InstanceTooLarge(SitcovError):
    def __init__(self, size: int, limit: int = ORACLE_LIMIT):
        self.size = size
        self.limit = limit
        super().__init__(f"{size} unpruned combinations exceed oracle limit {limit}")


@dataclass(frozen=True)
class Situation:
    assignments: tuple[tuple[str, str], ...]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for _, label in self.assignments)

    def state_of(self, factor_id: str) -> str:
        for fid, label in self.assignments:
            if fid == factor_id:
                return label
        raise KeyError(factor_id)


@dataclass(frozen=True)
class SituationGrid:
    type_name: str
    factors: tuple[Factor, ...]
    rows: tuple[Situation, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def row(self, row_id: int) -> Situation:
        if not 1 <= row_id <= len(self.rows):
            raise OutOfRange(row_id, len(self.rows))
        return self.rows[row_id - 1]


@dataclass(frozen=True)
class GridStats:
    type_name: str
    unpruned_count: int
    pruned_count: int

    @property
    def pruned_away(self) -> int:
        return self.unpruned_count - self.pruned_count


class _CompiledType:
    """Index-level view of one factor type and its same-type hard constraints."""

    def __init__(self, model: NoiseFactorModel, type_name: str):
        ftype = model.get_type(type_name)
        self.type_name = ftype.name
        self.factors = ftype.factors
        self.radices = tuple(f.radix for f in self.factors)
        self.baselines = tuple(f.baseline_index for f in self.factors)
        pos = {f.id: i for i, f in enumerate(self.factors)}
        n = len(self.factors)
        self.checks_at: list[list[tuple[str, int, int]]] = [[] for _ in range(n)]
        for c in model.hard_constraints_within(type_name):
            s, t = pos[c.source], pos[c.target]
            self.checks_at[max(s, t)].append((c.kind, s, t))
        # needed[p]: positions < p that share a constraint with some position >= p
        self.needed: list[tuple[int, ...]] = []
        for p in range(n + 1):
            keep = set()
            for q in range(p, n):
                for _, s, t in self.checks_at[q]:
                    keep.update(x for x in (s, t) if x < p)
            self.needed.append(tuple(sorted(keep)))

    @property
    def unpruned(self) -> int:
        return math.prod(self.radices)

    def _ok_at(self, p: int, bits) -> bool:
        return all(constraint_holds(kind, bits[s], bits[t]) for kind, s, t in self.checks_at[p])

    def ordinals_to_situation(self, ordinals: Sequence[int]) -> Situation:
        return Situation(tuple((f.id, f.states[o].label) for f, o in zip(self.factors, ordinals)))

    def iter_ordinals(self, prefix: tuple[int, ...] = ()) -> Iterator[tuple[int, ...]]:
        n = len(self.radices)
        bits = [o != b for o, b in zip(prefix, self.baselines)] + [False] * (n - len(prefix))
        for p in range(len(prefix)):
            if not self._ok_at(p, bits):
                return
        current = list(prefix) + [0] * (n - len(prefix))

        def walk(p):
            if p == n:
                yield tuple(current)
                return
            base = self.baselines[p]
            for o in range(self.radices[p]):
                current[p] = o
                bits[p] = o != base
                if self._ok_at(p, bits):
                    yield from walk(p + 1)

        yield from walk(len(prefix))

    def completions(self, prefix_bits: Sequence[bool]) -> int:
        """Number of valid rows extending a prefix, given only its activity bits.

        Dynamic programme over positions; the state carries the activity of
        earlier factors that still have a constraint partner to come.
        """
        n = len(self.radices)
        p0 = len(prefix_bits)
        bits = list(prefix_bits) + [False] * (n - p0)
        for p in range(p0):
            if not self._ok_at(p, bits):
                return 0
        frontier = {tuple(bits[q] for q in self.needed[p0]): 1}
        for p in range(p0, n):
            nxt: dict[tuple, int] = defaultdict(int)
            for key, weight in frontier.items():
                work = dict(zip(self.needed[p], key))
                for is_active, mult in ((False, 1), (True, self.radices[p] - 1)):
                    if mult == 0:
                        continue
                    work[p] = is_active
                    if not all(constraint_holds(kind, work[s], work[t])
                               for kind, s, t in self.checks_at[p]):
                        continue
                    nxt[tuple(work[q] for q in self.needed[p + 1])] += weight * mult
            frontier = nxt
        return sum(frontier.values())

    def ordinals_for_row(self, row_id: int) -> tuple[int, ...]:
        total = self.completions(())
        if not 1 <= row_id <= total:
            raise OutOfRange(row_id, total)
        k = row_id - 1
        chosen: list[int] = []
        bits: list[bool] = []
        for p, radix in enumerate(self.radices):
            for o in range(radix):
                here = self.completions(bits + [o != self.baselines[p]])
                if k < here:
                    chosen.append(o)
                    bits.append(o != self.baselines[p])
                    break
                k -= here
        return tuple(chosen)


def _expand_branch(compiled: _CompiledType, first: int) -> list[tuple[int, ...]]:
    return list(compiled.iter_ordinals((first,)))


def expand(model: NoiseFactorModel, type_name: str, workers: int = 1) -> SituationGrid:
    """Enumerate the valid situations of one factor type in grid order.

    With ``workers > 1`` the branches under each state of the leading factor
    are expanded in separate processes and concatenated in state order, so
    the result is identical to the sequential one.
    """
    compiled = _CompiledType(model, type_name)
    if workers > 1 and compiled.radices:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            branches = pool.map(_expand_branch, itertools.repeat(compiled),
                                range(compiled.radices[0]))
            ordinals = [row for branch in branches for row in branch]
    else:
        ordinals = compiled.iter_ordinals()
    rows = tuple(compiled.ordinals_to_situation(o) for o in ordinals)
    return SituationGrid(compiled.type_name, compiled.factors, rows)


def count(model: NoiseFactorModel, type_name: str) -> GridStats:
    compiled = _CompiledType(model, type_name)
    return GridStats(compiled.type_name, compiled.unpruned, compiled.completions(()))


def oracle_expand(model: NoiseFactorModel, type_name: str) -> SituationGrid:
    """Brute force: every combination in nested order, kept if all same-type hard constraints hold."""
    ftype = model.get_type(type_name)
    factors = ftype.factors
    size = math.prod(len(f.states) for f in factors)
    if size > ORACLE_LIMIT:
        raise InstanceTooLarge(size)
    constraints = model.hard_constraints_within(type_name)
    by_id = {f.id: f for f in factors}
    rows = []
    for labels in itertools.product(*(f.labels for f in factors)):
        state = dict(zip(by_id, labels))
        if all(constraint_holds(c.kind,
                                active(by_id[c.source], state[c.source]),
                                active(by_id[c.target], state[c.target]))
               for c in constraints):
            rows.append(Situation(tuple(state.items())))
    return SituationGrid(ftype.name, factors, tuple(rows))


class LazyGrid:
    """Indexed, streaming access to a grid without building it."""

    def __init__(self, model: NoiseFactorModel, type_name: str):
        self._compiled = _CompiledType(model, type_name)
        self.type_name = self._compiled.type_name
        self.factors = self._compiled.factors
        self._size = self._compiled.completions(())

    def __len__(self) -> int:
        return self._size

    def __iter__(self) -> Iterator[Situation]:
        for o in self._compiled.iter_ordinals():
            yield self._compiled.ordinals_to_situation(o)

    def row(self, row_id: int) -> Situation:
        return self._compiled.ordinals_to_situation(self._compiled.ordinals_for_row(row_id))


def row_by_id(grid: SituationGrid | LazyGrid, row_id: int) -> Situation:
    return grid.row(row_id)


def mixed_radix_key(factors: Sequence[Factor], situation: Situation) -> int:
    key = 0
    for f, (_, label) in zip(factors, situation.assignments):
        key = key * f.radix + f.index_of(label)
    return key


def write_csv(factors: Sequence[Factor], numbered_rows) -> str:
    """Grid CSV: ``ID,<factor names>`` header, state labels verbatim, LF endings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["ID", *(f.name for f in factors)])
    for row_id, situation in numbered_rows:
        writer.writerow([row_id, *situation.labels])
    return buf.getvalue()


def grid_to_csv(grid: SituationGrid) -> bytes:
    return write_csv(grid.factors, enumerate(grid.rows, start=1)).encode("utf-8")


def grid_to_records(grid: SituationGrid) -> list[dict]:
    return [{"id": i, "assignments": dict(s.assignments)}
            for i, s in enumerate(grid.rows, start=1)]
