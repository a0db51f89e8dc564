"""Global situation identities across types, POD binding and seeded sampling."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .grid import LazyGrid, OutOfRange, Situation, SituationGrid, count
from .model import NoiseFactorModel, SitcovError, UnknownType, active, constraint_holds
from .modelio import PodSelector, RowRange

POD_LABEL_PREFIX = "PODs#"


class RowOutOfRange(SitcovError):
    def __init__(self, type_name: str, row_id: int, maximum: int):
        self.type_name = type_name
        self.row_id = row_id
        self.maximum = maximum
        super().__init__(f"row {row_id} of {type_name!r} outside 1..{maximum}")


class NTooLarge(SitcovError):
    def __init__(self, n: int, total: int):
        self.n = n
        self.total = total
        super().__init__(f"cannot draw {n} distinct ids from {total}")


class PodLabelConflict(SitcovError):
    def __init__(self, label: str):
        self.label = label
        super().__init__(f"POD label {label!r} names two different row sets")


@dataclass(frozen=True)
class GlobalIndexSpace:
    """Mixed-radix identity for one situation per type, last type fastest."""

    type_names: tuple[str, ...]
    radices: tuple[int, ...]

    @classmethod
    def from_model(cls, model: NoiseFactorModel) -> GlobalIndexSpace:
        return cls(model.type_names,
                   tuple(count(model, t).pruned_count for t in model.type_names))

    @property
    def total(self) -> int:
        return math.prod(self.radices)

    def __len__(self) -> int:
        return self.total


def global_to_tuple(space: GlobalIndexSpace, gid: int) -> tuple[int, ...]:
    if not 1 <= gid <= space.total:
        raise OutOfRange(gid, space.total, "global id")
    rest = gid - 1
    out = []
    for radix in reversed(space.radices):
        rest, digit = divmod(rest, radix)
        out.append(digit + 1)
    return tuple(reversed(out))


def tuple_to_global(space: GlobalIndexSpace, row_ids: Sequence[int]) -> int:
    if len(row_ids) != len(space.radices):
        raise ValueError(f"expected {len(space.radices)} components, got {len(row_ids)}")
    gid = 0
    for i, (r, radix) in enumerate(zip(row_ids, space.radices)):
        if not 1 <= r <= radix:
            raise OutOfRange(r, radix, f"component {i}")
        gid = gid * radix + (r - 1)
    return gid + 1


def compose(model: NoiseFactorModel, row_ids: Sequence[int],
            grids: Mapping[str, SituationGrid | LazyGrid] | None = None) -> list[Situation]:
    """Per-type situations for a tuple of row ids (grids built lazily if absent)."""
    grids = grids or {}
    return [(grids.get(t) or LazyGrid(model, t)).row(r)
            for t, r in zip(model.type_names, row_ids)]


def cross_type_consistent(model: NoiseFactorModel, situations: Iterable[Situation]) -> bool:
    """Check cross-type hard constraints against a composed situation."""
    state: dict[str, str] = {}
    for s in situations:
        state.update(s.assignments)
    for c in model.cross_type_hard_constraints():
        src = active(model.factor(c.source), state[c.source])
        tgt = active(model.factor(c.target), state[c.target])
        if not constraint_holds(c.kind, src, tgt):
            return False
    return True


@dataclass(frozen=True)
class Pod:
    label: str
    type_name: str
    row_ids: tuple[int, ...]


def resolve_rows(selector: PodSelector, size: int) -> tuple[int, ...]:
    rows = selector.rows
    if rows == "all":
        ids = range(1, size + 1)
    elif isinstance(rows, RowRange):
        ids = range(rows.lo, rows.hi + 1)
    else:
        ids = sorted(set(rows))
    for r in (ids[0], ids[-1]) if ids else ():
        if not 1 <= r <= size:
            raise RowOutOfRange(selector.type_name, r, size)
    return tuple(ids)


def bind_pods(model: NoiseFactorModel,
              grids: Mapping[str, SituationGrid | LazyGrid] | None,
              selectors: Sequence[PodSelector]) -> list[Pod]:
    """Resolve selectors to PODs, one per selector, in input order.

    Unlabelled selectors get ``PODs#k`` with k counting distinct (type, rows)
    contents in order of first appearance; a selector repeating earlier
    content reuses that POD's label. Auto labels skip any label given
    explicitly elsewhere in ``selectors``.
    """
    grids = grids or {}
    sizes: dict[str, int] = {}
    explicit = {s.label for s in selectors if s.label is not None}
    by_content: dict[tuple, str] = {}
    by_label: dict[str, tuple] = {}
    ordinal = 0
    pods = []
    for sel in selectors:
        if sel.type_name not in sizes:
            if sel.type_name not in model.type_names:
                raise UnknownType(sel.type_name)
            grid = grids.get(sel.type_name)
            sizes[sel.type_name] = len(grid) if grid is not None else count(model, sel.type_name).pruned_count
        content = (sel.type_name, resolve_rows(sel, sizes[sel.type_name]))
        if sel.label is not None:
            label = sel.label
        elif content in by_content:
            label = by_content[content]
        else:
            ordinal += 1
            while f"{POD_LABEL_PREFIX}{ordinal}" in explicit:
                ordinal += 1
            label = f"{POD_LABEL_PREFIX}{ordinal}"
        if by_label.setdefault(label, content) != content:
            raise PodLabelConflict(label)
        by_content.setdefault(content, label)
        pods.append(Pod(label, *content))
    return pods


def sample(space_or_grid, n: int, seed: int) -> list[int]:
    """Draw ``n`` distinct 1-based ids uniformly, in draw order.

    Uses ``random.Random(seed).sample(range(1, total + 1), n)`` (Mersenne
    Twister); equal (space, n, seed) give equal output.
    """
    total = space_or_grid.total if isinstance(space_or_grid, GlobalIndexSpace) else len(space_or_grid)
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > total:
        raise NTooLarge(n, total)
    return random.Random(seed).sample(range(1, total + 1), n)
