"""Noise-factor taxonomy types, structural validation and channel filtering.

A model is organised as Type -> Factor -> State. Each factor has exactly one
baseline ("normal") state; every other state counts as *active*. Constraints
between factors are expressed over activity:

    requires  active(source) => active(target)
    excludes  not (active(source) and active(target))
    note      documentation only, never prunes anything
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

CHANNELS = ("FR", "I_RGB", "P_XY", "DF")
IMAGE_CHANNELS = frozenset({"I_RGB", "P_XY"})

CONSTRAINT_KINDS = ("requires", "excludes", "note")
HARD_KINDS = frozenset({"requires", "excludes"})


class SitcovError(Exception):
    """Base class for domain errors raised by this package."""


class UnknownState(SitcovError, KeyError):
    def __init__(self, label: str, factor_id: str | None = None):
        self.label = label
        self.factor_id = factor_id
        where = f" of factor {factor_id!r}" if factor_id else ""
        super().__init__(f"unknown state {label!r}{where}")

    def __str__(self) -> str:
        return self.args[0]


class UnknownType(SitcovError, KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown factor type {name!r}")

    def __str__(self) -> str:
        return self.args[0]


class MissingChannels(SitcovError):
    def __init__(self, factor_id: str):
        self.factor_id = factor_id
        super().__init__(f"factor {factor_id!r} has no channel tags")


@dataclass(frozen=True)
class StateDef:
    label: str
    baseline: bool = False


@dataclass(frozen=True)
class Factor:
    id: str
    name: str
    states: tuple[StateDef, ...]
    channels: frozenset[str] | None = None

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if self.channels is not None:
            object.__setattr__(self, "channels", frozenset(self.channels))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.states)

    @property
    def radix(self) -> int:
        return len(self.states)

    @property
    def baseline_index(self) -> int:
        """Position of the (first) baseline state; 0 if none is marked."""
        for i, s in enumerate(self.states):
            if s.baseline:
                return i
        return 0

    def index_of(self, label: str) -> int:
        for i, s in enumerate(self.states):
            if s.label == label:
                return i
        raise UnknownState(label, self.id)


@dataclass(frozen=True)
class FactorType:
    name: str
    factors: tuple[Factor, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def factor_ids(self) -> tuple[str, ...]:
        return tuple(f.id for f in self.factors)


@dataclass(frozen=True)
class Constraint:
    kind: str
    source: str
    target: str
    description: str = ""

    @property
    def hard(self) -> bool:
        return self.kind in HARD_KINDS


@dataclass(frozen=True)
class NoiseFactorModel:
    name: str
    version: str
    types: tuple[FactorType, ...]
    constraints: tuple[Constraint, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(self.types))
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @property
    def type_names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.types)

    def iter_factors(self) -> Iterator[tuple[FactorType, Factor]]:
        for ftype in self.types:
            for factor in ftype.factors:
                yield ftype, factor

    def get_type(self, name: str) -> FactorType:
        for ftype in self.types:
            if ftype.name == name:
                return ftype
        raise UnknownType(name)

    def factor(self, factor_id: str) -> Factor:
        for _, factor in self.iter_factors():
            if factor.id == factor_id:
                return factor
        raise KeyError(factor_id)

    def type_of(self, factor_id: str) -> str:
        for ftype, factor in self.iter_factors():
            if factor.id == factor_id:
                return ftype.name
        raise KeyError(factor_id)

    def hard_constraints_within(self, type_name: str) -> list[Constraint]:
        """Hard constraints whose source and target both belong to ``type_name``."""
        ids = set(self.get_type(type_name).factor_ids)
        return [c for c in self.constraints
                if c.hard and c.source in ids and c.target in ids]

    def cross_type_hard_constraints(self) -> list[Constraint]:
        owner = {f.id: t.name for t, f in self.iter_factors()}
        return [c for c in self.constraints
                if c.hard and c.source in owner and c.target in owner
                and owner[c.source] != owner[c.target]]


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} {self.path} {self.message}"


def active(factor: Factor, state_label: str) -> bool:
    """True iff ``state_label`` names a non-baseline state of ``factor``."""
    for s in factor.states:
        if s.label == state_label:
            return not s.baseline
    raise UnknownState(state_label, factor.id)


def constraint_holds(kind: str, source_active: bool, target_active: bool) -> bool:
    if kind == "requires":
        return not source_active or target_active
    if kind == "excludes":
        return not (source_active and target_active)
    return True


def validate(model: NoiseFactorModel) -> list[ValidationIssue]:
    issues: list[ValidationIssue] = []

    def add(code, path, message):
        issues.append(ValidationIssue(code, path, message))

    if not model.types:
        add("EMPTY_MODEL", "types", "model declares no factor types")
    for name, n in Counter(model.type_names).items():
        if n > 1:
            add("DUP_TYPE_NAME", "types", f"factor type {name!r} declared {n} times")

    seen_ids: dict[str, str] = {}
    for ti, ftype in enumerate(model.types):
        tpath = f"types[{ti}]"
        if not ftype.factors:
            add("EMPTY_TYPE", tpath, f"factor type {ftype.name!r} has no factors")
        for fi, factor in enumerate(ftype.factors):
            fpath = f"{tpath}.factors[{fi}]"
            if factor.id in seen_ids:
                add("DUP_FACTOR_ID", fpath,
                    f"factor id {factor.id!r} already used at {seen_ids[factor.id]}")
            else:
                seen_ids[factor.id] = fpath
            issues.extend(_factor_issues(factor, fpath))

    for ci, c in enumerate(model.constraints):
        cpath = f"constraints[{ci}]"
        if c.kind not in CONSTRAINT_KINDS:
            add("BAD_CONSTRAINT_KIND", cpath, f"unknown constraint kind {c.kind!r}")
        for end in ("source", "target"):
            ref = getattr(c, end)
            if ref not in seen_ids:
                add("UNKNOWN_FACTOR_REF", f"{cpath}.{end}", f"no factor with id {ref!r}")
        if c.source == c.target:
            add("SELF_CONSTRAINT", cpath, f"constraint relates {c.source!r} to itself")
    return issues


def _factor_issues(factor: Factor, fpath: str) -> Iterable[ValidationIssue]:
    if len(factor.states) < 2:
        yield ValidationIssue("TOO_FEW_STATES", fpath,
                              f"factor {factor.id!r} has {len(factor.states)} state(s), needs 2")
    for label, n in Counter(factor.labels).items():
        if n > 1:
            yield ValidationIssue("DUP_STATE_LABEL", fpath,
                                  f"state label {label!r} repeated in factor {factor.id!r}")
    for si, s in enumerate(factor.states):
        if not s.label:
            yield ValidationIssue("EMPTY_STATE_LABEL", f"{fpath}.states[{si}]",
                                  "state label is empty")
    baselines = sum(1 for s in factor.states if s.baseline)
    if baselines == 0:
        yield ValidationIssue("NO_BASELINE", fpath,
                              f"factor {factor.id!r} has no baseline state")
    elif baselines > 1:
        yield ValidationIssue("MULTI_BASELINE", fpath,
                              f"factor {factor.id!r} has {baselines} baseline states")
    if factor.channels is not None:
        unknown = sorted(factor.channels - set(CHANNELS))
        if unknown:
            yield ValidationIssue("UNKNOWN_CHANNEL", f"{fpath}.channels",
                                  f"unknown channel(s) {', '.join(unknown)}")


def filter_relevant(model: NoiseFactorModel) -> NoiseFactorModel:
    """Keep only factors that affect image content (pixel intensity or position).

    Factors whose channels are limited to frame rate and dropped frames are
    dropped, along with constraints touching them and types left empty.
    """
    for _, factor in model.iter_factors():
        if not factor.channels:
            raise MissingChannels(factor.id)

    types = []
    kept: set[str] = set()
    for ftype in model.types:
        factors = tuple(f for f in ftype.factors if f.channels & IMAGE_CHANNELS)
        if factors:
            types.append(replace(ftype, factors=factors))
            kept.update(f.id for f in factors)
    constraints = tuple(c for c in model.constraints
                        if c.source in kept and c.target in kept)
    return replace(model, types=tuple(types), constraints=constraints)
