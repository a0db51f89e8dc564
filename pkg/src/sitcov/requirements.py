"""Robustness requirements (performance template + PODs) and coverage reports."""
from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .grid import SituationGrid, write_csv
from .model import NoiseFactorModel, SitcovError
from .modelio import RequirementSpec, dump_json
from .pods import Pod, bind_pods

FORMATS = ("markdown", "json", "csv")


class TypeMismatch(SitcovError):
    def __init__(self, pod_type: str, grid_type: str):
        self.pod_type = pod_type
        self.grid_type = grid_type
        super().__init__(f"POD of type {pod_type!r} checked against grid {grid_type!r}")


class UnboundPod(SitcovError):
    def __init__(self, label: str, type_name: str):
        self.label = label
        self.type_name = type_name
        super().__init__(f"{label} refers to type {type_name!r}, which has no expanded grid")


@dataclass(frozen=True)
class RobustnessRequirement:
    id: str
    trigger: str
    component: str
    behaviour: str
    pods: tuple[Pod, ...]

    def __post_init__(self):
        object.__setattr__(self, "pods", tuple(self.pods))

    @property
    def pod_labels(self) -> list[str]:
        """Distinct labels in citation order."""
        return list(dict.fromkeys(p.label for p in self.pods))


def build_requirements(model: NoiseFactorModel, specs: Sequence[RequirementSpec],
                       grids: Mapping[str, SituationGrid] | None = None) -> list[RobustnessRequirement]:
    """Bind every selector in document order and attach the PODs to their requirements."""
    selectors = [sel for spec in specs for sel in spec.pods]
    pods = iter(bind_pods(model, grids, selectors))
    return [RobustnessRequirement(s.id, s.trigger, s.component, s.behaviour,
                                  tuple(next(pods) for _ in s.pods))
            for s in specs]


def render_requirement(req: RobustnessRequirement) -> str:
    labels = ", ".join(req.pod_labels)
    return (f"**{req.id}:** When {req.trigger}, the {req.component} shall {req.behaviour} "
            f"under all conditions defined in [{labels}].")


def lint_requirement(req: RobustnessRequirement) -> list[str]:
    warnings = []
    for slot in ("trigger", "component", "behaviour"):
        text = getattr(req, slot)
        if not text.strip():
            warnings.append(f"{req.id}: empty {slot}")
        elif "{" in text or "}" in text:
            warnings.append(f"{req.id}: {slot} contains a brace")
    if not req.pods:
        warnings.append(f"{req.id}: no PODs, robustness scope is vacuous")
    return warnings


@dataclass(frozen=True)
class CoverageReport:
    type_name: str
    grid_size: int
    covered: tuple[int, ...]
    uncovered: tuple[int, ...]

    @property
    def ratio(self) -> Fraction:
        return Fraction(len(self.covered), self.grid_size)

    @property
    def complete(self) -> bool:
        return not self.uncovered

    @property
    def decimal(self) -> str:
        return f"{float(self.ratio):.4f}"

    def summary(self) -> str:
        status = "COMPLETE" if self.complete else "INCOMPLETE"
        return (f"{self.type_name}: coverage {len(self.covered)}/{self.grid_size} {status} "
                f"ratio={self.ratio} ({self.decimal})")


def coverage_report(reqs: Sequence[RobustnessRequirement], grid: SituationGrid) -> CoverageReport:
    covered: set[int] = set()
    for req in reqs:
        for pod in req.pods:
            if pod.type_name != grid.type_name:
                raise TypeMismatch(pod.type_name, grid.type_name)
            covered.update(pod.row_ids)
    everything = range(1, len(grid) + 1)
    return CoverageReport(grid.type_name, len(grid), tuple(sorted(covered)),
                          tuple(r for r in everything if r not in covered))


def coverage_by_type(reqs: Sequence[RobustnessRequirement],
                     grids: Mapping[str, SituationGrid]) -> dict[str, CoverageReport]:
    """One report per grid, each counting only the PODs of that grid's type.

    The operational context is fully spanned iff every report is complete.
    """
    reports = {}
    for name, grid in grids.items():
        subset = [RobustnessRequirement(r.id, r.trigger, r.component, r.behaviour,
                                        tuple(p for p in r.pods if p.type_name == name))
                  for r in reqs]
        reports[name] = coverage_report(subset, grid)
    return reports


def compress_ids(ids: Sequence[int]) -> str:
    """``[1, 2, 3, 7]`` -> ``"1-3,7"``."""
    parts = []
    start = prev = None
    for i in ids:
        if prev is not None and i == prev + 1:
            prev = i
            continue
        if start is not None:
            parts.append(str(start) if start == prev else f"{start}-{prev}")
        start = prev = i
    if start is not None:
        parts.append(str(start) if start == prev else f"{start}-{prev}")
    return ",".join(parts)


def _unique_pods(reqs: Sequence[RobustnessRequirement]) -> list[Pod]:
    return list(dict.fromkeys(p for r in reqs for p in r.pods))


def _check_bound(pods: Sequence[Pod], grids: Mapping[str, SituationGrid]) -> None:
    for pod in pods:
        if pod.type_name not in grids:
            raise UnboundPod(pod.label, pod.type_name)
        # ids were range-checked at bind time; a different grid may be shorter
        if pod.row_ids and pod.row_ids[-1] > len(grids[pod.type_name]):
            raise UnboundPod(pod.label, pod.type_name)


def _md_cell(text: str) -> str:
    return text.replace("|", "\\|")


def _emit_markdown(reqs, pods, grids) -> str:
    out = io.StringIO()
    out.write("# Robustness safety requirements\n\n")
    for req in reqs:
        out.write(render_requirement(req) + "\n\n")
    out.write("## POD appendix\n")
    for pod in pods:
        grid = grids[pod.type_name]
        out.write(f"\n### {pod.label} ({pod.type_name}, rows {compress_ids(pod.row_ids)})\n\n")
        header = ["ID", *(_md_cell(f.name) for f in grid.factors)]
        out.write("| " + " | ".join(header) + " |\n")
        out.write("|" + "|".join("---" for _ in header) + "|\n")
        for r in pod.row_ids:
            cells = [str(r), *(_md_cell(x) for x in grid.row(r).labels)]
            out.write("| " + " | ".join(cells) + " |\n")
    return out.getvalue()


def _emit_json(reqs, pods, grids) -> bytes:
    doc = {
        "requirements": [
            {"id": r.id, "text": render_requirement(r), "trigger": r.trigger,
             "component": r.component, "behaviour": r.behaviour, "pods": r.pod_labels}
            for r in reqs
        ],
        "pods": [
            {"label": p.label, "type": p.type_name,
             "rows": [{"id": i, "assignments": dict(grids[p.type_name].row(i).assignments)}
                      for i in p.row_ids]}
            for p in pods
        ],
    }
    return dump_json(doc)


def _emit_csv(pods, grids) -> str:
    # one grid-format block per type (rows cited by any POD), blank line between blocks
    blocks = []
    for name, grid in grids.items():
        ids = sorted({i for p in pods if p.type_name == name for i in p.row_ids})
        if ids:
            blocks.append(write_csv(grid.factors, ((i, grid.row(i)) for i in ids)))
    return "\n".join(blocks)


def emit(reqs: Sequence[RobustnessRequirement], grids: Mapping[str, SituationGrid],
         fmt: str) -> bytes:
    if fmt == "md":
        fmt = "markdown"
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    pods = _unique_pods(reqs)
    _check_bound(pods, grids)
    if fmt == "markdown":
        return _emit_markdown(reqs, pods, grids).encode("utf-8")
    if fmt == "json":
        return _emit_json(reqs, pods, grids)
    return _emit_csv(pods, grids).encode("utf-8")
