"""Shared test data: random small models and the worked pedestrian requirement."""
from __future__ import annotations

import json
import random

from hypothesis import strategies as st

from sitcov.model import Constraint, Factor, FactorType, NoiseFactorModel, StateDef

def make_factor(fid: str, radix: int, baseline: int = 0, channels=None) -> Factor:
    states = tuple(StateDef(f"s{i}", i == baseline) for i in range(radix))
    return Factor(fid, fid.upper(), states, channels)


def make_model(radices, constraints=(), baselines=None, name="T") -> NoiseFactorModel:
    baselines = baselines or [0] * len(radices)
    factors = tuple(make_factor(f"f{i}", r, b) for i, (r, b) in enumerate(zip(radices, baselines)))
    cons = tuple(Constraint(kind, f"f{s}", f"f{t}") for kind, s, t in constraints)
    return NoiseFactorModel("random", "0", (FactorType(name, factors),), cons)


def random_model(rng: random.Random, max_factors: int = 6, max_states: int = 3) -> NoiseFactorModel:
    n = rng.randint(1, max_factors)
    radices = [rng.randint(2, max_states) for _ in range(n)]
    baselines = [rng.randrange(r) for r in radices]
    constraints = []
    if n > 1:
        for _ in range(rng.randint(0, 2 * n)):
            s, t = rng.sample(range(n), 2)
            constraints.append((rng.choice(("requires", "excludes", "note")), s, t))
    return make_model(radices, constraints, baselines)


@st.composite
def models(draw, max_factors: int = 6, max_states: int = 3, kinds=("requires", "excludes", "note")):
    n = draw(st.integers(1, max_factors))
    radices = draw(st.lists(st.integers(2, max_states), min_size=n, max_size=n))
    baselines = [draw(st.integers(0, r - 1)) for r in radices]
    constraints = []
    if n > 1:
        pairs = st.tuples(st.sampled_from(kinds), st.integers(0, n - 1), st.integers(0, n - 1)).filter(
            lambda c: c[1] != c[2])
        constraints = draw(st.lists(pairs, max_size=2 * n))
    return make_model(radices, constraints, baselines)


PAPER_RQ = {
    "id": "RQ",
    "trigger": "the ego vehicle is 50 metres from the crossing",
    "component": "object detection component",
    "behaviour": "identify pedestrians that are on or near the crossing in their correct position",
    "pods": [{"type": "Usage", "rows": [1]}],
}


def requirements_bytes(*reqs) -> bytes:
    return json.dumps({"requirements": list(reqs)}).encode()


def usage_req(req_id: str, rows) -> dict:
    return {"id": req_id, "trigger": "t", "component": "c", "behaviour": "b",
            "pods": [{"type": "Usage", "rows": rows}]}
