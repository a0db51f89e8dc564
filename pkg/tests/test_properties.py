"""Module invariants as hypothesis properties."""
import itertools
from dataclasses import replace

from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import make_factor, models
from sitcov.grid import (LazyGrid, count, expand, mixed_radix_key, oracle_expand)
from sitcov.model import (CHANNELS, Constraint, FactorType, NoiseFactorModel,
                          active, constraint_holds, filter_relevant)
from sitcov.pods import GlobalIndexSpace, Pod, global_to_tuple, tuple_to_global
from sitcov.requirements import RobustnessRequirement, coverage_report

MANY = settings(max_examples=1000, deadline=None)


def _violates(model, type_name, labels) -> bool:
    factors = {f.id: f for f in model.get_type(type_name).factors}
    state = dict(zip(factors, labels))
    return any(not constraint_holds(c.kind, active(factors[c.source], state[c.source]),
                                    active(factors[c.target], state[c.target]))
               for c in model.hard_constraints_within(type_name))


@given(models())
@MANY
def test_oracle_equivalence(model):
    assert expand(model, "T") == oracle_expand(model, "T")


@given(models())
@MANY
def test_sound_and_complete(model):
    grid = expand(model, "T")
    emitted = {s.labels for s in grid.rows}
    assert len(emitted) == len(grid.rows)
    for combo in itertools.product(*(f.labels for f in grid.factors)):
        assert (combo in emitted) == (not _violates(model, "T", combo))


@given(models())
@MANY
def test_ordering_and_count(model):
    grid = expand(model, "T")
    keys = [mixed_radix_key(grid.factors, s) for s in grid.rows]
    assert all(a < b for a, b in zip(keys, keys[1:]))
    stats = count(model, "T")
    assert stats.pruned_count == len(grid)
    assert stats.pruned_count + stats.pruned_away == stats.unpruned_count


@given(models(), st.data())
@MANY
def test_lazy_row_by_id(model, data):
    grid = expand(model, "T")
    k = data.draw(st.integers(1, len(grid)))
    assert LazyGrid(model, "T").row(k) == grid.row(k)


@st.composite
def baseline_first_models(draw):
    model = draw(models())
    ftype = model.types[0]
    factors = tuple(make_factor(f.id, f.radix) for f in ftype.factors)
    return replace(model, types=(FactorType(ftype.name, factors),))


@given(baseline_first_models())
@MANY
def test_baseline_row_first(model):
    grid = expand(model, "T")
    assert len(grid) >= 1
    assert all(not active(f, label) for f, label in zip(grid.factors, grid.rows[0].labels))


@given(models())
@MANY
def test_baseline_always_emitted(model):
    grid = expand(model, "T")
    baseline = tuple(f.states[f.baseline_index].label for f in grid.factors)
    assert baseline in {s.labels for s in grid.rows}


@given(models())
@MANY
def test_note_inertness(model):
    stripped = replace(model, constraints=tuple(c for c in model.constraints if c.kind != "note"))
    assert expand(model, "T") == expand(stripped, "T")


@given(models(), st.data())
@MANY
def test_monotonicity(model, data):
    n = len(model.types[0].factors)
    if n < 2:
        return
    s, t = data.draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
    kind = data.draw(st.sampled_from(["requires", "excludes"]))
    tighter = replace(model, constraints=model.constraints + (Constraint(kind, f"f{s}", f"f{t}"),))
    assert count(tighter, "T").pruned_count <= count(model, "T").pruned_count
    assert {r.labels for r in expand(tighter, "T").rows} <= {r.labels for r in expand(model, "T").rows}


channel_sets = st.frozensets(st.sampled_from(CHANNELS), min_size=1)


@st.composite
def tagged_models(draw):
    n_types = draw(st.integers(1, 3))
    types, ids = [], []
    for ti in range(n_types):
        factors = []
        for fi in range(draw(st.integers(1, 4))):
            fid = f"t{ti}f{fi}"
            factors.append(make_factor(fid, draw(st.integers(2, 3)), channels=draw(channel_sets)))
            ids.append(fid)
        types.append(FactorType(f"T{ti}", tuple(factors)))
    constraints = []
    if len(ids) > 1:
        pairs = st.lists(st.tuples(st.sampled_from(["requires", "excludes", "note"]),
                                   st.sampled_from(ids), st.sampled_from(ids)).filter(lambda c: c[1] != c[2]),
                         max_size=4)
        constraints = [Constraint(*c) for c in draw(pairs)]
    return NoiseFactorModel("m", "1", tuple(types), tuple(constraints))


@given(tagged_models())
@MANY
def test_filter_relevant(model):
    once = filter_relevant(model)
    assert filter_relevant(once) == once
    kept = [f.id for _, f in once.iter_factors()]
    expected = [f.id for _, f in model.iter_factors() if f.channels & {"I_RGB", "P_XY"}]
    assert kept == expected
    assert all(c.source in kept and c.target in kept for c in once.constraints)
    assert all(t.factors for t in once.types)


@given(st.lists(st.lists(st.integers(1, 30), min_size=1, max_size=10), max_size=6),
       st.lists(st.integers(1, 30), min_size=1, max_size=10))
@MANY
def test_coverage_monotone(pod_rows, extra):
    grid = expand(NoiseFactorModel("m", "1", (FactorType("T", tuple(
        make_factor(f"f{i}", r) for i, r in enumerate((2, 3, 5)))),)), "T")
    reqs = [RobustnessRequirement(f"R{i}", "t", "c", "b", (Pod(f"PODs#{i}", "T", tuple(sorted(set(rows)))),))
            for i, rows in enumerate(pod_rows)]
    before = coverage_report(reqs, grid)
    more = reqs + [RobustnessRequirement("X", "t", "c", "b", (Pod("X", "T", tuple(sorted(set(extra)))),))]
    after = coverage_report(more, grid)
    assert set(before.covered) <= set(after.covered)
    assert set(after.covered) | set(after.uncovered) == set(range(1, 31))
    assert not set(after.covered) & set(after.uncovered)


@given(st.lists(st.integers(1, 200), min_size=1, max_size=6), st.data())
@MANY
def test_index_bijection(radices, data):
    space = GlobalIndexSpace(tuple(f"T{i}" for i in range(len(radices))), tuple(radices))
    gid = data.draw(st.integers(1, space.total))
    tup = global_to_tuple(space, gid)
    assert tuple_to_global(space, tup) == gid
    assert all(1 <= r <= n for r, n in zip(tup, radices))
