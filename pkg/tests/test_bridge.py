import pytest

from sksflow.formula import ROOT, TRUE, parse
from sksflow.derivation import (
    Derivation,
    StepBuilder,
    check,
    include_in_context,
    parse_derivation,
)
from sksflow.flow import AtomicFlow, BOT, TOP
from sksflow.bridge import (
    edge_literals,
    extract_flow,
    random_derivation,
    random_flow,
    random_proof,
    sequentialize,
)

from conftest import flow_example_a


# ------------------------------------------------------------------ extraction

def test_extract_fig1_left(corpus):
    deriv = parse_derivation(corpus("fig1_left.sks"))
    x = extract_flow(deriv)
    assert x.flow.validate().ok
    assert x.flow.label_counts() == {"aid": 1, "aiu": 1}
    v_aid = next(v for v in x.flow.vertices() if x.flow.label(v) == "aid")
    v_aiu = next(v for v in x.flow.vertices() if x.flow.label(v) == "aiu")
    assert set(x.flow.lower_edges(v_aid)) == set(x.flow.upper_edges(v_aiu))


def test_extract_fig1_right(corpus):
    deriv = parse_derivation(corpus("fig1_right.sks"))
    x = extract_flow(deriv)
    assert x.flow.label_counts() == {"acu": 3}


def test_extract_empty_derivation():
    x = extract_flow(Derivation(parse("[a,b]")))
    assert len(x.flow.vertices()) == 0
    assert len(x.flow.edges()) == 2
    assert all(x.flow.up(e) == TOP and x.flow.lo(e) == BOT for e in x.flow.edges())


def test_extract_linear_steps_add_no_vertices(corpus):
    deriv = parse_derivation(corpus("ss_example.sks"))
    x = extract_flow(deriv)
    assert len(x.flow.vertices()) == 0


def test_extraction_vertex_multiset_is_structural_steps(corpus):
    deriv = parse_derivation(corpus("fig1_middle.sks"))
    x = extract_flow(deriv)
    structural = [s.rule for s in deriv.steps if s.rule in ("aid", "aiu", "awd", "awu", "acd", "acu")]
    counts = {}
    for r in structural:
        counts[r] = counts.get(r, 0) + 1
    assert x.flow.label_counts() == counts


def test_extraction_surjective_and_total():
    d = random_derivation(7, vertices=5, roots=2)
    x = extract_flow(d)
    formulas = d.formulas()
    seen = set()
    from sksflow.formula import atom_positions

    for i, table in enumerate(x.occ):
        assert set(table) == {p for p, _ in atom_positions(formulas[i])}
        seen |= set(table.values())
    assert seen == set(x.flow.edges())


def test_uniqueness_under_eq_granularity(corpus):
    deriv = parse_derivation(corpus("fig1_middle.sks"))
    flow0 = extract_flow(deriv).flow
    # splice a redundant eq pair into the middle
    padding = StepBuilder(deriv.formulas()[4]).eq(ROOT, "comm_con").eq(ROOT, "comm_con").derivation(deriv.formulas()[4])
    padded = Derivation(
        deriv.premiss, deriv.steps[:4] + padding.steps + deriv.steps[4:]
    )
    assert check(padded).ok
    assert extract_flow(padded).flow.isomorphic(flow0) is not None


def test_extraction_functorial_under_context():
    inner = parse_derivation(
        "t\n-- aid @ /\n[a,-a]\n"
    )
    ctx = parse("[x,(b,-c)]")
    lifted = include_in_context(ctx, ("L",), inner)
    f_inner = extract_flow(inner).flow
    f_lifted = extract_flow(lifted).flow
    assert len(f_lifted.vertices()) == len(f_inner.vertices())
    assert len(f_lifted.edges()) == len(f_inner.edges()) + 2  # b and -c ride along


# -------------------------------------------------------------- sequentialize

def test_sequentialize_single_interaction():
    g = AtomicFlow()
    v = g.add_vertex("aid")
    g.add_edge(v, BOT)
    g.add_edge(v, BOT)
    d = sequentialize(g)
    assert check(d).ok
    assert [s.rule for s in d.steps if s.rule == "aid"] == ["aid"]
    assert extract_flow(d).flow.isomorphic(g) is not None


def test_sequentialize_bare_edges():
    g = AtomicFlow()
    g.add_edge(TOP, BOT)
    g.add_edge(TOP, BOT)
    d = sequentialize(g)
    assert check(d).ok
    assert len(d.steps) == 0
    assert extract_flow(d).flow.isomorphic(g) is not None


def test_sequentialize_example_a():
    g = flow_example_a()
    d = sequentialize(g)
    assert check(d).ok
    structural = [s.rule for s in d.steps if s.rule in ("aid", "aiu", "awd", "awu", "acd", "acu")]
    assert sorted(structural) == ["acu", "aiu", "aiu"]
    assert extract_flow(d).flow.isomorphic(g) is not None


@pytest.mark.parametrize("seed", range(40))
def test_round_trip(seed):
    g = random_flow(seed, vertices=6, roots=2)
    d = sequentialize(g)
    assert check(d).ok
    assert extract_flow(d).flow.isomorphic(g) is not None
    structural = [s for s in d.steps if s.rule in ("aid", "aiu", "awd", "awu", "acd", "acu")]
    assert len(structural) == len(g.vertices())


def test_sequentialize_uses_hints():
    g = AtomicFlow()
    v = g.add_vertex("acd")
    g.add_edge(TOP, v, hint="q")
    g.add_edge(TOP, v, hint="q")
    g.add_edge(v, BOT, hint="q")
    lits = edge_literals(g)
    assert all(l.name == "q" for l in lits.values())
    d = sequentialize(g)
    assert check(d).ok


# ------------------------------------------------------------------ generators

def test_random_flow_deterministic():
    a = random_flow(11, vertices=8, roots=2)
    b = random_flow(11, vertices=8, roots=2)
    assert a.to_json() == b.to_json()


def test_random_flow_zero_vertices_two_roots():
    g = random_flow(1, vertices=0, roots=2)
    assert len(g.vertices()) == 0
    assert len(g.edges()) == 2
    assert all(g.up(e) == TOP and g.lo(e) == BOT for e in g.edges())


@pytest.mark.parametrize("seed", range(0, 200, 7))
def test_random_flows_validate(seed):
    g = random_flow(seed, vertices=12, roots=3)
    assert g.validate().ok


def test_random_proof_shape():
    p = random_proof(5, vertices=5)
    assert check(p).ok
    assert p.premiss == TRUE
    assert extract_flow(p).flow.label_counts().get("aiu", 0) >= 1
