import itertools

import pytest
from sksflow.flow import AtomicFlow, BOT, FlowError, TOP
from sksflow.bridge import random_flow

from conftest import (
    flow_example_a,
    flow_hyper,
    flow_not_streamlined,
    flow_three_simple,
    flow_tower,
    flow_two_cycles,
)


def canon_cycle(seq):
    best = None
    for cand in (tuple(seq), tuple(reversed(seq))):
        for i in range(len(cand)):
            rot = cand[i:] + cand[:i]
            if best is None or rot < best:
                best = rot
    return best


# ------------------------------------------------------------------ validation

def test_example_flow_validates():
    assert flow_example_a().validate().ok


def test_interaction_feeding_contraction_has_no_polarity():
    g = AtomicFlow()
    v1 = g.add_vertex("aid")
    v2 = g.add_vertex("acd")
    g.add_edge(v1, v2)
    g.add_edge(v1, v2)
    g.add_edge(v2, BOT)
    report = g.validate()
    assert not report.ok and report.condition == "polarity"


def test_empty_flow_validates():
    g = AtomicFlow()
    assert g.validate().ok
    assert g.is_streamlined() and g.is_super_streamlined() and g.is_hyper_streamlined()


def test_arity_violation_reported():
    g = AtomicFlow()
    v = g.add_vertex("acd")
    g.add_edge(TOP, v)
    g.add_edge(v, BOT)
    report = g.validate()
    assert not report.ok and report.condition == "arity"


def test_vertex_cycle_reported():
    g = AtomicFlow()
    a = g.add_vertex("acd")
    b = g.add_vertex("acu")
    g.add_edge(TOP, a)
    g.add_edge(a, b)     # down
    g.add_edge(b, a)     # back up: a directed cycle
    g.add_edge(b, BOT)
    report = g.validate()
    assert not report.ok and report.condition == "acyclicity"


def test_rewired_valid_flow_names_broken_condition():
    g = flow_example_a()
    g.set_lo(5, 2)  # edge 5 now enters the cocontraction: arity breaks
    report = g.validate()
    assert not report.ok and report.condition == "arity"


# -------------------------------------------------------------------- polarity

def brute_force_assignments(flow):
    """Oracle: enumerate all sign maps and keep the ones satisfying the
    polarity condition vertex by vertex."""
    edges = flow.edges()
    out = []
    for signs in itertools.product("-+", repeat=len(edges)):
        pi = dict(zip(edges, signs))
        ok = True
        for v in flow.vertices():
            incident = {pi[e] for e in flow.edges_of(v)}
            lab = flow.label(v)
            if lab in ("acd", "acu") and len(incident) != 1:
                ok = False
            if lab in ("aid", "aiu") and incident != {"-", "+"}:
                ok = False
        if ok:
            out.append(pi)
    return out


def test_example_a_has_exactly_two_assignments():
    g = flow_example_a()
    got = g.polarity_assignments()
    assert len(got) == 2
    assert sorted(map(sorted, (a.items() for a in got))) == sorted(
        map(sorted, (a.items() for a in brute_force_assignments(g)))
    )
    pi = got[0]
    assert pi[2] == pi[3] == pi[4]
    assert pi[1] != pi[3] and pi[5] != pi[4]


def test_two_disjoint_edges_four_assignments():
    g = AtomicFlow()
    g.add_edge(TOP, BOT)
    g.add_edge(TOP, BOT)
    assert len(g.polarity_assignments()) == 4


def test_single_weakening_two_assignments():
    g = AtomicFlow()
    v = g.add_vertex("awd")
    g.add_edge(v, BOT)
    assert len(g.polarity_assignments()) == 2


@pytest.mark.parametrize("seed", range(25))
def test_assignment_count_is_two_to_components(seed):
    g = random_flow(seed, vertices=5, roots=2)
    comps = g.components()
    if len(comps) > 4:
        pytest.skip("only enumerate small counts here")
    got = g.polarity_assignments()
    assert len(got) == 2 ** len(comps)
    assert len(got) == len(brute_force_assignments(g))


# ------------------------------------------------------------- paths and cycles

def test_path_example():
    g = AtomicFlow()
    aid = g.add_vertex("aid")
    acd = g.add_vertex("acd")
    awu = g.add_vertex("awu")
    aiu = g.add_vertex("aiu")
    e1 = g.add_edge(aid, awu)
    e2 = g.add_edge(aid, acd)
    e3 = g.add_edge(TOP, acd)
    e4 = g.add_edge(acd, aiu)
    e5 = g.add_edge(TOP, aiu)
    assert g.validate().ok
    assert sorted(g.maximal_ai_paths()) == sorted([(e1, e2, e4, e5), (e3, e4, e5)])
    assert g.ai_connections() == [(e2, e4)]
    assert g.simple_edges() == []


def test_two_cycle_example():
    g = flow_two_cycles()
    cycles = g.ai_cycles()
    assert set(cycles) == {canon_cycle([1, 4, 5, 6, 7, 2]), canon_cycle([1, 3, 8, 2])}
    assert set(g.simple_edges()) == {5, 6}
    fragile = [c for c in cycles if set(c) & {5, 6}]
    assert len(fragile) == 1 and set(fragile[0]) == {1, 4, 5, 6, 7, 2}


def test_three_simple_edges_and_extremal():
    g = flow_three_simple()
    assert g.validate().ok
    assert set(g.simple_edges()) == {4, 5, 6}
    assert g.is_cycle_free()
    for seq, dirs in g.maximal_ai_walks():
        assert g.is_clean_walk(seq, dirs)
    assert set(g.extremal_simple_edges()) == {4, 6}
    assert g.classify_edge(4) == {"simple": True, "in_ai_cycle": False, "extremal_simple": True}
    assert g.classify_edge(5) == {"simple": True, "in_ai_cycle": False, "extremal_simple": False}
    assert g.classify_edge(3) == {"simple": False, "in_ai_cycle": False, "extremal_simple": False}


def test_maximal_paths_require_cycle_freeness():
    g = flow_two_cycles()
    with pytest.raises(FlowError):
        g.maximal_ai_paths()


@pytest.mark.parametrize("seed", range(20))
def test_maximal_paths_are_cycle_free_walks(seed):
    g = random_flow(seed, vertices=6, roots=2)
    if not g.is_cycle_free():
        return
    for seq, dirs in g.maximal_ai_walks():
        assert len(set(seq)) == len(seq)


def test_cycles_invariant_under_relabelling():
    g = flow_two_cycles()
    shifted = AtomicFlow()
    vmap = {}
    for v in g.vertices():
        vmap[v] = shifted.add_vertex(g.label(v), vid=v + 10)
    emap = {}
    for e in reversed(g.edges()):
        u = g.up(e)
        l = g.lo(e)
        emap[e] = shifted.add_edge(
            vmap.get(u, u), vmap.get(l, l), eid=100 - e
        )
    assert {frozenset(c) for c in shifted.ai_cycles()} == {
        frozenset(emap[e] for e in cyc) for cyc in g.ai_cycles()
    }


def test_tower_maximal_path_count():
    for n in (1, 2, 3):
        assert len(flow_tower(n).maximal_ai_paths()) == 2 ** n


# ------------------------------------------------------------------ predicates

def test_streamlined_examples():
    assert not flow_not_streamlined().is_streamlined()
    h = flow_hyper()
    assert h.validate().ok
    assert h.is_streamlined() and h.is_super_streamlined() and h.is_hyper_streamlined()


def test_streamlined_but_not_super():
    g = AtomicFlow()
    wd = g.add_vertex("awd")
    cd = g.add_vertex("acd")
    g.add_edge(wd, cd)
    g.add_edge(TOP, cd)
    g.add_edge(cd, BOT)
    assert g.validate().ok
    assert g.is_streamlined()
    assert not g.is_w_normal()
    assert not g.is_super_streamlined()


# ----------------------------------------------------------------- isomorphism

def test_representation_permutation_isomorphic():
    g = flow_example_a()
    h = AtomicFlow()
    w3 = h.add_vertex("aiu")
    w2 = h.add_vertex("acu")
    w1 = h.add_vertex("aiu")
    h.add_edge(TOP, w1)
    h.add_edge(w2, w3)
    h.add_edge(TOP, w2)
    h.add_edge(w2, w1)
    h.add_edge(TOP, w3)
    m = g.isomorphic(h)
    assert m is not None
    for e, e2 in m["edges"].items():
        up = m["vertices"].get(g.up(e), g.up(e))
        assert h.up(e2) == up


def test_non_isomorphic_label_counts():
    g = AtomicFlow()
    v = g.add_vertex("aid")
    g.add_edge(v, BOT)
    g.add_edge(v, BOT)
    h = AtomicFlow()
    w = h.add_vertex("awd")
    h.add_edge(w, BOT)
    assert g.isomorphic(h) is None


def test_two_edges_not_isomorphic_to_contraction():
    g = AtomicFlow()
    g.add_edge(TOP, BOT)
    g.add_edge(TOP, BOT)
    h = AtomicFlow()
    v = h.add_vertex("acd")
    h.add_edge(TOP, v)
    h.add_edge(TOP, v)
    h.add_edge(v, BOT)
    assert g.isomorphic(h) is None


@pytest.mark.parametrize("seed", range(10))
def test_isomorphic_is_equivalence(seed):
    a = random_flow(seed, vertices=5, roots=2)
    b = random_flow(seed + 1000, vertices=5, roots=2)
    c = random_flow(seed + 2000, vertices=5, roots=2)
    assert a.isomorphic(a) is not None
    ab = a.isomorphic(b)
    ba = b.isomorphic(a)
    assert (ab is None) == (ba is None)
    bc = b.isomorphic(c)
    if ab is not None and bc is not None:
        assert a.isomorphic(c) is not None


# --------------------------------------------------------------- serialisation

GOLDEN_SINGLE_EDGE_DOT = """digraph flow {
  rankdir=TB;
  top [shape=plaintext, label="T"];
  bot [shape=plaintext, label="_"];
  top -> bot [label="e1"];
}
"""

GOLDEN_EXAMPLE_A_DOT = """digraph flow {
  rankdir=TB;
  top [shape=plaintext, label="T"];
  bot [shape=plaintext, label="_"];
  v1 [shape=triangle, label="aiu"];
  v2 [shape=trapezium, label="acu"];
  v3 [shape=triangle, label="aiu"];
  top -> v1 [label="e1"];
  top -> v2 [label="e2"];
  v2 -> v1 [label="e3"];
  v2 -> v3 [label="e4"];
  top -> v3 [label="e5"];
}
"""


def test_dot_single_edge():
    g = AtomicFlow()
    g.add_edge(TOP, BOT)
    assert g.to_dot() == GOLDEN_SINGLE_EDGE_DOT


def test_dot_example_a_golden():
    assert flow_example_a().to_dot() == GOLDEN_EXAMPLE_A_DOT


def test_dot_polarity_annotation_matches_first_assignment():
    g = flow_example_a()
    pi = g.polarity_assignments()[0]
    dot = g.to_dot(polarity=True)
    for e in g.edges():
        assert f'label="e{e}:{pi[e]}"' in dot


def test_json_round_trip():
    g = flow_example_a()
    h = AtomicFlow.from_json(g.to_json())
    assert h.to_json() == g.to_json()
    assert g.isomorphic(h) is not None


def test_json_deterministic():
    g = flow_two_cycles()
    assert g.to_json() == g.to_json()


def test_cycle_enumeration_cap():
    from sksflow.flow import ResourceCapExceeded

    # a cocontraction/contraction tower between an interaction and a cut:
    # every path through the tower closes a distinct ai-cycle
    g = AtomicFlow()
    aid = g.add_vertex("aid")
    aiu = g.add_vertex("aiu")
    prev = g.add_edge(aid, BOT)
    for _ in range(4):
        cu = g.add_vertex("acu")
        g.set_lo(prev, cu)
        cd = g.add_vertex("acd")
        g.add_edge(cu, cd)
        g.add_edge(cu, cd)
        prev = g.add_edge(cd, BOT)
    g.set_lo(prev, aiu)
    g.add_edge(aid, aiu)
    assert g.validate().ok
    with pytest.raises(ResourceCapExceeded):
        g.ai_cycles(cap=2)
    assert len(g.ai_cycles()) == 16
