import pathlib

import pytest

from sksflow.flow import AtomicFlow, BOT, TOP

CORPUS = pathlib.Path(__file__).parent / "corpus"


def corpus_text(name: str) -> str:
    return (CORPUS / name).read_text()


@pytest.fixture
def corpus():
    return corpus_text


def flow_example_a() -> AtomicFlow:
    """Three-vertex flow: a cocontraction feeding two cointeractions that
    also consume two further boundary edges; one connected component."""
    g = AtomicFlow()
    v1 = g.add_vertex("aiu")
    v2 = g.add_vertex("acu")
    v3 = g.add_vertex("aiu")
    g.add_edge(TOP, v1)
    g.add_edge(TOP, v2)
    g.add_edge(v2, v1)
    g.add_edge(v2, v3)
    g.add_edge(TOP, v3)
    return g


def flow_two_cycles() -> AtomicFlow:
    """Two overlapping ai-cycles; edges 5 and 6 are the simple edges and
    only the cycle through them is fragile."""
    g = AtomicFlow()
    aid_t = g.add_vertex("aid")
    acu_l = g.add_vertex("acu")
    acu_r = g.add_vertex("acu")
    aid_i = g.add_vertex("aid")
    aiu_l = g.add_vertex("aiu")
    aiu_r = g.add_vertex("aiu")
    aiu_b = g.add_vertex("aiu")
    g.add_edge(aid_t, acu_l)   # 1
    g.add_edge(aid_t, acu_r)   # 2
    g.add_edge(acu_l, aiu_b)   # 3
    g.add_edge(acu_l, aiu_l)   # 4
    g.add_edge(aid_i, aiu_l)   # 5
    g.add_edge(aid_i, aiu_r)   # 6
    g.add_edge(acu_r, aiu_r)   # 7
    g.add_edge(acu_r, aiu_b)   # 8
    return g


def flow_three_simple() -> AtomicFlow:
    """Cycle-free, three simple edges (4, 5, 6); every ai-path is clean
    and 4 and 6 are the extremal simple edges."""
    g = AtomicFlow()
    cd1 = g.add_vertex("acd")
    id1 = g.add_vertex("aid")
    id2 = g.add_vertex("aid")
    cd2 = g.add_vertex("acd")
    iu1 = g.add_vertex("aiu")
    iu2 = g.add_vertex("aiu")
    g.add_edge(TOP, cd1)   # 1
    g.add_edge(TOP, cd1)   # 2
    g.add_edge(cd1, iu1)   # 3
    g.add_edge(id1, iu1)   # 4 simple, extremal
    g.add_edge(id1, iu2)   # 5 simple
    g.add_edge(id2, iu2)   # 6 simple, extremal
    g.add_edge(id2, cd2)   # 7
    g.add_edge(TOP, cd2)   # 8
    g.add_edge(cd2, BOT)   # 9
    return g


def flow_not_streamlined() -> AtomicFlow:
    """A contraction and a weakening both feeding a cointeraction."""
    g = AtomicFlow()
    cd = g.add_vertex("acd")
    wd = g.add_vertex("awd")
    iu = g.add_vertex("aiu")
    g.add_edge(TOP, cd)
    g.add_edge(TOP, cd)
    g.add_edge(cd, iu)
    g.add_edge(wd, iu)
    return g


def flow_hyper() -> AtomicFlow:
    """A hyper-streamlined flow: a cocontraction branch dies in a cut fed
    from the boundary, an interaction feeds a contraction."""
    g = AtomicFlow()
    cu = g.add_vertex("acu")
    ai = g.add_vertex("aid")
    iu = g.add_vertex("aiu")
    cd = g.add_vertex("acd")
    g.add_edge(TOP, cu)
    g.add_edge(cu, iu)
    g.add_edge(cu, BOT)
    g.add_edge(TOP, iu)
    g.add_edge(ai, BOT)
    g.add_edge(ai, cd)
    g.add_edge(TOP, cd)
    g.add_edge(cd, BOT)
    return g


def flow_tower(n: int) -> AtomicFlow:
    """n cocontraction/contraction couples stacked on one thread; it has
    2^n maximal ai-paths, conserved by contraction rewriting."""
    g = AtomicFlow()
    prev = g.add_edge(TOP, BOT)
    for _ in range(n):
        cu = g.add_vertex("acu")
        g.set_lo(prev, cu)
        cd = g.add_vertex("acd")
        g.add_edge(cu, cd)
        g.add_edge(cu, cd)
        prev = g.add_edge(cd, BOT)
    return g


def flow_bounce_example() -> AtomicFlow:
    """A negative three-edge ai-connection (interaction, contraction,
    cocontraction, cut) that fragile-making turns into a negative simple
    edge; the return path runs through a cocontraction/contraction box."""
    g = AtomicFlow()
    aid = g.add_vertex("aid")
    acd = g.add_vertex("acd")
    acu = g.add_vertex("acu")
    aiu = g.add_vertex("aiu")
    box_cu = g.add_vertex("acu")
    box_cd = g.add_vertex("acd")
    g.add_edge(aid, acd)       # 1: the negative connection, top edge
    g.add_edge(TOP, acd)       # 2
    g.add_edge(acd, acu)       # 3: middle edge of the connection
    g.add_edge(acu, aiu)       # 4: bottom edge of the connection
    g.add_edge(acu, BOT)       # 5
    g.add_edge(aid, box_cu)    # 6: return path
    g.add_edge(box_cu, box_cd) # 7
    g.add_edge(box_cu, box_cd) # 8
    g.add_edge(box_cd, aiu)    # 9
    return g
