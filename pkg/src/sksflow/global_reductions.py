"""Global reductions: eliminating a simple edge by duplicating the whole
flow (and derivation), plus the two disciplined recursions built on it,
one breaking ai-cycles and one removing extremal simple edges.

The derivation-level constructions follow a fixed plan: first a pre-pass
surfaces the interaction's source t next to the premiss and the cut's f
next to the conclusion (floating them with switches and unit equations);
then two substituted copies of the derivation are formed, one where the
simple edge becomes t and the interaction a weakening, one where it
becomes f and the cut a coweakening; finally the copies are glued with a
generic cocontraction, a super switch and a generic contraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .formula import Atom, Con, Dis, FALSE, Formula, Position, ROOT, TRUE, dual, replace_at, subformula_at
from .derivation import (
    Derivation,
    DerivationError,
    Step,
    StepBuilder,
    build_generic_contraction,
    build_super_switch,
    check,
    float_disjunct,
    include_in_context,
    sink_conjunct,
    transport_step,
)
from .flow import AtomicFlow, BOT, FlowError, ResourceCapExceeded, TOP
from .bridge import Extraction, extract_flow

MAX_GLOBAL_DEPTH = 50


@dataclass(frozen=True)
class SeSite:
    """A simple edge together with its surroundings: the interaction and
    cointeraction it connects, the interaction's other lower edge and the
    cointeraction's other upper edge (which may coincide)."""

    edge: int
    aid_vertex: int
    aiu_vertex: int
    partner_upper: int
    partner_lower: int


def se_site(flow: AtomicFlow, edge: int) -> SeSite:
    if edge not in flow.edges():
        raise FlowError(f"no edge {edge}")
    v_up, v_lo = flow.up(edge), flow.lo(edge)
    if v_up not in flow.vertices() or flow.label(v_up) != "aid" \
            or v_lo not in flow.vertices() or flow.label(v_lo) != "aiu":
        raise FlowError(f"edge {edge} is not a simple edge")
    e2 = [e for e in flow.lower_edges(v_up) if e != edge][0]
    e3 = [e for e in flow.upper_edges(v_lo) if e != edge][0]
    return SeSite(edge, v_up, v_lo, e2, e3)


# ---------------------------------------------------------------------------
# Flow level.

def _split_flows(flow: AtomicFlow, site: SeSite) -> tuple[AtomicFlow, AtomicFlow]:
    """The two capped copies: the tilde copy has the interaction replaced
    by a weakening and the cut's slot opened to the lower boundary; the
    hat copy dually."""
    tilde = flow.copy()
    tilde.remove_edge(site.edge)
    tilde.remove_vertex(site.aid_vertex)
    tilde.remove_vertex(site.aiu_vertex)
    w = tilde.add_vertex("awd")
    tilde.set_up(site.partner_upper, w)
    tilde.set_lo(site.partner_lower, BOT)

    hat = flow.copy()
    hat.remove_edge(site.edge)
    hat.remove_vertex(site.aid_vertex)
    hat.remove_vertex(site.aiu_vertex)
    u = hat.add_vertex("awu")
    hat.set_up(site.partner_upper, TOP)
    hat.set_lo(site.partner_lower, u)
    return tilde, hat


def _import_flow(g: AtomicFlow, src: AtomicFlow) -> tuple[dict[int, int], dict[int, int]]:
    """Copy src into g with fresh ids; returns (vertex map, edge map)."""
    vmap: dict[int, int] = {}
    for v in src.vertices():
        vmap[v] = g.add_vertex(src.label(v))
    emap: dict[int, int] = {}
    for e in src.edges():
        up = src.up(e)
        lo = src.lo(e)
        emap[e] = g.add_edge(
            vmap[up] if up in vmap else up,
            vmap[lo] if lo in vmap else lo,
            hint=src.hint(e),
        )
    return vmap, emap


def _stitch_flows(
    flow: AtomicFlow,
    site: SeSite,
    d_tilde: AtomicFlow,
    t_up: dict[int, int],
    t_lo: dict[int, int],
    d_hat: AtomicFlow,
    h_up: dict[int, int],
    h_lo: dict[int, int],
):
    """Assemble the reduct: cocontractions fan the upper boundary into
    both copies, contractions join the lower boundary, and the tilde
    copy's opened cut slot is fused with the hat copy's opened
    interaction slot.  Returns (flow, upper map, lower map)."""
    g = AtomicFlow()
    _, t_edges = _import_flow(g, d_tilde)
    _, h_edges = _import_flow(g, d_hat)
    up_map: dict[int, int] = {}
    lo_map: dict[int, int] = {}
    for eps in flow.top_edges():
        acu = g.add_vertex("acu")
        stub = g.add_edge(TOP, acu, hint=flow.hint(eps))
        g.set_up(t_edges[t_up[eps]], acu)
        g.set_up(h_edges[h_up[eps]], acu)
        up_map[eps] = stub
    for eps in flow.bot_edges():
        acd = g.add_vertex("acd")
        g.set_lo(t_edges[t_lo[eps]], acd)
        g.set_lo(h_edges[h_lo[eps]], acd)
        stub = g.add_edge(acd, BOT, hint=flow.hint(eps))
        lo_map[eps] = stub
    # identify the tilde copy's opened cut slot with the hat copy's opened
    # interaction slot (after the boundary rewiring, so that a partner
    # edge reaching the boundary is already wired to its (co)contraction)
    join_t = t_edges[t_lo[site.partner_lower]]
    join_h = h_edges[h_up[site.partner_upper]]
    g.set_lo(join_t, g.lo(join_h))
    g.remove_edge(join_h)
    report = g.validate()
    if not report.ok:
        raise FlowError(f"stitched flow invalid: {report.condition} ({report.witness})")
    return g, up_map, lo_map


def reduce_se_flow(flow: AtomicFlow, site: SeSite) -> AtomicFlow:
    """One simple-edge elimination: two copies of the flow, minus the
    interaction/cut pair, fanned out of the old boundary and joined
    through a weakening-capped identification edge."""
    identity = {e: e for e in flow.edges()}
    tilde, hat = _split_flows(flow, site)
    g, _, _ = _stitch_flows(flow, site, tilde, identity, identity, hat, identity, identity)
    return g


def _bc_sites(flow: AtomicFlow) -> list[int]:
    cyc = flow.cycles_edges()
    return [e for e in flow.simple_edges() if e in cyc]


def _ex_sites(flow: AtomicFlow) -> list[int]:
    return flow.extremal_simple_edges()


def _reduce_global(flow: AtomicFlow, mode: str, depth: int = 0):
    if depth > MAX_GLOBAL_DEPTH:
        raise ResourceCapExceeded("global reduction recursion too deep")
    if mode == "bc":
        cycles = flow.ai_cycles()
        simple = set(flow.simple_edges())
        fragile = [c for c in cycles if set(c) & simple]
        if len(fragile) != len(cycles):
            raise FlowError("breaking ai-cycles requires every ai-cycle to be fragile")
        sites = _bc_sites(flow)
    else:
        sites = _ex_sites(flow)
    if not sites:
        identity = {e: e for e in flow.edges()}
        return flow, dict(identity), dict(identity)
    site = se_site(flow, min(sites))
    tilde, hat = _split_flows(flow, site)
    d_t, t_up, t_lo = _reduce_global(tilde, mode, depth + 1)
    d_h, h_up, h_lo = _reduce_global(hat, mode, depth + 1)
    g, up_map, lo_map = _stitch_flows(flow, site, d_t, t_up, t_lo, d_h, h_up, h_lo)
    if mode == "bc":
        if not g.is_cycle_free():
            raise FlowError("internal invariant breach: stitching recreated an ai-cycle")
    else:
        # the eliminated edge was extremal, so the identification edge
        # cannot close a new interaction-to-cut connection
        if g.ai_connections():
            raise FlowError("internal invariant breach: stitching created an ai-connection")
    return g, up_map, lo_map


def reduce_bc(flow: AtomicFlow) -> AtomicFlow:
    """Break every ai-cycle of a flow whose cycles are all fragile; the
    result is cycle-free."""
    g, _, _ = _reduce_global(flow, "bc")
    return g


def reduce_ex(flow: AtomicFlow) -> AtomicFlow:
    """Eliminate all extremal simple edges of a cycle-free flow whose
    ai-paths are all clean; the result has no ai-connections."""
    if not flow.is_cycle_free():
        raise FlowError("reduce_ex requires a cycle-free flow")
    g, _, _ = _reduce_global(flow, "ex")
    return g


# ---------------------------------------------------------------------------
# Derivation level.

@dataclass
class _Surfaced:
    deriv: Derivation          # bracketed: premiss (α,t), conclusion [β,f]
    idx_aid: int
    idx_aiu: int
    t_pos: dict[int, Position]
    f_pos: dict[int, Position]
    edge_pos: dict[int, Position]
    lit1: Atom                 # literal of the simple edge
    s_partner: str             # side of the interaction partner in the aid redex
    r_edge: str                # side of the simple edge in the cut redex


def _surface(deriv: Derivation, x: Extraction, edge: int) -> _Surfaced:
    """Rebuild the derivation so that a fresh t travels from the premiss
    straight into the chosen interaction, and the chosen cut's f travels
    straight to the conclusion (then re-extract and locate the edge)."""
    vstep = x.vertex_step()
    U = vstep[x.flow.up(edge)]
    D = vstep[x.flow.lo(edge)]
    steps = deriv.steps
    formulas = deriv.formulas()
    pU = steps[U].position
    pD = steps[D].position

    b = StepBuilder(Con(deriv.premiss, TRUE))
    for i in range(U):
        s = steps[i]
        b._push(s.rule, ("L",) + s.position, Con(s.conclusion, TRUE), eq=s.eq)
    sink_conjunct(b, ROOT, pU)             # φ[pU := (t_old, t_new)]
    b.eq(pU, "comm_con")                   # (t_new, t_old)
    b.eq(pU, "unit_con")                   # t_new at pU
    if b.formula != formulas[U]:
        raise DerivationError("surfacing failed at the interaction")
    idx_aid = len(b.steps) + 1             # +1 for the bracketing eq below
    for i in range(U, D + 1):
        s = steps[i]
        b._push(s.rule, s.position, s.conclusion, eq=s.eq)
    idx_aiu = idx_aid + (D - U)
    float_disjunct(b, ROOT, pD)            # [φ[pD := f_new], f_old]
    for i in range(D + 1, len(steps)):
        s = steps[i]
        b._push(s.rule, ("L",) + s.position, Dis(s.conclusion, FALSE), eq=s.eq)

    inner = b.derivation(Con(deriv.premiss, TRUE))
    eq0 = Step("eq", ROOT, Con(deriv.premiss, TRUE), ("unit_con", False))
    full = Derivation(deriv.premiss, (eq0,) + inner.steps)
    # nb: the closing [β,f] => β equation is added by the caller after the
    # glue; here "full" still concludes [β,f].

    forms = full.formulas()
    t_pos: dict[int, Position] = {1: ("R",)}
    i = 1
    while i < idx_aid:
        nxt = transport_step(forms[i], full.steps[i], t_pos[i])
        if nxt is None:
            raise DerivationError("lost the surfaced t")
        t_pos[i + 1] = nxt
        i += 1
    if t_pos[idx_aid] != full.steps[idx_aid].position:
        raise DerivationError("surfaced t did not reach the interaction")

    f_pos: dict[int, Position] = {idx_aiu + 1: full.steps[idx_aiu].position}
    i = idx_aiu + 1
    while i < len(full.steps):
        nxt = transport_step(forms[i], full.steps[i], f_pos[i])
        if nxt is None:
            raise DerivationError("lost the surfaced f")
        f_pos[i + 1] = nxt
        i += 1
    if f_pos[len(full.steps)] != ("R",):
        raise DerivationError("surfaced f did not reach the conclusion")

    x2 = extract_flow(full)
    v_aid = x2.step_vertex[idx_aid]
    v_aiu = x2.step_vertex[idx_aiu]
    cands = [e for e in x2.flow.lower_edges(v_aid) if x2.flow.lo(e) == v_aiu]
    if not cands:
        raise DerivationError("simple edge vanished during surfacing")
    e1 = min(cands)
    edge_pos = x2.edge_positions(e1)
    pU2 = full.steps[idx_aid].position
    pD2 = full.steps[idx_aiu].position
    lit1 = subformula_at(forms[idx_aid + 1], edge_pos[idx_aid + 1])
    s_edge = edge_pos[idx_aid + 1][len(pU2)]
    r_edge = edge_pos[idx_aiu][len(pD2)]
    return _Surfaced(
        full, idx_aid, idx_aiu, t_pos, f_pos, edge_pos, lit1,
        "L" if s_edge == "R" else "R", r_edge,
    )


def _se_halves(sf: _Surfaced) -> tuple[Derivation, Derivation, Atom]:
    """The two substituted copies of the surfaced derivation: the tilde
    copy turns the interaction into a weakening on the partner atom and
    lets the cut's partner run to the conclusion; the hat copy dually."""
    P = sf.deriv
    steps = P.steps
    forms = P.formulas()
    n = len(steps)
    pU = steps[sf.idx_aid].position
    pD = steps[sf.idx_aiu].position
    lit2 = dual(sf.lit1)

    # ---- tilde: simple edge becomes t, interaction becomes a weakening.
    bt = StepBuilder(forms[1])
    for i in range(1, sf.idx_aid):
        s = steps[i]
        bt._push(s.rule, s.position, s.conclusion, eq=s.eq)
    bt.eq(pU, "unit_dis", forward=False)               # [t, f]
    if sf.s_partner == "L":
        bt.eq(pU, "comm_dis")                          # [f, t]
        bt.awd(pU + ("L",), lit2)
    else:
        bt.awd(pU + ("R",), lit2)
    target = replace_at(forms[sf.idx_aid + 1], sf.edge_pos[sf.idx_aid + 1], TRUE)
    if bt.formula != target:
        raise DerivationError("tilde interaction block mismatch")
    for i in range(sf.idx_aid + 1, sf.idx_aiu):
        s = steps[i]
        bt._push(s.rule, s.position, replace_at(s.conclusion, sf.edge_pos[i + 1], TRUE), eq=s.eq)
    if sf.r_edge == "L":
        bt.eq(pD, "comm_con")
    bt.eq(pD, "unit_con")
    for i in range(sf.idx_aiu + 1, n):
        s = steps[i]
        bt._push(s.rule, s.position, replace_at(s.conclusion, sf.f_pos[i + 1], lit2), eq=s.eq)
    psi_tilde = Derivation(forms[1], tuple(bt.steps))

    # ---- hat: simple edge becomes f, cut becomes a coweakening.
    bh = StepBuilder(replace_at(forms[1], sf.t_pos[1], lit2))
    for i in range(1, sf.idx_aid):
        s = steps[i]
        bh._push(s.rule, s.position, replace_at(s.conclusion, sf.t_pos[i + 1], lit2), eq=s.eq)
    bh.eq(pU, "unit_dis", forward=False)               # [ℓ2, f]
    if sf.s_partner == "R":
        bh.eq(pU, "comm_dis")                          # [f, ℓ2]
    target = replace_at(forms[sf.idx_aid + 1], sf.edge_pos[sf.idx_aid + 1], FALSE)
    if bh.formula != target:
        raise DerivationError("hat interaction block mismatch")
    for i in range(sf.idx_aid + 1, sf.idx_aiu):
        s = steps[i]
        bh._push(s.rule, s.position, replace_at(s.conclusion, sf.edge_pos[i + 1], FALSE), eq=s.eq)
    r3 = "L" if sf.r_edge == "R" else "R"
    bh.awu(pD + (r3,))
    if r3 == "L":
        bh.eq(pD, "comm_con")
    bh.eq(pD, "unit_con")
    if bh.formula != forms[sf.idx_aiu + 1]:
        raise DerivationError("hat cut block mismatch")
    for i in range(sf.idx_aiu + 1, n):
        s = steps[i]
        bh._push(s.rule, s.position, s.conclusion, eq=s.eq)
    psi_hat = Derivation(replace_at(forms[1], sf.t_pos[1], lit2), tuple(bh.steps))
    return psi_tilde, psi_hat, lit2


def _se_glue(premiss: Formula, conclusion: Formula, lit2: Atom,
             d_tilde: Derivation, d_hat: Derivation) -> Derivation:
    """Glue the two halves: cocontract the premiss, run the tilde half on
    the right, super-switch the produced atom across, run the hat half on
    the left, contract the conclusion."""
    xi_t = Con(premiss, TRUE)
    zeta_f = Dis(conclusion, FALSE)
    if d_tilde.premiss != xi_t or d_tilde.conclusion != Dis(conclusion, lit2):
        raise DerivationError("tilde half has unexpected interface")
    if d_hat.premiss != Con(premiss, lit2) or d_hat.conclusion != zeta_f:
        raise DerivationError("hat half has unexpected interface")
    b = StepBuilder(xi_t)
    b.extend(build_generic_contraction(xi_t, down=False).steps)
    b.extend(include_in_context(b.formula, ("R",), d_tilde).steps)
    b.extend(build_super_switch((xi_t, ("R",)), (zeta_f, ("R",)), lit2).steps)
    b.extend(include_in_context(b.formula, ("L",), d_hat).steps)
    b.extend(build_generic_contraction(zeta_f, down=True).steps)
    eq0 = Step("eq", ROOT, xi_t, ("unit_con", False))
    eq_end = Step("eq", ROOT, conclusion, ("unit_dis", True))
    return Derivation(premiss, (eq0,) + tuple(b.steps) + (eq_end,))


def _se_transform(deriv: Derivation, edge: int,
                  recurse: Callable[[Derivation], Derivation],
                  executor=None) -> Derivation:
    x = extract_flow(deriv)
    se_site(x.flow, edge)  # validates that the edge is simple
    sf = _surface(deriv, x, edge)
    psi_tilde, psi_hat, lit2 = _se_halves(sf)
    for half in (psi_tilde, psi_hat):
        report = check(half)
        if not report.ok:
            raise DerivationError(f"simple-edge half invalid: step {report.step}: {report.reason}")
    if executor is not None:
        # the two branches are independent pure computations
        f_tilde = executor.submit(recurse, psi_tilde)
        d_hat = recurse(psi_hat)
        d_tilde = f_tilde.result()
    else:
        d_tilde = recurse(psi_tilde)
        d_hat = recurse(psi_hat)
    out = _se_glue(deriv.premiss, deriv.conclusion, lit2, d_tilde, d_hat)
    report = check(out)
    if not report.ok:
        raise DerivationError(f"simple-edge reduct invalid: step {report.step}: {report.reason}")
    return out


def reduce_se_derivation(deriv: Derivation, edge: int) -> Derivation:
    """Eliminate one simple edge of the derivation's flow; the premiss and
    conclusion are preserved and the new flow is the simple-edge reduct of
    the old one (up to isomorphism)."""
    return _se_transform(deriv, edge, lambda d: d)


def _algorithm_global(deriv: Derivation, mode: str, depth: int = 0, executor=None) -> Derivation:
    if depth > MAX_GLOBAL_DEPTH:
        raise ResourceCapExceeded("global reduction recursion too deep")
    x = extract_flow(deriv)
    if mode == "bc":
        cycles = x.flow.ai_cycles()
        simple = set(x.flow.simple_edges())
        if any(not (set(c) & simple) for c in cycles):
            raise FlowError("breaking ai-cycles requires every ai-cycle to be fragile")
        sites = _bc_sites(x.flow)
    else:
        sites = _ex_sites(x.flow)
    if not sites:
        return deriv
    out = _se_transform(
        deriv,
        min(sites),
        lambda d: _algorithm_global(d, mode, depth + 1, executor),
        executor=executor if depth == 0 else None,
    )
    if depth == 0:
        flow = extract_flow(out).flow
        if mode == "bc" and not flow.is_cycle_free():
            raise FlowError("internal invariant breach: cycles survived breaking")
        if mode == "ex" and flow.ai_connections():
            raise FlowError("internal invariant breach: ai-connections survived elimination")
    return out


def algorithm_bc(deriv: Derivation, jobs: int = 1) -> Derivation:
    """Break ai-cycles: make every cycle fragile by bouncing negative
    (co)contractions, then recursively eliminate in-cycle simple edges.
    The output checks, has the same premiss and conclusion, and its flow
    is cycle-free."""
    from .local_rules import make_fragile_derivation

    deriv, _ = make_fragile_derivation(deriv)
    return _run_global(deriv, "bc", jobs)


def algorithm_ex(deriv: Derivation, jobs: int = 1) -> Derivation:
    """Eliminate ai-connections of a derivation with a cycle-free flow:
    normalise for the contraction system (making every ai-path clean),
    then recursively eliminate extremal simple edges."""
    from .local_rules import normalize_c_derivation

    x = extract_flow(deriv)
    if not x.flow.is_cycle_free():
        raise FlowError("algorithm_ex requires a cycle-free flow")
    deriv, _ = normalize_c_derivation(deriv)
    return _run_global(deriv, "ex", jobs)


def _run_global(deriv: Derivation, mode: str, jobs: int) -> Derivation:
    if jobs <= 1:
        return _algorithm_global(deriv, mode)
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=jobs) as executor:
        return _algorithm_global(deriv, mode, executor=executor)
