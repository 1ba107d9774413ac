"""The ten local flow reduction rules, the rewriting systems w and c,
fragile-cycle creation, and the lifting of every rule to a sound
derivation transformation.

Every rule rewrites a two-vertex pattern connected by one edge; matching
is therefore a scan over edges classified by the labels of their
endpoints.  Applying a rule keeps the ids of all untouched vertices and
edges, which lets polarity assignments be transported through rewrites.

The derivation-level lift of a rule removes the two structural steps,
substitutes a unit or a small formula through the tracked occurrence of
the connecting edge, and splices in a fixed replacement block; the
premiss and the conclusion of the derivation are untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .formula import Atom, Con, Dis, FALSE, Formula, Position, TRUE, dual, replace_at, subformula_at
from .derivation import (
    Derivation,
    DerivationError,
    StepBuilder,
    check,
)
from .flow import AtomicFlow, FlowError, ResourceCapExceeded
from .bridge import Extraction, extract_flow

# name -> (label of the upper endpoint, label of the lower endpoint)
RULE_PAIRS = {
    "wd_cd": ("awd", "acd"),
    "cu_wu": ("acu", "awu"),
    "wd_iu": ("awd", "aiu"),
    "id_wu": ("aid", "awu"),
    "wd_wu": ("awd", "awu"),
    "wd_cu": ("awd", "acu"),
    "cd_wu": ("acd", "awu"),
    "cd_iu": ("acd", "aiu"),
    "id_cu": ("aid", "acu"),
    "cd_cu": ("acd", "acu"),
}

RULE_ORDER = ("wd_cd", "cu_wu", "wd_iu", "id_wu", "wd_wu", "wd_cu", "cd_wu", "cd_iu", "id_cu", "cd_cu")
W_SYSTEM = ("wd_cd", "cu_wu", "wd_iu", "id_wu", "wd_wu", "wd_cu", "cd_wu")
C_SYSTEM = ("cd_iu", "id_cu", "cd_cu")


@dataclass(frozen=True)
class FlowMatch:
    rule: str
    v_up: int
    v_lo: int
    edge: int


@dataclass
class RewriteStep:
    rule: str
    site: tuple[int, int]
    edge: int
    measure_before: object
    measure_after: object

    def to_dict(self):
        return {
            "rule": self.rule,
            "site": list(self.site),
            "edge": self.edge,
            "measure_before": self.measure_before,
            "measure_after": self.measure_after,
        }


def find_matches(flow: AtomicFlow, rule: str) -> list[FlowMatch]:
    up_lab, lo_lab = RULE_PAIRS[rule]
    out = []
    for e in flow.edges():
        u, l = flow.up(e), flow.lo(e)
        if u in flow.vertices() and l in flow.vertices():
            if flow.label(u) == up_lab and flow.label(l) == lo_lab:
                out.append(FlowMatch(rule, u, l, e))
    return sorted(out, key=lambda m: (m.v_up, m.v_lo, m.edge))


def first_match(flow: AtomicFlow, rules=RULE_ORDER) -> Optional[FlowMatch]:
    """Deterministic selection: lowest vertex id first, then the fixed
    rule order, then lowest edge id."""
    best = None
    best_key = None
    for idx, rule in enumerate(rules):
        for m in find_matches(flow, rule):
            key = (min(m.v_up, m.v_lo), idx, m.edge)
            if best_key is None or key < best_key:
                best, best_key = m, key
    return best


def _other(edges: list[int], e: int) -> int:
    rest = [x for x in edges if x != e]
    if len(rest) != 1:
        raise FlowError("pattern arity broken")
    return rest[0]


def apply_rule(flow: AtomicFlow, match: FlowMatch) -> AtomicFlow:
    """Replace the matched pattern; ids outside the match are preserved."""
    g = flow.copy()
    r, vu, vl, e = match.rule, match.v_up, match.v_lo, match.edge
    if (
        e not in g.edges()
        or vu not in g.vertices()
        or vl not in g.vertices()
        or g.up(e) != vu
        or g.lo(e) != vl
        or RULE_PAIRS[r] != (g.label(vu), g.label(vl))
    ):
        raise FlowError("stale match")
    hint = g.hint(e)
    if r == "wd_cd":
        u1 = _other(g.upper_edges(vl), e)
        (l1,) = g.lower_edges(vl)
        g.set_lo(u1, g.lo(l1))
        g.remove_edge(l1)
    elif r == "cu_wu":
        (u1,) = g.upper_edges(vu)
        l1 = _other(g.lower_edges(vu), e)
        g.set_lo(u1, g.lo(l1))
        g.remove_edge(l1)
    elif r == "wd_iu":
        o = _other(g.upper_edges(vl), e)
        w = g.add_vertex("awu")
        g.set_lo(o, w)
    elif r == "id_wu":
        o = _other(g.lower_edges(vu), e)
        w = g.add_vertex("awd")
        g.set_up(o, w)
    elif r == "wd_wu":
        pass
    elif r == "wd_cu":
        l1, l2 = g.lower_edges(vl)
        g.set_up(l1, g.add_vertex("awd"))
        g.set_up(l2, g.add_vertex("awd"))
    elif r == "cd_wu":
        u1, u2 = g.upper_edges(vu)
        g.set_lo(u1, g.add_vertex("awu"))
        g.set_lo(u2, g.add_vertex("awu"))
    elif r == "cd_iu":
        u1, u2 = g.upper_edges(vu)
        o = _other(g.upper_edges(vl), e)
        w = g.add_vertex("acu")
        z1 = g.add_vertex("aiu")
        z2 = g.add_vertex("aiu")
        g.set_lo(o, w)
        g.add_edge(w, z1, hint=hint)
        g.add_edge(w, z2, hint=hint)
        g.set_lo(u1, z1)
        g.set_lo(u2, z2)
    elif r == "id_cu":
        l1, l2 = g.lower_edges(vl)
        o = _other(g.lower_edges(vu), e)
        w = g.add_vertex("acd")
        z1 = g.add_vertex("aid")
        z2 = g.add_vertex("aid")
        g.set_up(o, w)
        g.add_edge(z1, w, hint=hint)
        g.add_edge(z2, w, hint=hint)
        g.set_up(l1, z1)
        g.set_up(l2, z2)
    elif r == "cd_cu":
        u1, u2 = g.upper_edges(vu)
        l1, l2 = g.lower_edges(vl)
        w1 = g.add_vertex("acu")
        w2 = g.add_vertex("acu")
        y1 = g.add_vertex("acd")
        y2 = g.add_vertex("acd")
        g.set_lo(u1, w1)
        g.set_lo(u2, w2)
        g.add_edge(w1, y1, hint=hint)
        g.add_edge(w1, y2, hint=hint)
        g.add_edge(w2, y1, hint=hint)
        g.add_edge(w2, y2, hint=hint)
        g.set_up(l1, y1)
        g.set_up(l2, y2)
    else:
        raise FlowError(f"unknown rule {r!r}")
    g.remove_edge(e)
    g.remove_vertex(vu)
    g.remove_vertex(vl)
    report = g.validate()
    if not report.ok:
        raise FlowError(f"rewrite produced an invalid flow: {report.condition}")
    return g


def _w_measure(flow: AtomicFlow):
    counts = flow.label_counts()
    return (len(flow.vertices()), counts.get("acd", 0) + counts.get("acu", 0))


def normalize_w(flow: AtomicFlow, max_steps: int = 100_000):
    """Exhaustively apply the weakening system; the trace shows the
    (vertex count, contraction count) measure decreasing lexicographically
    at every step."""
    g = flow
    trace: list[RewriteStep] = []
    while True:
        m = first_match(g, W_SYSTEM)
        if m is None:
            return g, trace
        before = _w_measure(g)
        g2 = apply_rule(g, m)
        after = _w_measure(g2)
        if not after < before:
            raise FlowError("w measure failed to decrease")
        trace.append(RewriteStep(m.rule, (m.v_up, m.v_lo), m.edge, before, after))
        g = g2
        if len(trace) > max_steps:
            raise ResourceCapExceeded("normalize_w exceeded its step cap")


def normalize_c(flow: AtomicFlow, max_steps: int = 100_000):
    """Exhaustively apply the contraction system.  Refuses flows with
    ai-cycles, on which the system does not terminate; the trace shows
    the total rank strictly decreasing."""
    if not flow.is_cycle_free():
        raise FlowError("normalize_c requires a cycle-free flow")
    g = flow
    trace: list[RewriteStep] = []
    while True:
        m = first_match(g, C_SYSTEM)
        if m is None:
            return g, trace
        before = g.total_rank()
        g2 = apply_rule(g, m)
        after = g2.total_rank()
        if not after < before:
            raise FlowError("c rank failed to decrease")
        trace.append(RewriteStep(m.rule, (m.v_up, m.v_lo), m.edge, before, after))
        g = g2
        if len(trace) > max_steps:
            raise ResourceCapExceeded("normalize_c exceeded its step cap")


@dataclass
class FragileStep:
    rule: str
    site: tuple[int, int]
    edge: int
    flow_before: AtomicFlow

    def to_dict(self):
        return {"rule": self.rule, "site": list(self.site), "edge": self.edge}


def _fragile_match(flow: AtomicFlow, pi: dict[int, str]) -> Optional[FlowMatch]:
    """A c-rule match bouncing a negative (co)contraction that has an
    edge on an ai-cycle; None when no such vertex remains."""
    cyc = flow.cycles_edges()
    targets = []
    for v in flow.vertices():
        lab = flow.label(v)
        if lab not in ("acd", "acu"):
            continue
        if any(pi[e] == "-" and e in cyc for e in flow.edges_of(v)):
            targets.append(v)
    if not targets:
        return None
    for v in sorted(targets):
        if flow.label(v) == "acd":
            (down,) = flow.lower_edges(v)
            below = flow.lo(down)
            if below in flow.vertices():
                lab = flow.label(below)
                if lab == "aiu":
                    return FlowMatch("cd_iu", v, below, down)
                if lab == "acu":
                    return FlowMatch("cd_cu", v, below, down)
        else:
            (up,) = flow.upper_edges(v)
            above = flow.up(up)
            if above in flow.vertices():
                lab = flow.label(above)
                if lab == "aid":
                    return FlowMatch("id_cu", above, v, up)
                if lab == "acd":
                    return FlowMatch("cd_cu", above, v, up)
    raise FlowError("negative in-cycle (co)contraction without an adjacent c-redex")


def make_cycles_fragile(flow: AtomicFlow, cap: Optional[int] = None):
    """Rewrite by the contraction system, at negative (co)contraction
    vertices lying on ai-cycles, until all such vertices are positive;
    afterwards every ai-cycle contains a (negative) simple edge.  The
    polarity assignment is fixed once and transported through every
    rewrite.  Returns (flow, trace, final polarity)."""
    g = flow
    pi = g.polarity_first()
    if cap is None:
        cap = 10 * max(len(g.edges()), 4) ** 2
    trace: list[FragileStep] = []
    while True:
        m = _fragile_match(g, pi)
        if m is None:
            return g, trace, pi
        if len(trace) >= cap:
            raise ResourceCapExceeded(f"make_cycles_fragile exceeded its step cap {cap}")
        trace.append(FragileStep(m.rule, (m.v_up, m.v_lo), m.edge, g))
        g2 = apply_rule(g, m)
        known = {e: pi[e] for e in g2.edges() if e in pi}
        pi = g2.extend_polarity(known)
        g = g2


# ---------------------------------------------------------------------------
# Lifting local rules to derivations.

def _locate(deriv: Derivation, x: Extraction, match: FlowMatch):
    vstep = x.vertex_step()
    if match.v_up not in vstep or match.v_lo not in vstep:
        raise DerivationError("match does not correspond to this derivation's extraction")
    U, D = vstep[match.v_up], vstep[match.v_lo]
    if not U < D:
        raise DerivationError("matched steps out of order")
    epos = x.edge_positions(match.edge)
    for i in range(U + 1, D + 1):
        if i not in epos:
            raise DerivationError("tracked edge missing from a formula in its lifetime")
    return U, D, epos


def _side(parent: Position, child: Position) -> str:
    if child[: len(parent)] != parent or len(child) != len(parent) + 1:
        raise DerivationError("occurrence is not a direct child of the redex")
    return child[len(parent)]


def lift_local(deriv: Derivation, match: FlowMatch, extraction: Optional[Extraction] = None) -> Derivation:
    """Transform the derivation so that its flow is the match's reduct,
    keeping premiss and conclusion.  The two matched structural steps are
    replaced and the connecting atom occurrence is substituted through
    every formula in between."""
    x = extraction if extraction is not None else extract_flow(deriv)
    U, D, epos = _locate(deriv, x, match)
    steps = deriv.steps
    formulas = deriv.formulas()
    pU = steps[U].position
    pD = steps[D].position
    lit = subformula_at(formulas[U + 1], epos[U + 1])
    if not isinstance(lit, Atom):
        raise DerivationError("tracked occurrence is not an atom")
    rule = match.rule

    if rule in ("wd_cd", "wd_iu", "wd_wu", "wd_cu"):
        repl: Formula = FALSE
    elif rule in ("cu_wu", "id_wu", "cd_wu"):
        repl = TRUE
    elif rule in ("cd_iu", "cd_cu"):
        repl = Dis(lit, lit)
    else:  # id_cu
        repl = Con(lit, lit)

    def subst(i: int) -> Formula:
        return replace_at(formulas[i], epos[i], repl)

    b = StepBuilder(formulas[U])

    # upper block: replaces step U, ending at subst(U + 1)
    if rule in ("wd_cd", "wd_iu", "wd_wu", "wd_cu"):
        pass  # the weakening step is dropped; f is already in place
    elif rule == "cu_wu":
        b.eq(pU, "unit_con", forward=False)
        if _side(pU, epos[U + 1]) == "L":
            b.eq(pU, "comm_con")
    elif rule == "id_wu":
        b.eq(pU, "unit_dis", forward=False)            # [t,f]
        if _side(pU, epos[U + 1]) == "L":
            b.awd(pU + ("R",), dual(lit))              # [t,ȳ]
        else:
            b.eq(pU, "comm_dis")                       # [f,t]
            b.awd(pU + ("L",), dual(lit))              # [ȳ,t]
    elif rule == "cd_wu":
        b.awu(pU + ("R",))
        b.awu(pU + ("L",))
        b.eq(pU, "tt_dis")
    elif rule in ("cd_iu", "cd_cu"):
        pass  # the contraction step is dropped; [x,x] is already in place
    else:  # id_cu
        side = _side(pU, epos[U + 1])
        b.aid(pU, lit)                                 # [x,x̄]
        b.eq(pU + ("L",), "unit_con", forward=False)   # [(x,t),x̄]
        b.aid(pU + ("L", "R"), lit)                    # [(x,[x,x̄]),x̄]
        b.s(pU + ("L",))                               # [[(x,x),x̄],x̄]
        b.eq(pU, "assoc_dis", forward=True)            # [(x,x),[x̄,x̄]]
        b.acd(pU + ("R",))                             # [(x,x),x̄]
        if side == "R":
            b.eq(pU, "comm_dis")                       # [x̄,(x,x)]
    if b.formula != subst(U + 1):
        raise DerivationError(f"lift {rule}: upper block mismatch")

    for i in range(U + 1, D):
        s = steps[i]
        b._push(s.rule, s.position, subst(i + 1), eq=s.eq)

    # lower block: replaces step D, ending at the original formulas[D + 1]
    if rule == "wd_cd":
        if _side(pD, epos[D]) == "L":
            b.eq(pD, "comm_dis")
        b.eq(pD, "unit_dis")
    elif rule in ("cu_wu", "id_wu"):
        pass  # the coweakening step is dropped; t is already in place
    elif rule == "wd_iu":
        if _side(pD, epos[D]) == "L":
            b.awu(pD + ("R",))                         # (f,t)
        else:
            b.awu(pD + ("L",))                         # (t,f)
            b.eq(pD, "comm_con")                       # (f,t)
        b.eq(pD, "unit_con")
    elif rule == "wd_wu":
        b.eq(pD, "unit_con", forward=False)            # (f,t)
        b.eq(pD + ("R",), "unit_dis", forward=False)   # (f,[t,f])
        b.eq(pD + ("R",), "comm_dis")                  # (f,[f,t])
        b.s(pD)                                        # [(f,f),t]
        b.eq(pD + ("L",), "ff_con")                    # [f,t]
        b.eq(pD, "comm_dis")
        b.eq(pD, "unit_dis")                           # t
    elif rule == "wd_cu":
        conc = subformula_at(formulas[D + 1], pD)
        b.eq(pD, "ff_con", forward=False)              # (f,f)
        b.awd(pD + ("L",), conc.left)
        b.awd(pD + ("R",), conc.right)
    elif rule == "cd_wu":
        pass
    elif rule == "cd_iu":
        if _side(pD, epos[D]) == "R":
            b.eq(pD, "comm_con")                       # ([x,x],x̄)
        b.acu(pD + ("R",))                             # ([x,x],(x̄,x̄))
        b.eq(pD, "comm_con")                           # ((x̄,x̄),[x,x])
        b.eq(pD, "assoc_con", forward=True)            # (x̄,(x̄,[x,x]))
        b.eq(pD, "comm_con")                           # ((x̄,[x,x]),x̄)
        b.s(pD + ("L",))                               # ([(x̄,x),x],x̄)
        b.aiu(pD + ("L", "L"))                         # ([f,x],x̄)
        b.eq(pD + ("L",), "comm_dis")
        b.eq(pD + ("L",), "unit_dis")                  # (x,x̄)
        b.aiu(pD)                                      # f
    elif rule == "id_cu":
        pass
    else:  # cd_cu
        b.acu(pD + ("R",))                             # [x,(x,x)]
        b.acu(pD + ("L",))                             # [(x,x),(x,x)]
        b.m(pD)                                        # ([x,x],[x,x])
        b.acd(pD + ("L",))                             # (x,[x,x])
        b.acd(pD + ("R",))                             # (x,x)
    if b.formula != formulas[D + 1]:
        raise DerivationError(f"lift {rule}: lower block mismatch")

    out = Derivation(deriv.premiss, steps[:U] + tuple(b.steps) + steps[D + 1:])
    report = check(out)
    if not report.ok:
        raise DerivationError(f"lift {rule}: produced invalid derivation: {report.reason}")
    return out


# ---------------------------------------------------------------------------
# Lifted rewriting loops.

def normalize_w_derivation(deriv: Derivation, max_steps: int = 100_000):
    trace = []
    while True:
        x = extract_flow(deriv)
        m = first_match(x.flow, W_SYSTEM)
        if m is None:
            return deriv, trace
        before = _w_measure(x.flow)
        deriv = lift_local(deriv, m, x)
        after = _w_measure(extract_flow(deriv).flow)
        trace.append(RewriteStep(m.rule, (m.v_up, m.v_lo), m.edge, before, after))
        if len(trace) > max_steps:
            raise ResourceCapExceeded("normalize_w_derivation exceeded its step cap")


def normalize_c_derivation(deriv: Derivation, max_steps: int = 100_000):
    x = extract_flow(deriv)
    if not x.flow.is_cycle_free():
        raise FlowError("normalize_c requires a cycle-free flow")
    trace = []
    while True:
        x = extract_flow(deriv)
        m = first_match(x.flow, C_SYSTEM)
        if m is None:
            return deriv, trace
        before = x.flow.total_rank()
        deriv = lift_local(deriv, m, x)
        after = extract_flow(deriv).flow.total_rank()
        if not after < before:
            raise FlowError("c rank failed to decrease")
        trace.append(RewriteStep(m.rule, (m.v_up, m.v_lo), m.edge, before, after))
        if len(trace) > max_steps:
            raise ResourceCapExceeded("normalize_c_derivation exceeded its step cap")


def _translate_match(m: FlowMatch, flow_before: AtomicFlow, target: AtomicFlow) -> FlowMatch:
    iso = flow_before.isomorphic(target)
    if iso is None:
        raise FlowError("flow mirror lost isomorphism")
    return FlowMatch(m.rule, iso["vertices"][m.v_up], iso["vertices"][m.v_lo], iso["edges"][m.edge])


def make_fragile_derivation(deriv: Derivation):
    """Mirror make_cycles_fragile on a derivation: the rewrite sequence is
    computed at the flow level (where the polarity assignment can be
    transported exactly), and each step is translated onto the current
    extraction through an isomorphism before lifting."""
    x = extract_flow(deriv)
    _, trace, _ = make_cycles_fragile(x.flow)
    for entry in trace:
        x = extract_flow(deriv)
        m = _translate_match(
            FlowMatch(entry.rule, entry.site[0], entry.site[1], entry.edge),
            entry.flow_before,
            x.flow,
        )
        deriv = lift_local(deriv, m, x)
    return deriv, trace
