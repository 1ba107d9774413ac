"""Bridging derivations and atomic flows.

``extract_flow`` computes the unique flow of a checked derivation by
tracing atom occurrences through every step: structural steps become
vertices, linear steps (s, m, eq) leave no trace.

``sequentialize`` inverts the mapping up to isomorphism: it peels one
topmost vertex at a time, realises it as a one-step derivation, and glues
it onto the recursively built remainder with super switches and a fixed
{s, m, eq} block, producing tautology-shaped premisses and conclusions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .formula import (
    Atom,
    Con,
    Dis,
    FALSE,
    Formula,
    Position,
    ROOT,
    TRUE,
    atom_positions,
    replace_at,
    subformula_at,
)
from .derivation import (
    Derivation,
    DerivationError,
    StepBuilder,
    build_super_switch,
    check,
    compose,
    expand_from_unit,
    include_in_context,
    transport_step,
)
from .flow import BOT, TOP, AtomicFlow, FlowError


@dataclass
class Extraction:
    """The flow of a derivation together with the occurrence map: for every
    formula (index 0 is the premiss) the total map from its atom positions
    to edge ids, and the vertex created by each structural step."""

    flow: AtomicFlow
    occ: list[dict[Position, int]]
    step_vertex: dict[int, int]

    def vertex_step(self) -> dict[int, int]:
        return {v: i for i, v in self.step_vertex.items()}

    def edge_positions(self, eid: int) -> dict[int, Position]:
        """formula index -> position of the (unique) occurrence of an edge."""
        out: dict[int, Position] = {}
        for i, table in enumerate(self.occ):
            for pos, e in table.items():
                if e == eid:
                    out[i] = pos
        return out


def extract_flow(deriv: Derivation) -> Extraction:
    report = check(deriv)
    if not report.ok:
        raise DerivationError(f"cannot extract from invalid derivation: step {report.step}: {report.reason}")
    flow = AtomicFlow()
    occ_list: list[dict[Position, int]] = []
    step_vertex: dict[int, int] = {}

    cur: dict[Position, int] = {}
    for pos, atom in atom_positions(deriv.premiss):
        cur[pos] = flow.add_edge(TOP, BOT, hint=atom.name)
    occ_list.append(dict(cur))

    formulas = deriv.formulas()
    for i, step in enumerate(deriv.steps):
        premiss = formulas[i]
        rpos = step.position
        rule = step.rule
        nxt: dict[Position, int] = {}
        if rule in ("s", "m", "eq"):
            for q, e in cur.items():
                q2 = transport_step(premiss, step, q)
                if q2 is None:
                    raise DerivationError("linear step destroyed an occurrence")
                nxt[q2] = e
        else:
            vid = flow.add_vertex(rule)
            step_vertex[i] = vid
            for q, e in cur.items():
                if q[: len(rpos)] != rpos:
                    nxt[q] = e
            if rule == "aid":
                pair = subformula_at(step.conclusion, rpos)
                nxt[rpos + ("L",)] = flow.add_edge(vid, BOT, hint=pair.left.name)
                nxt[rpos + ("R",)] = flow.add_edge(vid, BOT, hint=pair.left.name)
            elif rule == "awd":
                atom = subformula_at(step.conclusion, rpos)
                nxt[rpos] = flow.add_edge(vid, BOT, hint=atom.name)
            elif rule == "aiu":
                flow.set_lo(cur[rpos + ("L",)], vid)
                flow.set_lo(cur[rpos + ("R",)], vid)
            elif rule == "awu":
                flow.set_lo(cur[rpos], vid)
            elif rule == "acd":
                flow.set_lo(cur[rpos + ("L",)], vid)
                flow.set_lo(cur[rpos + ("R",)], vid)
                atom = subformula_at(step.conclusion, rpos)
                nxt[rpos] = flow.add_edge(vid, BOT, hint=atom.name)
            elif rule == "acu":
                flow.set_lo(cur[rpos], vid)
                atom = subformula_at(premiss, rpos)
                nxt[rpos + ("L",)] = flow.add_edge(vid, BOT, hint=atom.name)
                nxt[rpos + ("R",)] = flow.add_edge(vid, BOT, hint=atom.name)
        cur = nxt
        occ_list.append(dict(cur))
    return Extraction(flow, occ_list, step_vertex)


# ---------------------------------------------------------------------------
# Sequentialisation.

def _fresh_name(used: set[str], k: int) -> str:
    while f"a{k}" in used:
        k += 1
    return f"a{k}"


def edge_literals(flow: AtomicFlow) -> dict[int, Atom]:
    """A literal for every edge, compatible with all vertices: one atom
    name per connected component (the edge's hint when consistent, else a
    generated name), negation from the canonical polarity assignment."""
    pi = flow.polarity_first()
    lits: dict[int, Atom] = {}
    used: set[str] = set()
    for idx, comp in enumerate(flow.components(), start=1):
        hints = {flow.hint(e) for e in comp}
        name = None
        if len(hints) == 1:
            h = next(iter(hints))
            if h and h not in ("t", "f"):
                name = h
        if name is None:
            name = _fresh_name(used, idx)
        used.add(name)
        for e in comp:
            lits[e] = Atom(name, negated=(pi[e] == "-"))
    return lits


def _psi_glue(b: StepBuilder) -> None:
    """[[α,β],t]  =>  [(α,β),t]   using only {s, m, eq}."""
    b.eq(("L", "L"), "unit_con", forward=False)
    b.eq(("L", "R"), "unit_con", forward=False)
    b.eq(("L", "R"), "comm_con")
    b.m(("L",))
    b.eq(("L", "R"), "comm_dis")
    b.s(("L",))
    b.eq(ROOT, "assoc_dis", forward=True)
    b.eq(("R",), "tt_dis")
    b.eq(("L",), "comm_con")
    b.s(("L",))
    b.eq(ROOT, "assoc_dis", forward=True)
    b.eq(("R",), "tt_dis")
    b.eq(("L",), "comm_con")


def _single_vertex_block(label: str, lits_lower: list[Atom], lits_upper: list[Atom]):
    """A one-step derivation for one vertex.  Returns (derivation,
    premiss positions of the upper edges, conclusion positions of the
    lower edges)."""
    if label == "aid":
        x = lits_lower[0]
        b = StepBuilder(TRUE).aid(ROOT, x)
        return b.derivation(TRUE), [], [("L",), ("R",)]
    if label == "awd":
        b = StepBuilder(FALSE).awd(ROOT, lits_lower[0])
        return b.derivation(FALSE), [], [()]
    if label == "acd":
        x = lits_upper[0]
        start = Dis(x, x)
        b = StepBuilder(start).acd(ROOT)
        return b.derivation(start), [("L",), ("R",)], [()]
    if label == "acu":
        x = lits_upper[0]
        b = StepBuilder(x).acu(ROOT)
        return b.derivation(x), [()], [("L",), ("R",)]
    if label == "aiu":
        start = Con(lits_upper[0], lits_upper[1])
        b = StepBuilder(start).aiu(ROOT)
        return b.derivation(start), [("L",), ("R",)], []
    if label == "awu":
        x = lits_upper[0]
        b = StepBuilder(x).awu(ROOT)
        return b.derivation(x), [()], []
    raise FlowError(f"unknown label {label!r}")


def _sequentialize(flow: AtomicFlow, lits: dict[int, Atom]):
    """Returns (derivation, premiss positions, conclusion positions),
    the position maps keyed by the flow's top/bot edge ids."""
    if not flow.vertices():
        edges = flow.top_edges()
        if not edges:
            return Derivation(TRUE), {}, {}
        pos: dict[int, Position] = {}
        prefix: Position = ROOT
        for i, e in enumerate(edges):
            last = i == len(edges) - 1
            pos[e] = prefix if last else prefix + ("L",)
            prefix = prefix + ("R",)
        delta: Formula = lits[edges[-1]]
        for e in reversed(edges[:-1]):
            delta = Dis(lits[e], delta)
        return Derivation(delta), dict(pos), dict(pos)

    candidates = [
        v for v in flow.vertices()
        if all(flow.up(e) == TOP for e in flow.upper_edges(v))
    ]
    v = candidates[0]
    upper = flow.upper_edges(v)
    lower = flow.lower_edges(v)

    phi_b, upper_pos, lower_pos = _single_vertex_block(
        flow.label(v), [lits[e] for e in lower], [lits[e] for e in upper]
    )

    rest = flow.copy()
    rest.remove_vertex(v)
    for e in upper:
        rest.remove_edge(e)
    for e in lower:
        rest.set_up(e, TOP)

    phi_c, prem_c, concl_c = _sequentialize(rest, lits)

    xi_tt = phi_c.premiss
    for e in lower:
        xi_tt = replace_at(xi_tt, prem_c[e], TRUE)

    start = Dis(Con(xi_tt, phi_b.premiss), TRUE)
    b = StepBuilder(start)
    b.extend(include_in_context(b.formula, ("L", "R"), phi_b).steps)

    zeta_pos = {e: p for e, p in zip(lower, lower_pos)}
    for e in lower:
        xi_part = subformula_at(b.formula, ("L", "L"))
        zeta_part = subformula_at(b.formula, ("L", "R"))
        ss = build_super_switch((xi_part, prem_c[e]), (zeta_part, zeta_pos[e]), lits[e])
        b.extend(include_in_context(b.formula, ("L",), ss).steps)
        _psi_glue(b)

    b.extend(include_in_context(b.formula, ("L", "L"), phi_c).steps)

    deriv = b.derivation(start)
    prem_pos: dict[int, Position] = {}
    for e in flow.top_edges():
        if e in upper:
            prem_pos[e] = ("L", "R") + upper_pos[upper.index(e)]
        else:
            prem_pos[e] = ("L", "L") + prem_c[e]
    concl_pos = {e: ("L", "L") + concl_c[e] for e in flow.bot_edges()}
    return deriv, prem_pos, concl_pos


def sequentialize(flow: AtomicFlow) -> Derivation:
    """A derivation whose extracted flow is isomorphic to the input.
    Premiss and conclusion are not prescribed; they come out
    tautology-shaped, as the construction requires."""
    report = flow.validate()
    if not report.ok:
        raise FlowError(f"invalid flow: {report.condition} ({report.witness})")
    lits = edge_literals(flow)
    deriv, _, _ = _sequentialize(flow, lits)
    return deriv


# ---------------------------------------------------------------------------
# Seeded random generation.

DEFAULT_WEIGHTS = {"aid": 3, "aiu": 3, "awd": 2, "awu": 2, "acd": 3, "acu": 3}


def random_flow(
    seed: int,
    vertices: int = 8,
    roots: int = 2,
    weights: Optional[dict[str, int]] = None,
) -> AtomicFlow:
    """A seed-deterministic valid flow, built by growing signed dangling
    edges downwards (so the polarity condition holds by construction)."""
    rng = random.Random(seed)
    weights = dict(weights or DEFAULT_WEIGHTS)
    flow = AtomicFlow()
    open_edges: list[tuple[int, str]] = []
    for _ in range(roots):
        open_edges.append((flow.add_edge(TOP, BOT), rng.choice("+-")))

    for _ in range(vertices):
        signs = [s for _, s in open_edges]
        feasible = ["aid", "awd"]
        if open_edges:
            feasible += ["awu", "acu"]
        if signs.count("+") >= 2 or signs.count("-") >= 2:
            feasible.append("acd")
        if "+" in signs and "-" in signs:
            feasible.append("aiu")
        label = rng.choices(feasible, [weights.get(l, 1) for l in feasible])[0]

        def take(pred) -> tuple[int, str]:
            options = [p for p in open_edges if pred(p)]
            pick = rng.choice(options)
            open_edges.remove(pick)
            return pick

        if label == "aid":
            v = flow.add_vertex("aid")
            open_edges.append((flow.add_edge(v, BOT), "+"))
            open_edges.append((flow.add_edge(v, BOT), "-"))
        elif label == "awd":
            v = flow.add_vertex("awd")
            open_edges.append((flow.add_edge(v, BOT), rng.choice("+-")))
        elif label == "awu":
            v = flow.add_vertex("awu")
            e, _ = take(lambda p: True)
            flow.set_lo(e, v)
        elif label == "acu":
            v = flow.add_vertex("acu")
            e, s = take(lambda p: True)
            flow.set_lo(e, v)
            open_edges.append((flow.add_edge(v, BOT), s))
            open_edges.append((flow.add_edge(v, BOT), s))
        elif label == "acd":
            s = rng.choice([x for x in "+-" if signs.count(x) >= 2])
            v = flow.add_vertex("acd")
            e1, _ = take(lambda p: p[1] == s)
            e2, _ = take(lambda p: p[1] == s)
            flow.set_lo(e1, v)
            flow.set_lo(e2, v)
            open_edges.append((flow.add_edge(v, BOT), s))
        else:  # aiu
            v = flow.add_vertex("aiu")
            e1, _ = take(lambda p: p[1] == "+")
            e2, _ = take(lambda p: p[1] == "-")
            flow.set_lo(e1, v)
            flow.set_lo(e2, v)
    return flow


def random_derivation(
    seed: int,
    vertices: int = 6,
    roots: int = 2,
    weights: Optional[dict[str, int]] = None,
) -> Derivation:
    """A seed-deterministic checked derivation (a sequentialised random
    flow)."""
    return sequentialize(random_flow(seed, vertices=vertices, roots=roots, weights=weights))


def random_proof(seed: int, vertices: int = 6, require_cut: bool = True) -> Derivation:
    """A seed-deterministic SKS proof (premiss t).  Built from a random
    flow without top edges, whose sequentialisation therefore has a
    units-only premiss, then grounded at t by eq steps."""
    for attempt in range(200):
        flow = random_flow(seed * 1009 + attempt, vertices=max(vertices, 1), roots=0)
        if not flow.vertices():
            continue
        if require_cut and flow.label_counts().get("aiu", 0) == 0:
            continue
        deriv = sequentialize(flow)
        return compose(expand_from_unit(deriv.premiss), deriv)
    raise FlowError("could not generate a proof with the requested shape")
