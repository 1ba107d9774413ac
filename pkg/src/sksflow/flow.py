"""Atomic flows: labelled DAGs tracing the creation, duplication and
destruction of atom occurrences.

A flow has six vertex labels (aid, aiu, awd, awu, acd, acu) with fixed
arities, two special boundary vertices ``top`` and ``bot`` that are not
part of the vertex set, an acyclicity condition, and a polarity
condition: edges can be two-coloured so that (co)contractions are
monochrome and (co)interactions bichrome.

Edge incidences are ordered by edge id; that ordering is used for
deterministic output only and is ignored by isomorphism.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional

TOP = "top"
BOT = "bot"

LABELS = ("aid", "aiu", "awd", "awu", "acd", "acu")

# (number of lower edges, number of upper edges) per label; lower edges of
# a vertex leave it downwards (their up-end is the vertex), upper edges
# arrive from above (their lo-end is the vertex).
ARITY = {
    "aid": (2, 0),
    "aiu": (0, 2),
    "awd": (1, 0),
    "awu": (0, 1),
    "acd": (1, 2),
    "acu": (2, 1),
}

CONTRACTIONS = ("acd", "acu")
INTERACTIONS = ("aid", "aiu")
WEAKENINGS = ("awd", "awu")


class FlowError(ValueError):
    pass


class ResourceCapExceeded(RuntimeError):
    """An enumeration or rewrite loop hit its configured cap."""


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    condition: Optional[str] = None  # "structure" | "arity" | "acyclicity" | "polarity"
    witness: Optional[str] = None

    def __bool__(self):
        return self.ok


class AtomicFlow:
    """Mutable builder / value object.  Treat instances as immutable once
    shared: every rewriting operation in this package works on a copy."""

    def __init__(self):
        self._label: dict[int, str] = {}
        self._up: dict[int, object] = {}
        self._lo: dict[int, object] = {}
        self._hint: dict[int, str] = {}
        self._next_v = 1
        self._next_e = 1

    # -- construction ------------------------------------------------------

    def add_vertex(self, label: str, vid: Optional[int] = None) -> int:
        if label not in LABELS:
            raise FlowError(f"unknown label {label!r}")
        if vid is None:
            vid = self._next_v
        if vid in self._label:
            raise FlowError(f"duplicate vertex id {vid}")
        self._label[vid] = label
        self._next_v = max(self._next_v, vid + 1)
        return vid

    def add_edge(self, up, lo, hint: Optional[str] = None, eid: Optional[int] = None) -> int:
        if eid is None:
            eid = self._next_e
        if eid in self._up:
            raise FlowError(f"duplicate edge id {eid}")
        self._up[eid] = up
        self._lo[eid] = lo
        if hint:
            self._hint[eid] = hint
        self._next_e = max(self._next_e, eid + 1)
        return eid

    def set_up(self, eid: int, up) -> None:
        self._up[eid] = up

    def set_lo(self, eid: int, lo) -> None:
        self._lo[eid] = lo

    def set_hint(self, eid: int, hint: Optional[str]) -> None:
        if hint is None:
            self._hint.pop(eid, None)
        else:
            self._hint[eid] = hint

    def remove_vertex(self, vid: int) -> None:
        del self._label[vid]

    def remove_edge(self, eid: int) -> None:
        del self._up[eid]
        del self._lo[eid]
        self._hint.pop(eid, None)

    def copy(self) -> "AtomicFlow":
        other = AtomicFlow()
        other._label = dict(self._label)
        other._up = dict(self._up)
        other._lo = dict(self._lo)
        other._hint = dict(self._hint)
        other._next_v = self._next_v
        other._next_e = self._next_e
        return other

    # -- basic queries -----------------------------------------------------

    def vertices(self) -> list[int]:
        return sorted(self._label)

    def edges(self) -> list[int]:
        return sorted(self._up)

    def label(self, vid: int) -> str:
        return self._label[vid]

    def up(self, eid: int):
        return self._up[eid]

    def lo(self, eid: int):
        return self._lo[eid]

    def hint(self, eid: int) -> Optional[str]:
        return self._hint.get(eid)

    def lower_edges(self, vid) -> list[int]:
        """Edges leaving ``vid`` downwards."""
        return sorted(e for e, u in self._up.items() if u == vid)

    def upper_edges(self, vid) -> list[int]:
        """Edges entering ``vid`` from above."""
        return sorted(e for e, l in self._lo.items() if l == vid)

    def edges_of(self, vid) -> list[int]:
        return sorted(set(self.lower_edges(vid)) | set(self.upper_edges(vid)))

    def top_edges(self) -> list[int]:
        return self.lower_edges(TOP)

    def bot_edges(self) -> list[int]:
        return self.upper_edges(BOT)

    def label_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for lab in self._label.values():
            out[lab] = out.get(lab, 0) + 1
        return out

    def __eq__(self, other):
        if not isinstance(other, AtomicFlow):
            return NotImplemented
        return (
            self._label == other._label
            and self._up == other._up
            and self._lo == other._lo
        )

    def __repr__(self):
        return f"<AtomicFlow |V|={len(self._label)} |E|={len(self._up)}>"

    # -- validation --------------------------------------------------------

    def validate(self) -> ValidationReport:
        for eid in self._up:
            for end in (self._up[eid], self._lo[eid]):
                if end not in (TOP, BOT) and end not in self._label:
                    return ValidationReport(False, "structure", f"edge {eid} endpoint {end!r}")
            if self._up[eid] == BOT or self._lo[eid] == TOP:
                return ValidationReport(False, "structure", f"edge {eid} wrong-way boundary")
        for vid, lab in self._label.items():
            nl, nu = ARITY[lab]
            if len(self.lower_edges(vid)) != nl or len(self.upper_edges(vid)) != nu:
                return ValidationReport(False, "arity", f"vertex {vid} ({lab})")
        cyc = self._vertex_cycle()
        if cyc is not None:
            return ValidationReport(False, "acyclicity", f"vertex cycle {cyc}")
        if self._polarity_components() is None:
            return ValidationReport(False, "polarity", "no polarity assignment exists")
        return ValidationReport(True)

    def _vertex_cycle(self) -> Optional[list[int]]:
        succ: dict[int, list[int]] = {v: [] for v in self._label}
        for eid in self._up:
            u, l = self._up[eid], self._lo[eid]
            if u in self._label and l in self._label:
                succ[u].append(l)
        WHITE, GREY, BLACK = 0, 1, 2
        colour = {v: WHITE for v in self._label}
        stack_path: list[int] = []

        def dfs(v) -> Optional[list[int]]:
            colour[v] = GREY
            stack_path.append(v)
            for w in succ[v]:
                if colour[w] == GREY:
                    return stack_path[stack_path.index(w):] + [w]
                if colour[w] == WHITE:
                    found = dfs(w)
                    if found:
                        return found
            stack_path.pop()
            colour[v] = BLACK
            return None

        for v in sorted(self._label):
            if colour[v] == WHITE:
                found = dfs(v)
                if found:
                    return found
        return None

    # -- polarity ----------------------------------------------------------

    def _polarity_components(self):
        """Union-find with parity over edges.  Returns (component
        representative map, parity-to-representative map) or None when the
        constraints are unsatisfiable."""
        parent: dict[int, int] = {e: e for e in self._up}
        parity: dict[int, int] = {e: 0 for e in self._up}  # parity vs parent

        def find(e):
            if parent[e] == e:
                return e, 0
            root, par = find(parent[e])
            parent[e] = root
            parity[e] ^= par
            return root, parity[e]

        def union(a, b, diff) -> bool:
            ra, pa = find(a)
            rb, pb = find(b)
            if ra == rb:
                return (pa ^ pb) == diff
            parent[rb] = ra
            parity[rb] = pa ^ pb ^ diff
            return True

        for vid, lab in self._label.items():
            es = self.edges_of(vid)
            if lab in CONTRACTIONS or lab in WEAKENINGS:
                for other in es[1:]:
                    if not union(es[0], other, 0):
                        return None
            else:  # interactions: exactly two edges, opposite signs
                if len(es) == 2 and not union(es[0], es[1], 1):
                    return None
                if len(es) == 1:
                    # arity violation; let validate() report it
                    pass
        comp: dict[int, int] = {}
        par: dict[int, int] = {}
        for e in self._up:
            r, p = find(e)
            comp[e] = r
            par[e] = p
        return comp, par

    def components(self) -> list[list[int]]:
        """Connected components as sorted edge-id lists (top/bot excluded
        from connectivity)."""
        pc = self._polarity_components()
        if pc is None:
            raise FlowError("invalid flow: no polarity assignment")
        comp, _ = pc
        groups: dict[int, list[int]] = {}
        for e in sorted(self._up):
            groups.setdefault(comp[e], []).append(e)
        return [groups[r] for r in sorted(groups, key=lambda r: groups[r][0])]

    def polarity_first(self) -> dict[int, str]:
        """The canonical assignment: in every component the lowest-id edge
        is negative."""
        pc = self._polarity_components()
        if pc is None:
            raise FlowError("invalid flow: no polarity assignment")
        comp, par = pc
        rep_parity: dict[int, int] = {}
        for e in sorted(self._up):
            rep_parity.setdefault(comp[e], par[e])
        return {e: "-+"[par[e] ^ rep_parity[comp[e]]] for e in self._up}

    def polarity_assignments(self, cap: int = 4096) -> list[dict[int, str]]:
        """All 2^n assignments, n the number of connected components; the
        first entry is :meth:`polarity_first`."""
        base = self.polarity_first()
        comps = self.components()
        if 2 ** len(comps) > cap:
            raise ResourceCapExceeded(f"2^{len(comps)} polarity assignments exceed cap {cap}")
        out = []
        for flips in product((False, True), repeat=len(comps)):
            pi = dict(base)
            for flip, comp_edges in zip(flips, comps):
                if flip:
                    for e in comp_edges:
                        pi[e] = "+" if pi[e] == "-" else "-"
            out.append(pi)
        return out

    def extend_polarity(self, known: dict[int, str]) -> dict[int, str]:
        """Complete a partial assignment (e.g. after a rewrite) to a full
        one; raises if the constraints force a contradiction or leave a
        component undetermined."""
        pc = self._polarity_components()
        if pc is None:
            raise FlowError("invalid flow: no polarity assignment")
        comp, par = pc
        rep_sign: dict[int, str] = {}
        for e, sign in known.items():
            s = sign if par[e] == 0 else ("+" if sign == "-" else "-")
            if rep_sign.setdefault(comp[e], s) != s:
                raise FlowError("inconsistent partial polarity")
        out = {}
        for e in self._up:
            if comp[e] not in rep_sign:
                raise FlowError(f"polarity of component of edge {e} undetermined")
            s = rep_sign[comp[e]]
            out[e] = s if par[e] == 0 else ("+" if s == "-" else "-")
        return out

    # -- ai-paths and cycles -------------------------------------------------

    def _next_states(self, eid: int, direction: str) -> list[tuple[int, str]]:
        out = []
        if direction == "d":
            v = self._lo[eid]
            if v in (TOP, BOT) or v not in self._label:
                return []
            lab = self._label[v]
            for e2 in self.lower_edges(v):
                out.append((e2, "d"))
            if lab == "aiu":
                for e2 in self.upper_edges(v):
                    if e2 != eid:
                        out.append((e2, "u"))
        else:
            v = self._up[eid]
            if v in (TOP, BOT) or v not in self._label:
                return []
            lab = self._label[v]
            for e2 in self.upper_edges(v):
                out.append((e2, "u"))
            if lab == "aid":
                for e2 in self.lower_edges(v):
                    if e2 != eid:
                        out.append((e2, "d"))
        return out

    def ai_cycles(self, cap: int = 100_000) -> list[tuple[int, ...]]:
        """All ai-cycles, deduplicated up to rotation and inversion; each
        returned as the edge sequence of a canonical traversal."""
        found: set[tuple[int, ...]] = set()
        budget = [cap]

        def canonical(seq: tuple[int, ...]) -> tuple[int, ...]:
            best = None
            for cand in (seq, tuple(reversed(seq))):
                for i in range(len(cand)):
                    rot = cand[i:] + cand[:i]
                    if best is None or rot < best:
                        best = rot
            return best

        def walk(start: int, eid: int, direction: str, path: list[int], dirs: list[str], used: set[int]):
            for e2, d2 in self._next_states(eid, direction):
                if e2 == start and d2 == dirs[0] and len(path) >= 2:
                    budget[0] -= 1
                    if budget[0] < 0:
                        raise ResourceCapExceeded(f"ai-cycle enumeration exceeded cap {cap}")
                    found.add(canonical(tuple(path)))
                    continue
                if e2 in used or e2 < start:
                    continue
                path.append(e2)
                dirs.append(d2)
                used.add(e2)
                walk(start, e2, d2, path, dirs, used)
                used.discard(e2)
                dirs.pop()
                path.pop()

        for e in self.edges():
            walk(e, e, "d", [e], ["d"], {e})
        return sorted(found)

    def is_cycle_free(self) -> bool:
        return not self.ai_cycles()

    def _initial_states(self) -> list[tuple[int, str]]:
        out = []
        for e in self.edges():
            u = self._up[e]
            if u == TOP or (u in self._label and self._label[u] == "awd"):
                out.append((e, "d"))
            l = self._lo[e]
            if l == BOT or (l in self._label and self._label[l] == "awu"):
                out.append((e, "u"))
        return out

    def maximal_ai_walks(self) -> list[tuple[tuple[int, ...], tuple[str, ...]]]:
        """All maximal ai-paths of a cycle-free flow, one representative
        orientation each, with the traversal direction of every edge."""
        if not self.is_cycle_free():
            raise FlowError("maximal ai-paths are only defined for cycle-free flows")
        results: dict[tuple[int, ...], tuple[tuple[int, ...], tuple[str, ...]]] = {}

        def canon(seq: tuple[int, ...]) -> tuple[int, ...]:
            rev = tuple(reversed(seq))
            return seq if seq <= rev else rev

        def walk(eid, direction, path, dirs):
            nxt = self._next_states(eid, direction)
            nxt = [(e2, d2) for e2, d2 in nxt if e2 not in path_set]
            if not nxt:
                seq = tuple(path)
                results.setdefault(canon(seq), (seq, tuple(dirs)))
                return
            for e2, d2 in nxt:
                path.append(e2)
                dirs.append(d2)
                path_set.add(e2)
                walk(e2, d2, path, dirs)
                path_set.discard(e2)
                dirs.pop()
                path.pop()

        for e, d in self._initial_states():
            path_set = {e}
            walk(e, d, [e], [d])
        return [results[k] for k in sorted(results)]

    def maximal_ai_paths(self) -> list[tuple[int, ...]]:
        return [seq for seq, _ in self.maximal_ai_walks()]

    def maximal_path_lengths(self) -> list[int]:
        return sorted(len(p) for p in self.maximal_ai_paths())

    def _maximal_walks_from(self, eid: int, direction: str) -> list[int]:
        """Lengths of all maximal ai-paths extending from one state."""
        lengths: list[int] = []

        def walk(e, d, used, length):
            nxt = [(e2, d2) for e2, d2 in self._next_states(e, d) if e2 not in used]
            if not nxt:
                lengths.append(length)
                return
            for e2, d2 in nxt:
                used.add(e2)
                walk(e2, d2, used, length + 1)
                used.discard(e2)

        walk(eid, direction, {eid}, 1)
        return lengths

    def rank(self, vid: int) -> int:
        """Termination measure for the contraction rewriting system: the
        sum of the lengths of the maximal ai-paths leaving a contraction
        through its lower edge (dually a cocontraction through its upper
        edge)."""
        lab = self._label[vid]
        if lab == "acd":
            (e,) = self.lower_edges(vid)
            return sum(self._maximal_walks_from(e, "d"))
        if lab == "acu":
            (e,) = self.upper_edges(vid)
            return sum(self._maximal_walks_from(e, "u"))
        raise FlowError("rank is defined for (co)contraction vertices only")

    def total_rank(self) -> int:
        return sum(self.rank(v) for v in self.vertices() if self._label[v] in CONTRACTIONS)

    # -- connections, simple edges, classification ---------------------------

    def ai_connections(self) -> list[tuple[int, ...]]:
        """Plain downward paths from an interaction to a cointeraction."""
        out = []

        def descend(path):
            v = self._lo[path[-1]]
            if v in self._label and self._label[v] == "aiu":
                out.append(tuple(path))
                return
            if v in (TOP, BOT) or v not in self._label:
                return
            for e2 in self.lower_edges(v):
                descend(path + [e2])

        for v in self.vertices():
            if self._label[v] == "aid":
                for e in self.lower_edges(v):
                    descend([e])
        return sorted(out)

    def simple_edges(self) -> list[int]:
        return [
            e
            for e in self.edges()
            if self._up[e] in self._label
            and self._label[self._up[e]] == "aid"
            and self._lo[e] in self._label
            and self._label[self._lo[e]] == "aiu"
        ]

    def _walk_segments(self, seq: tuple[int, ...], dirs: tuple[str, ...]):
        """Split a walk into plain segments at its reversal points; yields
        (start_index, end_index, interior) where interior is True when both
        segment endpoints are reversal vertices of the walk."""
        breaks = [0]
        for i in range(1, len(seq)):
            if dirs[i] != dirs[i - 1]:
                breaks.append(i)
        breaks.append(len(seq))
        for j in range(len(breaks) - 1):
            a, b = breaks[j], breaks[j + 1]
            interior = j > 0 and j < len(breaks) - 2
            yield a, b, interior

    def cycles_edges(self) -> set[int]:
        return {e for cyc in self.ai_cycles() for e in cyc}

    def is_clean_walk(self, seq: tuple[int, ...], dirs: tuple[str, ...]) -> bool:
        """A clean path: every ai-connection inside it is a simple edge.
        Interior segments of a maximal walk always run between an
        interaction and a cointeraction, so they must have length one."""
        for a, b, interior in self._walk_segments(seq, dirs):
            if interior and b - a != 1:
                return False
        return True

    def extremal_simple_edges(self) -> list[int]:
        """Simple edges that close off a maximal clean path: no further
        simple edge follows them in the path's orientation."""
        out = set()
        simple = set(self.simple_edges())
        for seq, dirs in self.maximal_ai_walks():
            if not self.is_clean_walk(seq, dirs):
                continue
            for oriented in (seq, tuple(reversed(seq))):
                last = None
                for e in oriented:
                    if e in simple:
                        last = e
                if last is not None:
                    out.add(last)
        return sorted(out)

    def classify_edge(self, eid: int) -> dict[str, bool]:
        if eid not in self._up:
            raise FlowError(f"no edge {eid}")
        simple = eid in self.simple_edges()
        in_cycle = eid in self.cycles_edges()
        extremal = False
        if simple and self.is_cycle_free():
            extremal = eid in self.extremal_simple_edges()
        return {"simple": simple, "in_ai_cycle": in_cycle, "extremal_simple": extremal}

    # -- streamlining predicates ----------------------------------------------

    def _reaches_down(self, start_vertices: Iterable[int], targets: set[str]) -> bool:
        seen = set()
        stack = list(start_vertices)
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            for e in self.lower_edges(v):
                w = self._lo[e]
                if w in self._label:
                    if self._label[w] in targets:
                        return True
                    stack.append(w)
        return False

    def is_streamlined(self) -> bool:
        creators = [v for v in self.vertices() if self._label[v] in ("aid", "awd")]
        return not self._reaches_down(creators, {"aiu", "awu"})

    def is_w_normal(self) -> bool:
        for v in self.vertices():
            lab = self._label[v]
            if lab == "awd":
                (e,) = self.lower_edges(v)
                below = self._lo[e]
                if below in self._label and self._label[below] in ("acd", "aiu", "awu", "acu"):
                    return False
            elif lab == "awu":
                (e,) = self.upper_edges(v)
                above = self._up[e]
                if above in self._label and self._label[above] in ("acu", "aid", "acd"):
                    return False
        return True

    def is_c_normal(self) -> bool:
        for v in self.vertices():
            lab = self._label[v]
            if lab == "acd":
                (e,) = self.lower_edges(v)
                below = self._lo[e]
                if below in self._label and self._label[below] in ("aiu", "acu"):
                    return False
            elif lab == "acu":
                (e,) = self.upper_edges(v)
                above = self._up[e]
                if above in self._label and self._label[above] == "aid":
                    return False
        return True

    def is_super_streamlined(self) -> bool:
        return self.is_streamlined() and self.is_w_normal()

    def is_hyper_streamlined(self) -> bool:
        return self.is_super_streamlined() and self.is_c_normal()

    # -- isomorphism ------------------------------------------------------------

    def _edge_pairs(self, vmap: dict) -> dict[tuple, int]:
        out: dict[tuple, int] = {}
        for e in self._up:
            key = (vmap.get(self._up[e], self._up[e]), vmap.get(self._lo[e], self._lo[e]))
            out[key] = out.get(key, 0) + 1
        return out

    def isomorphic(self, other: "AtomicFlow") -> Optional[dict[str, dict]]:
        """A label- and incidence-preserving bijection fixing top and bot,
        or None.  Incidence order and atom hints are ignored."""
        if len(self._label) != len(other._label) or len(self._up) != len(other._up):
            return None
        if self.label_counts() != other.label_counts():
            return None
        if len(self.top_edges()) != len(other.top_edges()):
            return None
        if len(self.bot_edges()) != len(other.bot_edges()):
            return None

        def signature(flow: AtomicFlow, v: int):
            ups = sorted(
                flow._label.get(flow._up[e], flow._up[e]) if flow._up[e] in (TOP, BOT)
                else flow._label[flow._up[e]]
                for e in flow.upper_edges(v)
            )
            los = sorted(
                flow._label.get(flow._lo[e], flow._lo[e]) if flow._lo[e] in (TOP, BOT)
                else flow._label[flow._lo[e]]
                for e in flow.lower_edges(v)
            )
            return (flow._label[v], tuple(ups), tuple(los))

        mine = self.vertices()
        sig_other: dict[tuple, list[int]] = {}
        for v in other.vertices():
            sig_other.setdefault(signature(other, v), []).append(v)
        candidates = {}
        for v in mine:
            candidates[v] = list(sig_other.get(signature(self, v), []))
            if not candidates[v]:
                return None

        used: set[int] = set()
        vmap: dict[int, int] = {}

        def compatible(v, w) -> bool:
            # every already-mapped neighbour relation must be mirrored
            for e in self._up:
                a, b = self._up[e], self._lo[e]
                if a == v or b == v:
                    am = vmap.get(a, a if a in (TOP, BOT) else None)
                    bm = vmap.get(b, b if b in (TOP, BOT) else None)
                    if a == v:
                        am = w
                    if b == v:
                        bm = w
                    if am is not None and bm is not None:
                        count = sum(
                            1 for e2 in self._up
                            if (self._up[e2], self._lo[e2]) == (a, b)
                        )
                        count_o = sum(
                            1 for e2 in other._up
                            if (other._up[e2], other._lo[e2]) == (am, bm)
                        )
                        if count != count_o:
                            return False
            return True

        order = sorted(mine, key=lambda v: len(candidates[v]))

        def solve(i) -> bool:
            if i == len(order):
                return True
            v = order[i]
            for w in candidates[v]:
                if w in used:
                    continue
                vmap[v] = w
                if compatible(v, w):
                    used.add(w)
                    if solve(i + 1):
                        return True
                    used.discard(w)
                del vmap[v]
            return False

        if not solve(0):
            return None
        full = dict(vmap)
        full[TOP] = TOP
        full[BOT] = BOT
        # pair up edges within each (up, lo) class, by id order
        emap: dict[int, int] = {}
        pool: dict[tuple, list[int]] = {}
        for e in other.edges():
            pool.setdefault((other._up[e], other._lo[e]), []).append(e)
        for e in self.edges():
            key = (full[self._up[e]], full[self._lo[e]])
            bucket = pool.get(key)
            if not bucket:
                return None
            emap[e] = bucket.pop(0)
        return {"vertices": vmap, "edges": emap}

    # -- serialisation ------------------------------------------------------------

    def to_json(self) -> str:
        vs = [{"id": f"v{v}", "label": self._label[v]} for v in self.vertices()]
        es = []
        for e in self.edges():
            rec = {
                "id": f"e{e}",
                "up": TOP if self._up[e] == TOP else f"v{self._up[e]}",
                "lo": BOT if self._lo[e] == BOT else f"v{self._lo[e]}",
            }
            if e in self._hint:
                rec["atom"] = self._hint[e]
            es.append(rec)
        return json.dumps({"vertices": vs, "edges": es}, indent=2) + "\n"

    @staticmethod
    def from_json(text: str) -> "AtomicFlow":
        data = json.loads(text)
        flow = AtomicFlow()
        vmap: dict[str, int] = {}
        for i, rec in enumerate(data.get("vertices", []), start=1):
            vmap[rec["id"]] = flow.add_vertex(rec["label"], vid=i)
        for i, rec in enumerate(data.get("edges", []), start=1):
            def endpoint(name, kind):
                if name == TOP or name == BOT:
                    return name
                if name not in vmap:
                    raise FlowError(f"edge {rec['id']} references unknown vertex {name!r}")
                return vmap[name]
            flow.add_edge(
                endpoint(rec["up"], "up"),
                endpoint(rec["lo"], "lo"),
                hint=rec.get("atom"),
                eid=i,
            )
        return flow

    DOT_SHAPES = {
        "aid": "invtriangle",
        "aiu": "triangle",
        "awd": "invhouse",
        "awu": "house",
        "acd": "invtrapezium",
        "acu": "trapezium",
    }

    def to_dot(self, polarity: bool = False) -> str:
        pi = self.polarity_first() if polarity else {}
        lines = ["digraph flow {", "  rankdir=TB;",
                 '  top [shape=plaintext, label="T"];',
                 '  bot [shape=plaintext, label="_"];']
        for v in self.vertices():
            lab = self._label[v]
            lines.append(f'  v{v} [shape={self.DOT_SHAPES[lab]}, label="{lab}"];')
        for e in self.edges():
            src = "top" if self._up[e] == TOP else f"v{self._up[e]}"
            dst = "bot" if self._lo[e] == BOT else f"v{self._lo[e]}"
            parts = [f"e{e}"]
            if e in self._hint:
                parts.append(self._hint[e])
            if polarity:
                parts.append(pi[e])
            label = ":".join(parts)
            lines.append(f'  {src} -> {dst} [label="{label}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
