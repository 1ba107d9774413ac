"""End-to-end normalisation pipelines.

``streamline`` removes every causal dependency between interactions or
weakenings and cointeractions or coweakenings (breaking ai-cycles,
eliminating ai-connections, then clearing weakenings); its output is
super-streamlined.  ``hyper_streamline`` additionally normalises for the
contraction system.  On proofs, streamlining yields cut elimination.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from .formula import TRUE
from .derivation import Derivation, DerivationError
from .flow import FlowError
from .bridge import extract_flow
from .local_rules import (
    W_SYSTEM,
    first_match,
    lift_local,
    normalize_c_derivation,
    normalize_w_derivation,
)
from .global_reductions import algorithm_bc, algorithm_ex


@dataclass
class StageStats:
    name: str
    vertex_counts: dict[str, int]
    edge_count: int
    ai_cycle_count: int
    simple_edge_count: int
    step_count: int
    seconds: float

    def to_dict(self):
        return {
            "name": self.name,
            "vertex_counts": self.vertex_counts,
            "edge_count": self.edge_count,
            "ai_cycle_count": self.ai_cycle_count,
            "simple_edge_count": self.simple_edge_count,
            "step_count": self.step_count,
            "seconds": round(self.seconds, 6),
        }


@dataclass
class PipelineReport:
    stages: list[StageStats] = field(default_factory=list)
    stage_flows: list[str] = field(default_factory=list)  # flow JSON per stage

    def to_json(self) -> str:
        return json.dumps({"stages": [s.to_dict() for s in self.stages]}, indent=2) + "\n"

    def record(self, name: str, deriv: Derivation, seconds: float):
        flow = extract_flow(deriv).flow
        self.stages.append(
            StageStats(
                name,
                flow.label_counts(),
                len(flow.edges()),
                len(flow.ai_cycles()),
                len(flow.simple_edges()),
                len(deriv.steps),
                seconds,
            )
        )
        self.stage_flows.append(flow.to_json())


def _minimal_w(deriv: Derivation) -> Derivation:
    """Apply weakening reductions only until the flow is streamlined,
    rather than all the way to w-normality."""
    while True:
        x = extract_flow(deriv)
        if x.flow.is_streamlined():
            return deriv
        m = first_match(x.flow, W_SYSTEM)
        if m is None:
            raise FlowError("flow not streamlined but w-normal; stage contract broken")
        deriv = lift_local(deriv, m, x)


def streamline(deriv: Derivation, minimal_w: bool = False, eager_weakening: bool = False,
               jobs: int = 1):
    """Break ai-cycles, eliminate ai-connections, then move weakenings
    away.  Returns (derivation, report); the output has the same premiss
    and conclusion and a super-streamlined flow (merely streamlined when
    ``minimal_w``)."""
    report = PipelineReport()
    report.record("input", deriv, 0.0)
    if eager_weakening:
        t = time.perf_counter()
        deriv, _ = normalize_w_derivation(deriv)
        report.record("w-eager", deriv, time.perf_counter() - t)

    t = time.perf_counter()
    deriv = algorithm_bc(deriv, jobs=jobs)
    report.record("bc", deriv, time.perf_counter() - t)

    if eager_weakening:
        t = time.perf_counter()
        deriv, _ = normalize_w_derivation(deriv)
        report.record("w-eager", deriv, time.perf_counter() - t)

    t = time.perf_counter()
    deriv = algorithm_ex(deriv, jobs=jobs)
    report.record("ex", deriv, time.perf_counter() - t)

    t = time.perf_counter()
    if minimal_w:
        deriv = _minimal_w(deriv)
    else:
        deriv, _ = normalize_w_derivation(deriv)
    report.record("w", deriv, time.perf_counter() - t)
    return deriv, report


def hyper_streamline(deriv: Derivation, eager_weakening: bool = False, jobs: int = 1):
    """streamline, then normalise for the contraction system (legal since
    the streamlined flow is cycle-free).  The output flow is
    hyper-streamlined; on a proof, only analytic rules remain."""
    deriv, report = streamline(deriv, eager_weakening=eager_weakening, jobs=jobs)
    t = time.perf_counter()
    deriv, _ = normalize_c_derivation(deriv)
    report.record("c", deriv, time.perf_counter() - t)
    return deriv, report


def eliminate_cuts(proof: Derivation) -> Derivation:
    """Streamline a proof (premiss t); the result is a cut-free proof of
    the same conclusion, with no coweakenings either."""
    if proof.premiss != TRUE:
        raise DerivationError("cut elimination expects a proof (premiss t)")
    out, _ = streamline(proof)
    rules = out.rules_used()
    if "aiu" in rules or "awu" in rules:
        raise DerivationError("streamlined proof retained a cut or coweakening")
    return out
