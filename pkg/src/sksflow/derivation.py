"""SKS derivations: inference steps, checking, occurrence transport, and
the standard macro constructions (super switch, generic (co)contraction,
conjunct sinking and disjunct floating).

A derivation is a premiss formula plus a sequence of steps; each step
rewrites exactly one redex, at one position, by one rule schema.  The
``eq`` rule applies exactly one of the eight equations at one position
(the gathered multi-equation steps seen in informal presentations are a
display concern only).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .formula import (
    Atom,
    Con,
    Dis,
    FALSE,
    Formula,
    Position,
    ROOT,
    TRUE,
    Unit,
    apply_eq,
    classify_eq,
    dual,
    dual_formula,
    eq_transport,
    is_valid_position,
    parse,
    path_from_text,
    path_to_text,
    replace_at,
    subformula_at,
    to_text,
)

STRUCTURAL_RULES = ("aid", "aiu", "awd", "awu", "acd", "acu")
DOWN_RULES = ("aid", "awd", "acd")
UP_RULES = ("aiu", "awu", "acu")
LINEAR_RULES = ("s", "m", "eq")
RULES = STRUCTURAL_RULES + LINEAR_RULES

KS_RULES = ("aid", "awd", "acd", "s", "m", "eq")


@dataclass(frozen=True)
class Step:
    rule: str
    position: Position
    conclusion: Formula
    # For eq steps: which equation, read in which direction.  Needed to
    # disambiguate occurrence tracing on the rare redexes that match two
    # equations, e.g. ((x,x),x) => (x,(x,x)) reads as commutativity or as
    # associativity with different occurrence maps.  None means "classify
    # deterministically from the redex/contractum pair".
    eq: Optional[tuple[str, bool]] = None


@dataclass(frozen=True)
class Derivation:
    premiss: Formula
    steps: tuple[Step, ...] = ()

    @property
    def conclusion(self) -> Formula:
        return self.steps[-1].conclusion if self.steps else self.premiss

    def formulas(self) -> list[Formula]:
        """The n+1 formulas; formulas()[i] is the premiss of step i."""
        return [self.premiss] + [s.conclusion for s in self.steps]

    def rules_used(self) -> set[str]:
        return {s.rule for s in self.steps}

    def is_ks(self) -> bool:
        return not (self.rules_used() & {"aiu", "awu", "acu"})

    def is_proof(self) -> bool:
        return self.premiss == TRUE

    def is_cut_free(self) -> bool:
        return "aiu" not in self.rules_used()


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    step: Optional[int] = None
    reason: Optional[str] = None

    def __bool__(self):
        return self.ok


class DerivationError(ValueError):
    pass


def _schema_result(rule: str, redex: Formula) -> tuple[Optional[Formula], Optional[str]]:
    """Apply a structural or logical schema to a redex.  Returns
    (contractum, None) on success or (None, reason) when the redex does
    not fit.  ``aid``/``awd`` cannot be computed this way (the created
    atom is free); they are validated against the given conclusion in
    :func:`check`."""
    if rule == "aiu":
        if (
            isinstance(redex, Con)
            and isinstance(redex.left, Atom)
            and isinstance(redex.right, Atom)
            and redex.right == dual(redex.left)
        ):
            return FALSE, None
        return None, "aiu: redex must be a conjunction of dual atoms (not dual atoms)"
    if rule == "awu":
        if isinstance(redex, Atom):
            return TRUE, None
        return None, "awu: redex must be an atom"
    if rule == "acd":
        if isinstance(redex, Dis) and isinstance(redex.left, Atom) and redex.left == redex.right:
            return redex.left, None
        return None, "acd: redex must be a disjunction of two equal atoms"
    if rule == "acu":
        if isinstance(redex, Atom):
            return Con(redex, redex), None
        return None, "acu: redex must be an atom"
    if rule == "s":
        if isinstance(redex, Con) and isinstance(redex.right, Dis):
            return Dis(Con(redex.left, redex.right.left), redex.right.right), None
        return None, "s: redex must match (a,[b,c])"
    if rule == "m":
        if isinstance(redex, Dis) and isinstance(redex.left, Con) and isinstance(redex.right, Con):
            return (
                Con(
                    Dis(redex.left.left, redex.right.left),
                    Dis(redex.left.right, redex.right.right),
                ),
                None,
            )
        return None, "m: redex must match [(a,b),(c,d)]"
    raise ValueError(f"no direct schema for rule {rule!r}")


def check_step(premiss: Formula, step: Step) -> Optional[str]:
    """Return None if the step is a valid rewrite of ``premiss``, else a
    human-readable reason."""
    if step.rule not in RULES:
        return f"unknown rule {step.rule!r}"
    p = step.position
    if not is_valid_position(premiss, p) or not is_valid_position(step.conclusion, p):
        return f"invalid position {path_to_text(p)}"
    redex = subformula_at(premiss, p)
    contractum = subformula_at(step.conclusion, p)
    if replace_at(premiss, p, contractum) != step.conclusion:
        return "premiss and conclusion differ outside the rewrite position"
    if step.rule == "aid":
        if redex != TRUE:
            return "aid: redex must be t"
        if not (
            isinstance(contractum, Dis)
            and isinstance(contractum.left, Atom)
            and isinstance(contractum.right, Atom)
            and contractum.right == dual(contractum.left)
        ):
            return "aid: conclusion must be a disjunction of dual atoms (not dual atoms)"
        return None
    if step.rule == "awd":
        if redex != FALSE:
            return "awd: redex must be f"
        if not isinstance(contractum, Atom):
            return "awd: conclusion must be an atom"
        return None
    if step.rule == "eq":
        if step.eq is not None:
            if apply_eq(step.eq[0], step.eq[1], redex) != contractum:
                return f"eq: not an instance of {step.eq[0]} in the stated direction"
            return None
        if classify_eq(redex, contractum) is None:
            return "eq: not an instance of any of the eight equations"
        return None
    expected, reason = _schema_result(step.rule, redex)
    if expected is None:
        return reason
    if expected != contractum:
        return f"{step.rule}: conclusion does not match the schema"
    return None


def check(deriv: Derivation) -> CheckReport:
    """Validate every step in sequence; reports the first failure."""
    current = deriv.premiss
    for i, step in enumerate(deriv.steps):
        reason = check_step(current, step)
        if reason is not None:
            return CheckReport(False, i, reason)
        current = step.conclusion
    return CheckReport(True)


def assert_checked(deriv: Derivation) -> Derivation:
    report = check(deriv)
    if not report.ok:
        raise DerivationError(f"step {report.step}: {report.reason}")
    return deriv


# ---------------------------------------------------------------------------
# Occurrence transport.

def transport(rule: str, rpos: Position, premiss: Formula, q: Position) -> Optional[Position]:
    """Where a (passive) leaf occurrence at ``q`` in the premiss of a step
    lands in the conclusion.  Positions disjoint from the redex are kept;
    positions inside it follow the rule's occurrence map.  Returns None
    for occurrences the step destroys, and for the principal atom of acu
    (which splits in two; extraction handles it specially)."""
    if q[: len(rpos)] != rpos:
        return q
    rel = q[len(rpos):]
    if rule in ("aid", "awd"):
        return None if not rel else q  # redex is a unit; rel == () only for it
    if rule in ("aiu", "awu", "acu"):
        return None  # principal atoms destroyed / split
    if rule == "acd":
        return rpos  # both copies merge onto the contractum atom
    if rule == "s":
        if rel[:1] == ("L",):
            return rpos + ("L", "L") + rel[1:]
        if rel[:2] == ("R", "L"):
            return rpos + ("L", "R") + rel[2:]
        if rel[:2] == ("R", "R"):
            return rpos + ("R",) + rel[2:]
        return None
    if rule == "m":
        m = {("L", "L"): ("L", "L"), ("L", "R"): ("R", "L"),
             ("R", "L"): ("L", "R"), ("R", "R"): ("R", "R")}
        if rel[:2] in m:
            return rpos + m[rel[:2]] + rel[2:]
        return None
    if rule == "eq":
        raise ValueError("eq transport needs the step's conclusion; use transport_step")
    raise ValueError(f"unknown rule {rule!r}")


def transport_step(premiss: Formula, step: Step, q: Position) -> Optional[Position]:
    if step.rule != "eq":
        return transport(step.rule, step.position, premiss, q)
    if q[: len(step.position)] != step.position:
        return q
    rel = q[len(step.position):]
    kind = step.eq
    if kind is None:
        redex = subformula_at(premiss, step.position)
        contractum = subformula_at(step.conclusion, step.position)
        kind = classify_eq(redex, contractum)
        if kind is None:
            raise DerivationError("transport through invalid eq step")
    mapped = eq_transport(kind[0], kind[1], rel)
    return None if mapped is None else step.position + mapped


def occurrence_map(premiss: Formula, step: Step) -> dict[Position, Position]:
    """The canonical atom-occurrence correspondence of one step: a partial
    map from premiss atom positions to conclusion atom positions (created
    and destroyed occurrences are absent; the two acd copies both map to
    the merged occurrence; the acu occurrence maps to both copies, of
    which this map keeps the left one)."""
    from .formula import atom_positions

    out: dict[Position, Position] = {}
    for q, _ in atom_positions(premiss):
        if step.rule == "acu" and q == step.position:
            out[q] = step.position + ("L",)
            continue
        target = transport_step(premiss, step, q)
        if target is not None:
            out[q] = target
    return out


# ---------------------------------------------------------------------------
# Construction helpers.

class StepBuilder:
    """Accumulates steps from a starting formula, computing each
    conclusion from the rule schema and failing fast on misuse."""

    def __init__(self, start: Formula):
        self.formula = start
        self.steps: list[Step] = []

    def _push(self, rule: str, pos: Position, conclusion: Formula, eq=None):
        step = Step(rule, pos, conclusion, eq)
        reason = check_step(self.formula, step)
        if reason is not None:
            raise DerivationError(f"builder: {reason}")
        self.steps.append(step)
        self.formula = conclusion

    def eq(self, pos: Position, name: str, forward: bool = True) -> "StepBuilder":
        redex = subformula_at(self.formula, pos)
        contractum = apply_eq(name, forward, redex)
        if contractum is None:
            raise DerivationError(f"equation {name} does not apply at {path_to_text(pos)}")
        self._push("eq", pos, replace_at(self.formula, pos, contractum), eq=(name, forward))
        return self

    def aid(self, pos: Position, atom: Atom) -> "StepBuilder":
        self._push("aid", pos, replace_at(self.formula, pos, Dis(atom, dual(atom))))
        return self

    def awd(self, pos: Position, atom: Atom) -> "StepBuilder":
        self._push("awd", pos, replace_at(self.formula, pos, atom))
        return self

    def rule(self, rule: str, pos: Position) -> "StepBuilder":
        redex = subformula_at(self.formula, pos)
        contractum, reason = _schema_result(rule, redex)
        if contractum is None:
            raise DerivationError(f"builder: {reason}")
        self._push(rule, pos, replace_at(self.formula, pos, contractum))
        return self

    def aiu(self, pos):
        return self.rule("aiu", pos)

    def awu(self, pos):
        return self.rule("awu", pos)

    def acd(self, pos):
        return self.rule("acd", pos)

    def acu(self, pos):
        return self.rule("acu", pos)

    def s(self, pos):
        return self.rule("s", pos)

    def m(self, pos):
        return self.rule("m", pos)

    def extend(self, steps: Iterable[Step]) -> "StepBuilder":
        for step in steps:
            self._push(step.rule, step.position, step.conclusion, eq=step.eq)
        return self

    def derivation(self, premiss: Formula) -> Derivation:
        return Derivation(premiss, tuple(self.steps))


def include_in_context(context: Formula, hole: Position, deriv: Derivation) -> Derivation:
    """ξ{Φ}: include every formula of the derivation into the context."""
    if not is_valid_position(context, hole):
        raise DerivationError(f"invalid hole position {path_to_text(hole)}")
    premiss = replace_at(context, hole, deriv.premiss)
    steps = tuple(
        Step(s.rule, hole + s.position, replace_at(context, hole, s.conclusion), s.eq)
        for s in deriv.steps
    )
    return Derivation(premiss, steps)


def compose(first: Derivation, second: Derivation) -> Derivation:
    """Vertical composition; the interface formulas must agree exactly."""
    if first.conclusion != second.premiss:
        raise DerivationError(
            f"interface mismatch: {to_text(first.conclusion)} vs {to_text(second.premiss)}"
        )
    return Derivation(first.premiss, first.steps + second.steps)


ATOM_TO_FORMULA = "AtomToFormula"
UNIT_TO_FORMULA = "UnitToFormula"


def substitute(
    deriv: Derivation,
    tracked: Sequence[tuple[int, Position]],
    replacement: Formula,
    mode: str = ATOM_TO_FORMULA,
) -> tuple[Derivation, CheckReport]:
    """Textually substitute ``replacement`` into a coherent set of leaf
    occurrences, one per formula over a contiguous index range (formula 0
    is the premiss).  The occurrences must be connected by the steps'
    occurrence transport.  The result is returned together with its check
    report: it is *not* necessarily valid, because rule instances that
    consumed the tracked leaf break.
    """
    if not tracked:
        return deriv, check(deriv)
    entries = sorted(tracked)
    indices = [i for i, _ in entries]
    if indices != list(range(indices[0], indices[-1] + 1)):
        raise DerivationError("tracked set must cover a contiguous range of formulas")
    formulas = deriv.formulas()
    by_index = dict(entries)
    want = Atom if mode == ATOM_TO_FORMULA else Unit
    for i, pos in entries:
        if i >= len(formulas) or not is_valid_position(formulas[i], pos):
            raise DerivationError(f"tracked position invalid in formula {i}")
        if not isinstance(subformula_at(formulas[i], pos), want):
            raise DerivationError(f"tracked occurrence in formula {i} is not a {want.__name__}")
    for i in range(indices[0], indices[-1]):
        step = deriv.steps[i]
        moved = transport_step(formulas[i], step, by_index[i])
        if moved != by_index[i + 1]:
            raise DerivationError(f"tracked set is not closed under step {i}'s occurrence map")
    new_formulas = list(formulas)
    for i, pos in entries:
        new_formulas[i] = replace_at(new_formulas[i], pos, replacement)
    steps = tuple(
        Step(s.rule, s.position, new_formulas[i + 1], s.eq) for i, s in enumerate(deriv.steps)
    )
    candidate = Derivation(new_formulas[0], steps)
    return candidate, check(candidate)


# ---------------------------------------------------------------------------
# Standard calculus-of-structures constructions.  All of them emit only
# {s, m, eq} steps, so they add no vertices to the associated flow.

def sink_conjunct(b: StepBuilder, pos: Position, hole: Position) -> None:
    """At ``pos`` the formula is (ζ{α}, X); push X down to the hole,
    ending with ζ{(α, X)} at ``pos``.  Uses only s and eq."""
    if not hole:
        return
    node = subformula_at(b.formula, pos)
    if not isinstance(node, Con):
        raise DerivationError("sink_conjunct expects a conjunction")
    zeta = node.left
    sel, rest = hole[0], hole[1:]
    if isinstance(zeta, Con):
        if sel == "L":
            b.eq(pos + ("L",), "comm_con")
            b.eq(pos, "assoc_con", forward=True)
            b.eq(pos, "comm_con")
            sink_conjunct(b, pos + ("L",), rest)
        else:
            b.eq(pos, "assoc_con", forward=True)
            sink_conjunct(b, pos + ("R",), rest)
    elif isinstance(zeta, Dis):
        if sel == "L":
            b.eq(pos, "comm_con")
            b.s(pos)
            b.eq(pos + ("L",), "comm_con")
            sink_conjunct(b, pos + ("L",), rest)
        else:
            b.eq(pos + ("L",), "comm_dis")
            b.eq(pos, "comm_con")
            b.s(pos)
            b.eq(pos + ("L",), "comm_con")
            sink_conjunct(b, pos + ("L",), rest)
            b.eq(pos, "comm_dis")
    else:
        raise DerivationError("hole runs through a leaf")


def float_disjunct(b: StepBuilder, pos: Position, hole: Position) -> None:
    """At ``pos`` the formula is ζ{X}; float the subformula at the hole
    up and out, ending with [ζ{f}, X] at ``pos``.  Uses only s and eq."""
    node = subformula_at(b.formula, pos)
    if not hole:
        b.eq(pos, "unit_dis", forward=False)   # X -> [X, f]
        b.eq(pos, "comm_dis")                  # [f, X]
        return
    sel, rest = hole[0], hole[1:]
    if isinstance(node, Dis):
        if sel == "L":
            float_disjunct(b, pos + ("L",), rest)
            b.eq(pos, "assoc_dis", forward=True)
            b.eq(pos + ("R",), "comm_dis")
            b.eq(pos, "assoc_dis", forward=False)
        else:
            float_disjunct(b, pos + ("R",), rest)
            b.eq(pos, "assoc_dis", forward=False)
    elif isinstance(node, Con):
        if sel == "L":
            float_disjunct(b, pos + ("L",), rest)
            b.eq(pos, "comm_con")
            b.s(pos)
            b.eq(pos + ("L",), "comm_con")
        else:
            float_disjunct(b, pos + ("R",), rest)
            b.s(pos)
    else:
        raise DerivationError("hole runs through a leaf")


def build_super_switch(
    xi: tuple[Formula, Position], zeta: tuple[Formula, Position], alpha: Formula
) -> Derivation:
    """The super-switch macro: a derivation from (ξ{t}, ζ{α}) to
    [ξ{α}, ζ{f}] using only s and eq.  The α is carried into ξ's hole
    through ζ first, then ξ{α} is floated out of ζ."""
    xi_f, xi_hole = xi
    zeta_f, zeta_hole = zeta
    premiss = Con(replace_at(xi_f, xi_hole, TRUE), replace_at(zeta_f, zeta_hole, alpha))
    b = StepBuilder(premiss)
    b.eq(ROOT, "comm_con")                       # (ζ{α}, ξ{t})
    sink_conjunct(b, ROOT, zeta_hole)            # ζ{(α, ξ{t})}
    b.eq(zeta_hole, "comm_con")                  # ζ{(ξ{t}, α)}
    sink_conjunct(b, zeta_hole, xi_hole)         # ζ{ξ{(t, α)}}
    b.eq(zeta_hole + xi_hole, "comm_con")        # (α, t)
    b.eq(zeta_hole + xi_hole, "unit_con")        # ζ{ξ{α}}
    float_disjunct(b, ROOT, zeta_hole)           # [ζ{f}, ξ{α}]
    b.eq(ROOT, "comm_dis")                       # [ξ{α}, ζ{f}]
    return b.derivation(premiss)


def _cocontract(b: StepBuilder, pos: Position) -> None:
    phi = subformula_at(b.formula, pos)
    if isinstance(phi, Atom):
        b.acu(pos)
        return
    if isinstance(phi, Unit):
        b.eq(pos, "unit_con" if phi.true else "ff_con", forward=False)
        return
    if isinstance(phi, Dis):
        _cocontract(b, pos + ("L",))
        _cocontract(b, pos + ("R",))
        b.m(pos)
        return
    # (β,γ) -> ((β,β),(γ,γ)) -> ((β,γ),(β,γ))
    _cocontract(b, pos + ("L",))
    _cocontract(b, pos + ("R",))
    b.eq(pos, "assoc_con", forward=True)        # (β,(β,(γ,γ)))
    b.eq(pos + ("R",), "assoc_con", forward=False)  # (β,((β,γ),γ))
    b.eq(pos + ("R",), "comm_con")              # (β,(γ,(β,γ)))
    b.eq(pos, "assoc_con", forward=False)       # ((β,γ),(β,γ))


def _contract(b: StepBuilder, pos: Position) -> None:
    phi = subformula_at(b.formula, pos)
    if not isinstance(phi, Dis):
        raise DerivationError("contract expects [α,α]")
    left = phi.left
    if isinstance(left, Atom):
        b.acd(pos)
        return
    if isinstance(left, Unit):
        b.eq(pos, "tt_dis" if left.true else "unit_dis", forward=True)
        return
    if isinstance(left, Con):
        b.m(pos)                                # ([β,β],[γ,γ])
        _contract(b, pos + ("L",))
        _contract(b, pos + ("R",))
        return
    # [[β,γ],[β,γ]] -> [[β,β],[γ,γ]] -> [β,γ]
    b.eq(pos, "assoc_dis", forward=True)        # [β,[γ,[β,γ]]]
    b.eq(pos + ("R",), "assoc_dis", forward=False)  # [β,[[γ,β],γ]]
    b.eq(pos + ("R", "L"), "comm_dis")          # [β,[[β,γ],γ]]
    b.eq(pos + ("R",), "assoc_dis", forward=True)   # [β,[β,[γ,γ]]]
    b.eq(pos, "assoc_dis", forward=False)       # [[β,β],[γ,γ]]
    _contract(b, pos + ("L",))
    _contract(b, pos + ("R",))


def build_generic_contraction(alpha: Formula, down: bool) -> Derivation:
    """Contraction [α,α] => α from {acd, m, eq} when ``down``; otherwise
    cocontraction α => (α,α) from {acu, m, eq}."""
    if down:
        premiss = Dis(alpha, alpha)
        b = StepBuilder(premiss)
        _contract(b, ROOT)
    else:
        premiss = alpha
        b = StepBuilder(premiss)
        _cocontract(b, ROOT)
    return b.derivation(premiss)


def contraction_steps_at(b: StepBuilder, pos: Position, down: bool) -> None:
    """Apply the generic (co)contraction macro inside a larger formula."""
    sub = subformula_at(b.formula, pos)
    if down:
        if not (isinstance(sub, Dis) and sub.left == sub.right):
            raise DerivationError("contraction redex must be [α,α]")
        inner = build_generic_contraction(sub.left, True)
    else:
        inner = build_generic_contraction(sub, False)
    lifted = include_in_context(b.formula, pos, inner)
    b.extend(lifted.steps)


# ---------------------------------------------------------------------------
# Unit bookkeeping: collapse a units-only formula to its value by eq steps.

def unit_value(phi: Formula) -> bool:
    if isinstance(phi, Unit):
        return phi.true
    if isinstance(phi, Atom):
        raise DerivationError("not a units-only formula")
    if isinstance(phi, Dis):
        return unit_value(phi.left) or unit_value(phi.right)
    return unit_value(phi.left) and unit_value(phi.right)


def collapse_units(b: StepBuilder, pos: Position) -> None:
    """Reduce the units-only subformula at ``pos`` to t or f by eq steps."""
    phi = subformula_at(b.formula, pos)
    if isinstance(phi, Unit):
        return
    collapse_units(b, pos + ("L",))
    collapse_units(b, pos + ("R",))
    node = subformula_at(b.formula, pos)
    lv = node.left.true
    rv = node.right.true
    if isinstance(node, Dis):
        if lv and rv:
            b.eq(pos, "tt_dis")
        elif rv and not lv:
            b.eq(pos, "comm_dis")
            b.eq(pos, "unit_dis")
        else:  # right is f
            b.eq(pos, "unit_dis")
    else:
        if not lv and not rv:
            b.eq(pos, "ff_con")
        elif not rv and lv:
            b.eq(pos, "comm_con")
            b.eq(pos, "unit_con")
        else:  # right is t
            b.eq(pos, "unit_con")


def invert_steps(deriv: Derivation) -> Derivation:
    """Reverse a derivation whose steps are all eq (every equation is
    symmetric, so the inverse is again a derivation)."""
    formulas = deriv.formulas()
    steps = []
    for i in range(len(deriv.steps) - 1, -1, -1):
        s = deriv.steps[i]
        if s.rule != "eq":
            raise DerivationError("only eq steps can be inverted")
        inv = (s.eq[0], not s.eq[1]) if s.eq else None
        steps.append(Step("eq", s.position, formulas[i], inv))
    return Derivation(deriv.conclusion, tuple(steps))


def expand_from_unit(phi: Formula) -> Derivation:
    """An eq-only derivation from the unit value of ``phi`` (a units-only
    formula) up to ``phi`` itself."""
    b = StepBuilder(phi)
    collapse_units(b, ROOT)
    return invert_steps(b.derivation(phi))


# ---------------------------------------------------------------------------
# Top-down symmetry.

_DUAL_RULE = {"aid": "aiu", "aiu": "aid", "awd": "awu", "awu": "awd",
              "acd": "acu", "acu": "acd", "m": "m", "eq": "eq"}

# An eq step from γ to δ dualises-and-reverses to one from dual(δ) to
# dual(γ); this maps each equation/direction to the one realising that.
_DUAL_EQ = {"comm_dis": "comm_con", "comm_con": "comm_dis",
            "assoc_dis": "assoc_con", "assoc_con": "assoc_dis",
            "unit_dis": "unit_con", "unit_con": "unit_dis",
            "tt_dis": "ff_con", "ff_con": "tt_dis"}


def dual_derivation(deriv: Derivation) -> Derivation:
    """Flip a derivation upside down and dualise every formula.  Rules map
    to their duals; m is self-dual; s becomes s up to commutativity (four
    extra eq steps); eq steps stay eq steps."""
    formulas = deriv.formulas()
    b = StepBuilder(dual_formula(formulas[-1]))
    for i in range(len(deriv.steps) - 1, -1, -1):
        step = deriv.steps[i]
        target = dual_formula(formulas[i])
        pos = step.position
        if step.rule == "s":
            # ([ᾱ,β̄],γ̄) => [ᾱ,(β̄,γ̄)] : comm, comm, s, comm, comm
            b.eq(pos, "comm_con")
            b.eq(pos + ("R",), "comm_dis")
            b.s(pos)
            b.eq(pos + ("L",), "comm_con")
            b.eq(pos, "comm_dis")
        elif step.rule == "eq":
            eq = None
            if step.eq is not None:
                eq = (_DUAL_EQ[step.eq[0]], not step.eq[1])
            b._push("eq", pos, target, eq=eq)
        else:
            b._push(_DUAL_RULE[step.rule], pos, target)
    return b.derivation(dual_formula(formulas[-1]))


# ---------------------------------------------------------------------------
# Text format (.sks): premiss on the first line, then pairs of
#   -- <rule> @ <path>
#   <formula>
# Comment lines start with '#'.

def format_derivation(deriv: Derivation) -> str:
    lines = [to_text(deriv.premiss)]
    for s in deriv.steps:
        lines.append(f"-- {s.rule} @ {path_to_text(s.position)}")
        lines.append(to_text(s.conclusion))
    return "\n".join(lines) + "\n"


def parse_derivation(text: str) -> Derivation:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise DerivationError("empty derivation file")
    premiss = parse(lines[0])
    steps = []
    i = 1
    while i < len(lines):
        header = lines[i]
        if not header.startswith("--"):
            raise DerivationError(f"expected step header, got {header!r}")
        body = header[2:].strip()
        if "@" not in body:
            raise DerivationError(f"step header missing '@': {header!r}")
        rule, path_text = body.split("@", 1)
        rule = rule.strip()
        if rule not in RULES:
            raise DerivationError(f"unknown rule {rule!r}")
        if i + 1 >= len(lines):
            raise DerivationError("step header without a formula")
        conclusion = parse(lines[i + 1])
        steps.append(Step(rule, path_from_text(path_text), conclusion))
        i += 2
    return Derivation(premiss, tuple(steps))
