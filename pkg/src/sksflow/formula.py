"""Formula syntax for classical propositional logic in deep-inference style.

Formulae are binary trees built from the units ``t`` (true) and ``f``
(false), named atoms carrying a negation flag, and binary disjunction
``[x,y]`` / conjunction ``(x,y)``.  Connectives are *not* flattened:
associativity and commutativity are explicit steps of the equational
theory below, so that atom occurrences can be traced exactly through
every rewrite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union


class FormulaSyntaxError(ValueError):
    """Raised by :func:`parse`; carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


@dataclass(frozen=True)
class Unit:
    true: bool

    def __repr__(self):
        return "t" if self.true else "f"


@dataclass(frozen=True)
class Atom:
    name: str
    negated: bool = False

    def __repr__(self):
        return ("-" if self.negated else "") + self.name


@dataclass(frozen=True)
class Dis:
    left: "Formula"
    right: "Formula"

    def __repr__(self):
        return f"[{self.left!r},{self.right!r}]"


@dataclass(frozen=True)
class Con:
    left: "Formula"
    right: "Formula"

    def __repr__(self):
        return f"({self.left!r},{self.right!r})"


Formula = Union[Unit, Atom, Dis, Con]

TRUE = Unit(True)
FALSE = Unit(False)

# A position is a path of child selectors from the root; () is the root.
Position = tuple[str, ...]
ROOT: Position = ()


def dual(a: Atom) -> Atom:
    """The involution on atoms: flips exactly the negation flag."""
    return Atom(a.name, not a.negated)


def dual_formula(phi: Formula) -> Formula:
    """De Morgan dual: swaps units, negates atoms, swaps the connectives."""
    if isinstance(phi, Unit):
        return Unit(not phi.true)
    if isinstance(phi, Atom):
        return dual(phi)
    if isinstance(phi, Dis):
        return Con(dual_formula(phi.left), dual_formula(phi.right))
    return Dis(dual_formula(phi.left), dual_formula(phi.right))


def size(phi: Formula) -> int:
    if isinstance(phi, (Unit, Atom)):
        return 1
    return 1 + size(phi.left) + size(phi.right)


def to_text(phi: Formula) -> str:
    """Render in the concrete grammar; ``parse(to_text(x)) == x``."""
    if isinstance(phi, Unit):
        return "t" if phi.true else "f"
    if isinstance(phi, Atom):
        return ("-" if phi.negated else "") + phi.name
    if isinstance(phi, Dis):
        return f"[{to_text(phi.left)},{to_text(phi.right)}]"
    return f"({to_text(phi.left)},{to_text(phi.right)})"


def parse(text: str) -> Formula:
    """Parse the ASCII grammar:

    formula := "t" | "f" | atom | "-" atom
             | "[" formula "," formula "]" | "(" formula "," formula ")"
    atom    := [a-z][a-z0-9_]*   (excluding the unit keywords t, f)

    Whitespace between tokens is insignificant.
    """
    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def fail(msg: str):
        raise FormulaSyntaxError(msg, pos)

    def atom_name() -> str:
        nonlocal pos
        start = pos
        if pos >= len(text) or not text[pos].isalpha() or not text[pos].islower():
            fail("expected atom name")
        pos += 1
        while pos < len(text) and (text[pos].islower() or text[pos].isdigit() or text[pos] == "_"):
            pos += 1
        return text[start:pos]

    def formula() -> Formula:
        nonlocal pos
        skip_ws()
        if pos >= len(text):
            fail("unexpected end of input")
        c = text[pos]
        if c in "[(":
            open_at = pos
            pos += 1
            left = formula()
            skip_ws()
            if pos >= len(text) or text[pos] != ",":
                fail("expected ','")
            pos += 1
            right = formula()
            skip_ws()
            closer = "]" if c == "[" else ")"
            if pos >= len(text) or text[pos] != closer:
                pos = pos if pos < len(text) else open_at + 1
                fail(f"expected '{closer}'")
            pos += 1
            return Dis(left, right) if c == "[" else Con(left, right)
        if c == "-":
            pos += 1
            skip_ws()
            name = atom_name()
            if name in ("t", "f"):
                fail("units cannot be negated")
            return Atom(name, True)
        name = atom_name()
        if name == "t":
            return TRUE
        if name == "f":
            return FALSE
        return Atom(name)

    result = formula()
    skip_ws()
    if pos != len(text):
        fail("trailing input")
    return result


def path_to_text(p: Position) -> str:
    return "/" if not p else "/" + "/".join(p)


def path_from_text(s: str) -> Position:
    s = s.strip()
    if s in ("/", ""):
        return ROOT
    parts = [x for x in s.split("/") if x]
    for x in parts:
        if x not in ("L", "R"):
            raise ValueError(f"bad path selector {x!r} in {s!r}")
    return tuple(parts)


def is_valid_position(phi: Formula, p: Position) -> bool:
    for sel in p:
        if not isinstance(phi, (Dis, Con)):
            return False
        phi = phi.left if sel == "L" else phi.right
    return True


def subformula_at(phi: Formula, p: Position) -> Formula:
    for i, sel in enumerate(p):
        if not isinstance(phi, (Dis, Con)):
            raise ValueError(f"invalid position {path_to_text(p)}: leaf at {path_to_text(p[:i])}")
        phi = phi.left if sel == "L" else phi.right
    return phi


def replace_at(phi: Formula, p: Position, psi: Formula) -> Formula:
    if not p:
        return psi
    if not isinstance(phi, (Dis, Con)):
        raise ValueError(f"invalid position {path_to_text(p)}")
    if p[0] == "L":
        return type(phi)(replace_at(phi.left, p[1:], psi), phi.right)
    return type(phi)(phi.left, replace_at(phi.right, p[1:], psi))


def positions(phi: Formula, prefix: Position = ROOT) -> Iterator[tuple[Position, Formula]]:
    """All positions, preorder, left to right."""
    yield prefix, phi
    if isinstance(phi, (Dis, Con)):
        yield from positions(phi.left, prefix + ("L",))
        yield from positions(phi.right, prefix + ("R",))


def atom_positions(phi: Formula) -> list[tuple[Position, Atom]]:
    """Positions of all atom occurrences, left to right."""
    return [(p, sub) for p, sub in positions(phi) if isinstance(sub, Atom)]


def unit_positions(phi: Formula) -> list[tuple[Position, Unit]]:
    return [(p, sub) for p, sub in positions(phi) if isinstance(sub, Unit)]


def occurrence_set(phi: Formula, occurrences) -> frozenset:
    """Validate a set of positions as occurrences of one atom: every
    member must address an Atom node, and all of them the same literal."""
    occs = frozenset(occurrences)
    literals = set()
    for p in occs:
        node = subformula_at(phi, p)
        if not isinstance(node, Atom):
            raise ValueError(f"{path_to_text(p)} does not address an atom")
        literals.add(node)
    if len(literals) > 1:
        raise ValueError("occurrences name different literals")
    return occs


# ---------------------------------------------------------------------------
# The eight-equation theory of the `=` rule.
#
# Each equation is read left-to-right as its "forward" direction; the rule
# itself is symmetric, so instances may use either direction.

COMM_DIS = "comm_dis"      # [a,b] = [b,a]
COMM_CON = "comm_con"      # (a,b) = (b,a)
ASSOC_DIS = "assoc_dis"    # [[a,b],c] = [a,[b,c]]
ASSOC_CON = "assoc_con"    # ((a,b),c) = (a,(b,c))
UNIT_DIS = "unit_dis"      # [a,f] = a
UNIT_CON = "unit_con"      # (a,t) = a
TT_DIS = "tt_dis"          # [t,t] = t
FF_CON = "ff_con"          # (f,f) = f

EQUATIONS = (COMM_DIS, COMM_CON, ASSOC_DIS, ASSOC_CON, UNIT_DIS, UNIT_CON, TT_DIS, FF_CON)


def apply_eq(name: str, forward: bool, phi: Formula) -> Optional[Formula]:
    """Apply one equation at the root, or return None if it does not fit."""
    if name == COMM_DIS:
        if isinstance(phi, Dis):
            return Dis(phi.right, phi.left)
        return None
    if name == COMM_CON:
        if isinstance(phi, Con):
            return Con(phi.right, phi.left)
        return None
    if name == ASSOC_DIS:
        if forward:
            if isinstance(phi, Dis) and isinstance(phi.left, Dis):
                return Dis(phi.left.left, Dis(phi.left.right, phi.right))
        else:
            if isinstance(phi, Dis) and isinstance(phi.right, Dis):
                return Dis(Dis(phi.left, phi.right.left), phi.right.right)
        return None
    if name == ASSOC_CON:
        if forward:
            if isinstance(phi, Con) and isinstance(phi.left, Con):
                return Con(phi.left.left, Con(phi.left.right, phi.right))
        else:
            if isinstance(phi, Con) and isinstance(phi.right, Con):
                return Con(Con(phi.left, phi.right.left), phi.right.right)
        return None
    if name == UNIT_DIS:
        if forward:
            if isinstance(phi, Dis) and phi.right == FALSE:
                return phi.left
            return None
        return Dis(phi, FALSE)
    if name == UNIT_CON:
        if forward:
            if isinstance(phi, Con) and phi.right == TRUE:
                return phi.left
            return None
        return Con(phi, TRUE)
    if name == TT_DIS:
        if forward:
            if phi == Dis(TRUE, TRUE):
                return TRUE
            return None
        if phi == TRUE:
            return Dis(TRUE, TRUE)
        return None
    if name == FF_CON:
        if forward:
            if phi == Con(FALSE, FALSE):
                return FALSE
            return None
        if phi == FALSE:
            return Con(FALSE, FALSE)
        return None
    raise ValueError(f"unknown equation {name!r}")


def classify_eq(gamma: Formula, delta: Formula) -> Optional[tuple[str, bool]]:
    """Identify (gamma, delta) as an instance of one equation, in one
    direction.  The fixed trial order makes the answer deterministic; the
    ambiguous cases (e.g. [a,a] read by commutativity) carry no atoms in
    the ambiguous part, so the choice never affects occurrence tracing.
    """
    for name in EQUATIONS:
        for forward in (True, False):
            if apply_eq(name, forward, gamma) == delta:
                return name, forward
    return None


def check_eq_instance(gamma: Formula, delta: Formula) -> bool:
    """True iff gamma and delta are opposite sides of one of the eight
    equations, read in either direction, at the root."""
    return classify_eq(gamma, delta) is not None


def eq_transport(name: str, forward: bool, rel: Position) -> Optional[Position]:
    """Map a position relative to the redex root through one equation.

    Returns None only for positions inside copies of units that the
    equation drops (those subtrees contain no atoms).
    """
    if name in (COMM_DIS, COMM_CON):
        if not rel:
            return None
        return (("R",) if rel[0] == "L" else ("L",)) + rel[1:]
    if name in (ASSOC_DIS, ASSOC_CON):
        if not forward:
            # inverse of the forward map
            if not rel:
                return None
            if rel[0] == "L":
                return ("L", "L") + rel[1:]
            if rel[1:2] == ("L",):
                return ("L", "R") + rel[2:]
            if rel[1:2] == ("R",):
                return ("R",) + rel[2:]
            return None
        if rel[:2] == ("L", "L"):
            return ("L",) + rel[2:]
        if rel[:2] == ("L", "R"):
            return ("R", "L") + rel[2:]
        if rel[:1] == ("R",):
            return ("R", "R") + rel[1:]
        return None
    if name in (UNIT_DIS, UNIT_CON):
        if forward:
            if rel[:1] == ("L",):
                return rel[1:]
            return None  # the dropped unit
        return ("L",) + rel
    if name in (TT_DIS, FF_CON):
        return None  # only units involved
    raise ValueError(f"unknown equation {name!r}")
