import pytest

from sksflow.formula import Atom, Con, Dis, FALSE, ROOT, TRUE, dual_formula, parse
from sksflow.derivation import (
    ATOM_TO_FORMULA,
    Derivation,
    DerivationError,
    Step,
    StepBuilder,
    build_generic_contraction,
    build_super_switch,
    check,
    compose,
    dual_derivation,
    expand_from_unit,
    format_derivation,
    include_in_context,
    invert_steps,
    occurrence_map,
    parse_derivation,
    substitute,
)
from sksflow.bridge import random_derivation


def aid_step(conclusion="[a,-a]"):
    return Derivation(TRUE, (Step("aid", ROOT, parse(conclusion)),))


# ---------------------------------------------------------------------- check

def test_check_single_aid_ok():
    assert check(aid_step()).ok


def test_check_aid_not_dual_atoms():
    report = check(aid_step("[a,b]"))
    assert not report.ok
    assert report.step == 0
    assert "not dual atoms" in report.reason


def test_check_corpus_fig1_left(corpus):
    deriv = parse_derivation(corpus("fig1_left.sks"))
    assert check(deriv).ok
    assert deriv.premiss == TRUE and deriv.conclusion == TRUE
    assert len(deriv.steps) == 15


def test_check_reports_position_violation():
    bad = Derivation(parse("[a,b]"), (Step("acd", ROOT, parse("a")),))
    report = check(bad)
    assert not report.ok and report.step == 0


def test_rule_classification_flags():
    d = parse_derivation(format_derivation(aid_step()))
    assert d.is_proof() and d.is_ks() and d.is_cut_free()
    b = StepBuilder(parse("(a,-a)")).aiu(ROOT)
    d2 = b.derivation(parse("(a,-a)"))
    assert not d2.is_ks() and not d2.is_cut_free()


# -------------------------------------------------------------------- context

def test_include_in_context_prefixes():
    deriv = aid_step()
    inc = include_in_context(parse("[x,b]"), ("L",), deriv)
    assert inc.premiss == parse("[t,b]")
    assert inc.conclusion == parse("[[a,-a],b]")
    assert inc.steps[0].position == ("L",)
    assert check(inc).ok


def test_include_identity_context():
    deriv = aid_step()
    assert include_in_context(parse("x"), ROOT, deriv) == deriv


def test_include_nesting_composes_paths():
    deriv = aid_step()
    once = include_in_context(parse("([x,b],c)"), ("L", "L"), deriv)
    twice = include_in_context(
        parse("(x,c)"), ("L",), include_in_context(parse("[x,b]"), ("L",), deriv)
    )
    assert once == twice


# -------------------------------------------------------------------- compose

def test_compose_neutral():
    d = aid_step()
    empty = Derivation(d.conclusion)
    assert compose(d, empty) == d


def test_compose_with_eq_inverse():
    d = StepBuilder(parse("[a,b]")).eq(ROOT, "comm_dis").eq(ROOT, "unit_dis", forward=False).derivation(parse("[a,b]"))
    back = invert_steps(d)
    roundtrip = compose(d, back)
    assert check(roundtrip).ok
    assert roundtrip.premiss == roundtrip.conclusion == parse("[a,b]")


def test_compose_mismatch():
    with pytest.raises(DerivationError):
        compose(aid_step(), Derivation(parse("[b,-b]")))


# ------------------------------------------------------------------ substitute

def test_substitute_breaks_aid():
    d = aid_step()
    candidate, report = substitute(d, [(1, ("L",))], FALSE, ATOM_TO_FORMULA)
    assert candidate.steps[0].conclusion == parse("[f,-a]")
    assert not report.ok and report.step == 0


def test_substitute_acu_premiss_edge():
    d = StepBuilder(Atom("a")).acu(ROOT).derivation(Atom("a"))
    candidate, report = substitute(d, [(0, ROOT)], parse("[a,a]"), ATOM_TO_FORMULA)
    assert candidate.premiss == parse("[a,a]")
    assert not report.ok  # acu no longer applies to a compound formula


def test_substitute_identity_atom():
    d = aid_step()
    candidate, report = substitute(d, [(1, ("L",))], Atom("a"), ATOM_TO_FORMULA)
    assert candidate == d and report.ok


def test_substitute_rejects_incoherent():
    d = StepBuilder(parse("[a,b]")).eq(ROOT, "comm_dis").derivation(parse("[a,b]"))
    with pytest.raises(DerivationError):
        substitute(d, [(0, ("L",)), (1, ("L",))], FALSE, ATOM_TO_FORMULA)


# ---------------------------------------------------------------- super switch

def test_super_switch_worked_instance(corpus):
    deriv = parse_derivation(corpus("ss_example.sks"))
    assert check(deriv).ok
    built = build_super_switch(
        (parse("([x,b],c)"), ("L", "L")), (parse("[(d,x),e]"), ("L", "R")), Atom("a")
    )
    assert check(built).ok
    assert built.premiss == deriv.premiss
    assert built.conclusion == deriv.conclusion
    assert built.rules_used() <= {"s", "eq"}


def test_super_switch_identity_holes():
    d = build_super_switch((parse("x"), ROOT), (parse("x"), ROOT), Atom("a"))
    assert check(d).ok
    assert d.premiss == parse("(t,a)")
    assert d.conclusion == parse("[a,f]")


def test_super_switch_unit_case_is_eq_only():
    d = build_super_switch((parse("x"), ROOT), (parse("x"), ROOT), TRUE)
    assert check(d).ok
    assert d.rules_used() <= {"eq"}


# ---------------------------------------------------------- generic contraction

def test_contraction_atomic_base():
    d = build_generic_contraction(Atom("a"), down=True)
    assert [s.rule for s in d.steps] == ["acd"]


def test_cocontraction_of_disjunction_uses_acu_and_m():
    d = build_generic_contraction(parse("[a,b]"), down=False)
    assert check(d).ok
    assert d.premiss == parse("[a,b]") and d.conclusion == parse("([a,b],[a,b])")
    rules = d.rules_used()
    assert "acu" in rules and "m" in rules
    assert not rules & {"aid", "awd", "acd", "aiu", "awu"}


def test_contraction_of_true_is_eq_only():
    d = build_generic_contraction(TRUE, down=True)
    assert check(d).ok
    assert d.premiss == parse("[t,t]") and d.conclusion == TRUE
    assert d.rules_used() <= {"eq"}


@pytest.mark.parametrize("text", ["a", "-b", "[a,b]", "(a,[b,-c])", "t", "f", "[(a,t),f]"])
@pytest.mark.parametrize("down", [True, False])
def test_generic_contraction_contract(text, down):
    alpha = parse(text)
    d = build_generic_contraction(alpha, down)
    assert check(d).ok
    if down:
        assert d.premiss == Dis(alpha, alpha) and d.conclusion == alpha
        assert not d.rules_used() & {"aiu", "awu", "acu"}
    else:
        assert d.premiss == alpha and d.conclusion == Con(alpha, alpha)
        assert not d.rules_used() & {"aid", "awd", "acd"}


# -------------------------------------------------------------------- symmetry

@pytest.mark.parametrize("seed", range(8))
def test_dual_derivation_checks_and_swaps(seed):
    d = random_derivation(seed, vertices=4, roots=2)
    dd = dual_derivation(d)
    assert check(dd).ok
    assert dd.premiss == dual_formula(d.conclusion)
    assert dd.conclusion == dual_formula(d.premiss)
    down = {"aid", "awd", "acd"}
    up = {"aiu", "awu", "acu"}
    orig_structs = [s.rule for s in d.steps if s.rule in down | up]
    dual_structs = [s.rule for s in dd.steps if s.rule in down | up]
    swap = {"aid": "aiu", "aiu": "aid", "awd": "awu", "awu": "awd", "acd": "acu", "acu": "acd"}
    assert dual_structs == [swap[r] for r in reversed(orig_structs)]


# -------------------------------------------------------------------- occ maps

def test_occurrence_map_shapes():
    d = StepBuilder(parse("[a,a]")).acd(ROOT).derivation(parse("[a,a]"))
    m = occurrence_map(d.premiss, d.steps[0])
    assert m == {("L",): ROOT, ("R",): ROOT}
    d = StepBuilder(parse("(a,[b,c])")).s(ROOT).derivation(parse("(a,[b,c])"))
    m = occurrence_map(d.premiss, d.steps[0])
    assert m == {("L",): ("L", "L"), ("R", "L"): ("L", "R"), ("R", "R"): ("R",)}


# ------------------------------------------------------------------- text form

def test_format_parse_round_trip(corpus):
    for name in ("fig1_left.sks", "fig1_middle.sks", "fig1_right.sks", "fig5.sks", "ss_example.sks"):
        deriv = parse_derivation(corpus(name))
        assert check(deriv).ok
        again = parse_derivation(format_derivation(deriv))
        assert again.premiss == deriv.premiss
        assert [ (s.rule, s.position, s.conclusion) for s in again.steps ] == \
               [ (s.rule, s.position, s.conclusion) for s in deriv.steps ]


def test_expand_from_unit():
    phi = parse("[(f,t),[t,f]]")
    d = expand_from_unit(phi)
    assert check(d).ok
    assert d.premiss == TRUE and d.conclusion == phi
    assert d.rules_used() <= {"eq"}


def test_macro_tags_rejected_as_step_rules():
    with pytest.raises(DerivationError):
        parse_derivation("t\n-- ss @ /\n[a,f]\n")


def test_occurrence_set_validates():
    from sksflow.formula import occurrence_set
    phi = parse("[(a,-b),[a,a]]")
    occs = occurrence_set(phi, [("L", "L"), ("R", "L"), ("R", "R")])
    assert len(occs) == 3
    with pytest.raises(ValueError):
        occurrence_set(phi, [("L", "L"), ("L", "R")])  # a vs -b
    with pytest.raises(ValueError):
        occurrence_set(phi, [("R",)])  # not an atom
