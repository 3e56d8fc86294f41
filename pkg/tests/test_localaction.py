import pytest
from hypothesis import given, settings

from bmw import core
from bmw.core import A_SIDE, X_SIDE
from bmw.localaction import (
    classify,
    format_table1,
    local_generators,
    local_group,
    parse_side,
    sigma,
    star_labels,
    table1_report,
)
from bmw.permgroup import Permutation

from conftest import presentations

TABLE1 = {
    "rung": (3, "Sym(3)", 3, "Sym(3)"),
    "gamma33": (3, "Sym(3)", 3, "C2"),
    "sv": (4, "Sym(4)", 4, "Sym(4)"),
    "jw": (4, "Alt(4)", 4, "D8"),
    "gamma45": (4, "Sym(4)", 5, "Sym(5)"),
    "wise": (4, "C2×C2", 6, "Sym(3)×Sym(3)"),
    "ratt": (4, "Sym(4)", 6, "PGL2(F5)"),
    "bdr": (6, "Sym(3)×C3", 6, "Sym(3)×C3"),
    "gamma66": (6, "Sym(6)", 6, "Alt(6)"),
}


def test_sv_sigma_a_is_four_cycle(cat):
    sv = cat("sv")
    s = sigma(sv, "X", sv.lookup("a"))
    assert s.cycle_notation(sv) == "(x, y^-1, y, x^-1)"


def test_sv_sigma_b_from_corner_map(cat):
    sv = cat("sv")
    assert sigma(sv, "X", sv.lookup("b")).cycle_notation(sv) == "(x, y, y^-1, x^-1)"
    assert local_group(sv, "X").order() == 24


def test_jw_cycles(cat):
    jw = cat("jw")
    x_side = [g.cycle_notation(jw) for g in local_generators(jw, "X")]
    a_side = [g.cycle_notation(jw) for g in local_generators(jw, "A")]
    assert x_side == ["(x, y^-1)(y, x^-1)", "(x, y, x^-1, y^-1)"]
    assert a_side == ["(a, a^-1, b)", "(a, a^-1, b^-1)"]


def test_z2_local_action_trivial(cat):
    z = cat("z2")
    for side in "AX":
        assert all(g.perm.is_identity() for g in local_generators(z, side))


def test_sigma_rejects_same_side(cat):
    sv = cat("sv")
    with pytest.raises(ValueError):
        sigma(sv, "A", sv.lookup("a"))


def test_parse_side():
    assert parse_side("a") == A_SIDE and parse_side("X") == X_SIDE
    with pytest.raises(ValueError):
        parse_side("q")


def test_star_labels_cover_letters(cat):
    p = cat("gamma45")
    assert len(star_labels(p, "X")) == p.N
    assert len(star_labels(p, "A")) == p.M


@pytest.mark.parametrize("name", sorted(TABLE1))
def test_table1_rows(name):
    row = {r.name: r for r in table1_report([name])}[name]
    assert row.as_tuple() == TABLE1[name]


def test_table1_markdown_header():
    text = format_table1(table1_report(["rung"]), "markdown")
    assert text.splitlines()[0].startswith("| group |")
    with pytest.raises(ValueError):
        format_table1([], "html")


def test_classify_reports(cat):
    wise = classify(cat("wise"))
    assert wise["A"].label == "C2×C2" and wise["A"].nilpotent and wise["A"].note
    assert not wise["X"].two_transitive
    jw = classify(cat("jw"))
    assert jw["A"].label == "Alt(4)" and jw["A"].contains_alt and jw["A"].two_transitive
    assert jw["X"].nilpotent and not jw["X"].primitive
    g45 = classify(cat("gamma45"))
    assert g45["X"].label == "Sym(5)" and g45["X"].contains_alt
    assert g45["A"].projective_type is True


def test_klein_local_orders(cat):
    k = cat("klein")
    assert local_group(k, "A").order() == 1
    assert local_group(k, "X").order() == 2


@settings(max_examples=150, deadline=None)
@given(presentations())
def test_sigma_of_inverse_is_inverse(p):
    for side in (A_SIDE, X_SIDE):
        other = X_SIDE if side == A_SIDE else A_SIDE
        for g in p.letters(other):
            s, t = sigma(p, side, g).perm, sigma(p, side, g.inverse()).perm
            assert s * t == Permutation.identity(s.degree)
            if g.involutive:
                assert s * s == Permutation.identity(s.degree)


@settings(max_examples=100, deadline=None)
@given(presentations())
def test_local_group_is_generated_by_sigmas(p):
    for side in "AX":
        grp = local_group(p, side)
        assert all(s.perm in grp for s in local_generators(p, side))
        assert grp.degree == (p.M if side == "A" else p.N)
