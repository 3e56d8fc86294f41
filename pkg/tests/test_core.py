import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bmw import core
from bmw.core import A_SIDE, X_SIDE, PresentationError, letter

from conftest import BMW_NAMES, presentations

SV_DOC = {
    "a_gens": [{"name": "a", "involutive": False}, {"name": "b", "involutive": False}],
    "x_gens": [{"name": "x", "involutive": False}, {"name": "y", "involutive": False}],
    "squares": [["a", "x", "a", "y"], ["a", "x^-1", "b", "x^-1"], ["a", "y^-1", "b^-1", "y^-1"], ["b", "x", "b", "y^-1"]],
}


def test_letter_inverse():
    l = letter(A_SIDE, 0)
    assert l.inverse().inverse() == l
    assert l.inverse() != l
    t = letter(A_SIDE, 1, neg=True, involutive=True)
    assert not t.neg and t.inverse() == t


def test_parse_sv():
    p = core.parse(json.dumps(SV_DOC))
    assert (p.M, p.N) == (4, 4)
    assert len(p.squares) == 4
    assert p.squares == core.catalog("sv").squares


def test_parse_z2():
    doc = {"a_gens": [{"name": "a"}], "x_gens": [{"name": "x"}], "squares": [["a", "x", "a^-1", "x^-1"]]}
    p = core.parse(json.dumps(doc))
    assert core.is_valid(p)
    assert core.to_generic(p).relators == ((1, 2, -1, -2),)


@pytest.mark.parametrize(
    "doc",
    [
        {"a_gens": [{"name": "a"}], "x_gens": [{"name": "a"}], "squares": []},
        {"a_gens": [{"name": "a"}], "x_gens": [{"name": "x"}], "squares": [["a", "x", "a", "q"]]},
        {"a_gens": [{"name": "a"}], "x_gens": [{"name": "x"}], "squares": [["a", "a", "x", "x"]]},
        {"a_gens": [{"name": "a", "involutive": True}], "x_gens": [{"name": "x"}], "squares": [["a^-1", "x", "a", "x"]]},
    ],
    ids=["duplicate-name", "unknown-token", "wrong-side", "involutive-inverse"],
)
def test_parse_errors(doc):
    with pytest.raises(PresentationError):
        core.parse(json.dumps(doc))


def test_round_trip_idempotent():
    for n in BMW_NAMES:
        p = core.catalog(n)
        text = core.serialize(p)
        assert core.serialize(core.parse(text)) == text
        assert core.parse(text).squares == p.squares


def test_validate_sv_corner():
    p = core.catalog("sv")
    kappa = core.validate(p)
    a, x, y = p.lookup("a"), p.lookup("x"), p.lookup("y")
    assert kappa[(a, x)] == (a, y)


def test_validate_z2_corner():
    p = core.catalog("z2")
    kappa = core.validate(p)
    a, x = p.lookup("a"), p.lookup("x")
    assert kappa[(a, x)] == (a.inverse(), x.inverse())


def test_validate_missing_square():
    p = core.catalog("sv")
    q = p.relabel(squares=p.squares - {p.square("b x b y^-1")})
    rep = core.check(q)
    assert not rep.ok
    b, x = p.lookup("b"), p.lookup("x")
    assert (b, x) in rep.uncovered
    with pytest.raises(core.InvalidPresentation):
        core.validate(q)


def test_validate_double_cover():
    p = core.catalog("z2")
    q = p.relabel(squares=p.squares | {p.square("a x a x^-1")})
    rep = core.check(q)
    assert not rep.ok and rep.doubly_covered


def test_degenerate_rejected():
    p = core.BmwPresentation(("a",), (), (False,), (), frozenset())
    assert not core.is_valid(p)


@pytest.mark.parametrize("name,deg", [("rung", (3, 3)), ("wise", (4, 6)), ("c2xc2", (1, 1)), ("sv", (4, 4)), ("jw", (4, 4)),
                                      ("ratt", (4, 6)), ("bdr", (6, 6)), ("gamma33", (3, 3)), ("gamma45", (4, 5)),
                                      ("gamma66", (6, 6)), ("z2", (2, 2)), ("klein", (2, 2))])
def test_catalog_degrees(name, deg):
    p = core.catalog(name)
    core.validate(p)
    d = core.degree(p)
    assert tuple(d) == deg
    assert d.M == 2 * d.m + d.m_inv and d.N == 2 * d.n + d.n_inv


def test_corner_multiplicity_sums_to_MN():
    for n in BMW_NAMES:
        p = core.catalog(n)
        assert sum(len(s.corners()) for s in p.squares) == p.M * p.N


def test_torsion_profile():
    assert core.torsion_profile(core.catalog("sv"))["torsion_free"] is True
    assert core.torsion_profile(core.catalog("rung"))["torsion_free"] is False
    t = core.torsion_profile(core.catalog("gamma66"))
    assert t["generators_infinite_order"] is True
    assert t["square_count"] == 10 and t["mn"] == 9
    assert t["torsion_free"] is False
    assert "order 2" in core.catalog_meta("gamma66")["note"]


def test_parity_quotient():
    for n in BMW_NAMES:
        q = core.parity_quotient(core.catalog(n))
        assert q.index == 4
        assert all(pp == (0, 0) for pp in q.relator_parities)
        t = q.coset_table()
        assert t.index == 4 and t.rows.shape[1] == 2 * len(q.gens)
        assert t.is_consistent()
        assert t.satisfies(core.to_generic(core.catalog(n)).relators)


def test_amalgam_ranks():
    r = core.amalgam_ranks(4, 5)
    assert (r["via_T_X"]["factor"], r["via_T_X"]["amalgamated"]) == (3, 11)
    r = core.amalgam_ranks(6, 6)
    assert (r["via_T_A"]["factor"], r["via_T_A"]["amalgamated"]) == (5, 25)
    r = core.amalgam_ranks(2, 2)
    assert (r["via_T_A"]["factor"], r["via_T_A"]["amalgamated"]) == (1, 1)
    assert "edge-transitively" in r["via_T_A"]["caveat"]


def test_is_subpresentation():
    assert core.is_subpresentation(core.catalog("jw"), core.catalog("gamma66"))
    assert core.is_subpresentation(core.catalog("gamma33"), core.catalog("gamma45"))
    assert not core.is_subpresentation(core.catalog("sv"), core.catalog("jw"))


def test_catalog_entries():
    w = core.catalog("wise")
    assert len(w.a_names + w.x_names) == 5 and len(w.squares) == 6
    g = core.catalog("gamma45plus")
    assert len(g.gens) == 6 and len(g.relators) == 11
    with pytest.raises(KeyError):
        core.catalog("nosuch")
    assert set(BMW_NAMES) == set(core.catalog_names("bmw"))


def test_generic_parse_commutator():
    g = core.GenericPresentation.from_strings(["x", "y"], ["[x^3,y^4]"])
    assert g.relators[0] == (1, 1, 1, 2, 2, 2, 2, -1, -1, -1, -2, -2, -2, -2)
    with pytest.raises(PresentationError):
        core.GenericPresentation.from_strings(["x"], ["x q"])


def test_catalog_override(tmp_path, monkeypatch):
    (tmp_path / "only.json").write_text(json.dumps(SV_DOC))
    monkeypatch.setenv("BMW_CATALOG", str(tmp_path))
    assert core.catalog_names() == ["only"]
    assert core.catalog("only").M == 4


def _check_four_readings(p):
    kappa = core.validate(p)
    assert len(kappa) == p.M * p.N
    for (a, x), (a2, x2) in kappa.items():
        assert kappa[(a2, x2)] == (a, x)
        assert kappa[(a2.inverse(), x.inverse())] == (a.inverse(), x2.inverse())
        assert kappa[(a.inverse(), x2.inverse())] == (a2.inverse(), x.inverse())
        assert core.Square(a, x, a2, x2).canonical() == kappa.owner[(a, x)]


@pytest.mark.parametrize("name", BMW_NAMES)
def test_catalog_four_readings(name):
    _check_four_readings(core.catalog(name))


@settings(max_examples=150, deadline=None)
@given(st.one_of(presentations(), st.sampled_from(BMW_NAMES).map(core.catalog)))
def test_corner_map_four_reading_symmetry(p):
    _check_four_readings(p)
    q = core.parse(core.serialize(p))
    assert q.squares == p.squares and core.check(q).ok
