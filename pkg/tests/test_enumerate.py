import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bmw.core import A_SIDE, X_SIDE, BmwPresentation, Square, check, letter
from bmw.enumerate import (
    BudgetExceeded,
    Profile,
    canonical_form,
    corner_table,
    count,
    enumerate_presentations,
    filter_enumeration,
    presentation_from_table,
    random_presentation,
    relabel,
    side_symmetries,
    swap_sides,
)
from bmw.localaction import local_group

from conftest import SMALL_PROFILES, presentations


# ---------------------------------------------------------------------------
# brute-force oracle: exact covers of the corners by squares, up to relabeling


def _side_letters(side, k, k_inv):
    out = []
    for i in range(k):
        out += [letter(side, i), letter(side, i, True)]
    out += [letter(side, k + j, involutive=True) for j in range(k_inv)]
    return out


def _oracle_classes(prof, torsion_free, with_swap):
    la = _side_letters(A_SIDE, prof.m, prof.m_inv)
    lx = _side_letters(X_SIDE, prof.n, prof.n_inv)
    squares = {}
    for a1, x1, a2, x2 in itertools.product(la, lx, la, lx):
        s = Square(a1, x1, a2, x2).canonical()
        try:
            cs = frozenset(s.corners())
        except Exception:
            continue
        if torsion_free and len(cs) < 4:
            continue
        squares[s] = cs
    corners = [(a, x) for a in la for x in lx]
    by_corner = {c: [s for s, cs in squares.items() if c in cs] for c in corners}
    covers = []

    def rec(covered, chosen):
        free = [c for c in corners if c not in covered]
        if not free:
            covers.append(frozenset(chosen))
            return
        for s in by_corner[free[0]]:
            if squares[s].isdisjoint(covered):
                rec(covered | squares[s], chosen + [s])

    rec(frozenset(), [])

    def side_maps(side, k, k_inv):
        for perm in itertools.permutations(range(k)):
            for flips in itertools.product((False, True), repeat=k):
                for iperm in itertools.permutations(range(k_inv)):
                    def f(l, perm=perm, flips=flips, iperm=iperm):
                        if l.involutive:
                            return letter(side, k + iperm[l.id - k], involutive=True)
                        return letter(side, perm[l.id], l.neg != flips[l.id])
                    yield f

    maps = [(fa, fx) for fa in side_maps(A_SIDE, prof.m, prof.m_inv) for fx in side_maps(X_SIDE, prof.n, prof.n_inv)]

    def key(sqs):
        return tuple(sorted(sqs))

    def images(sqs):
        for fa, fx in maps:
            yield key(Square(fa(s.a1), fx(s.x1), fa(s.a2), fx(s.x2)).canonical() for s in sqs)
        if with_swap:
            flip = lambda l: l._replace(side=1 - l.side)
            swapped = [Square(flip(s.x1), flip(s.a2), flip(s.x2), flip(s.a1)).canonical() for s in sqs]
            for fa, fx in maps:
                yield key(Square(fa(s.a1), fx(s.x1), fa(s.a2), fx(s.x2)).canonical() for s in swapped)

    names_a = tuple(f"a{i}" for i in range(prof.m + prof.m_inv))
    names_x = tuple(f"x{i}" for i in range(prof.n + prof.n_inv))
    inv_a = (False,) * prof.m + (True,) * prof.m_inv
    inv_x = (False,) * prof.n + (True,) * prof.n_inv
    classes = set()
    for c in covers:
        assert check(BmwPresentation(names_a, names_x, inv_a, inv_x, c)).ok
        classes.add(min(images(c)))
    return len(classes)


ORACLE_CASES = [
    (Profile(0, 1, 0, 1), False),
    (Profile(1, 0, 1, 0), False),
    (Profile(1, 0, 1, 0), True),
    (Profile(1, 1, 1, 0), False),
    (Profile(0, 2, 1, 0), False),
    (Profile(1, 0, 0, 3), False),
    (Profile(0, 2, 0, 2), False),
    (Profile(2, 0, 1, 0), True),
    (Profile(2, 0, 2, 0), True),
]


@pytest.mark.parametrize("prof,tf", ORACLE_CASES)
@pytest.mark.parametrize("mode", ["complexes", "presentations"])
def test_counts_match_brute_force(prof, tf, mode):
    if mode == "complexes" and not prof.swappable:
        with_swap = False
    else:
        with_swap = mode == "complexes"
    assert count(prof, mode, torsion_free=tf) == _oracle_classes(prof, tf, with_swap)


def test_published_counts():
    assert count(Profile(0, 1, 0, 1)) == 1
    assert count(Profile.torsion_free(2, 2), torsion_free=True) == 2
    assert count(Profile.torsion_free(4, 4), torsion_free=True) == 52


def test_derived_counts():
    assert count(Profile.torsion_free(4, 4), "presentations", torsion_free=True) == 98
    assert count(Profile(1, 1, 1, 1)) == 13
    assert count(Profile.torsion_free(2, 4), torsion_free=True) == 9
    assert count(Profile(0, 3, 0, 3)) == 20


def test_bad_arguments():
    with pytest.raises(ValueError):
        Profile.torsion_free(3, 2)
    with pytest.raises(ValueError):
        count(Profile(1, 1, 1, 0), torsion_free=True)
    with pytest.raises(ValueError):
        count(Profile(1, 0, 1, 0), "graphs")
    with pytest.raises(ValueError):
        count(Profile(0, 0, 1, 0))


def test_side_symmetries_commute_with_inversion():
    syms = side_symmetries(2, 1)
    assert len(syms) == 8
    inv = np.array([2, 3, 0, 1, 4])
    for s in syms:
        assert (s[inv] == inv[s]).all()


def test_canonical_separates_sv_and_jw(cat):
    sv, jw = cat("sv"), cat("jw")
    assert Profile.of(sv) == Profile.of(jw)
    assert canonical_form(sv, True) != canonical_form(jw, True)


def test_swap_sides(cat):
    sv = cat("sv")
    s = swap_sides(sv)
    assert check(s).ok
    assert canonical_form(s, True) == canonical_form(sv, True)
    with pytest.raises(ValueError):
        swap_sides(cat("gamma45"))


def test_emitted_presentations_validate():
    res = enumerate_presentations(Profile.torsion_free(4, 4), torsion_free=True)
    ps = list(res.presentations())
    assert len(ps) == 52
    for p in ps:
        assert check(p).ok
        assert canonical_form(p, True) == canonical_form(presentation_from_table(Profile.of(p), corner_table(p)), True)
    forms = [canonical_form(p, True) for p in ps]
    assert len(set(forms)) == 52


def test_catalog_groups_among_the_52(cat):
    res = enumerate_presentations(Profile.torsion_free(4, 4), torsion_free=True)
    sv, jw = canonical_form(cat("sv"), True), canonical_form(cat("jw"), True)
    assert sv in res.forms and jw in res.forms and sv != jw
    both = lambda p: local_group(p, "A").is_k_transitive(2) and local_group(p, "X").is_k_transitive(2)
    assert filter_enumeration(res.presentations()) == 52
    assert filter_enumeration(res.presentations(), both) == 1


def test_checkpoint_resume(tmp_path):
    prof = Profile.torsion_free(4, 4)
    ck = tmp_path / "ck.json"
    with pytest.raises(BudgetExceeded) as err:
        enumerate_presentations(prof, torsion_free=True, checkpoint=ck, max_prefixes=3)
    assert err.value.checkpoint == str(ck)
    assert len(json.loads(ck.read_text())["done"]) == 3
    res = enumerate_presentations(prof, torsion_free=True, checkpoint=ck)
    assert res.count == 52
    with pytest.raises(ValueError):
        enumerate_presentations(Profile.torsion_free(2, 4), torsion_free=True, checkpoint=ck)


def test_parallel_matches_serial():
    prof = Profile.torsion_free(4, 4)
    serial = enumerate_presentations(prof, torsion_free=True, jobs=1).forms
    assert enumerate_presentations(prof, torsion_free=True, jobs=2).forms == serial


@settings(max_examples=100, deadline=None)
@given(presentations(), st.data())
def test_canonical_form_is_relabeling_invariant(p, data):
    prof = Profile.of(p)
    sa = side_symmetries(prof.m, prof.m_inv)
    sx = side_symmetries(prof.n, prof.n_inv)
    a = sa[data.draw(st.integers(0, len(sa) - 1))]
    x = sx[data.draw(st.integers(0, len(sx) - 1))]
    q = relabel(p, a, x)
    assert check(q).ok
    assert canonical_form(q) == canonical_form(p)
    if prof.swappable:
        assert canonical_form(swap_sides(q), True) == canonical_form(p, True)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(SMALL_PROFILES), st.integers(0, 2**32 - 1))
def test_random_presentation_round_trip(prof, seed):
    p = random_presentation(prof, np.random.default_rng(seed))
    assert Profile.of(p) == prof
    q = presentation_from_table(prof, corner_table(p), (p.a_names, p.x_names))
    assert q.squares == p.squares


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(SMALL_PROFILES[:6]), st.sampled_from([2, 3]))
def test_enumeration_deterministic_across_workers(prof, jobs):
    serial = enumerate_presentations(prof, jobs=1, split_depth=1).forms
    assert enumerate_presentations(prof, jobs=jobs, split_depth=1).forms == serial
