import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.combinatorics.fp_groups import FpGroup
from sympy.combinatorics.free_groups import free_group

from bmw import core
from bmw.core import GenericPresentation
from bmw.cosetenum import (
    Overflow,
    abelianization,
    conjugacy_class_reps,
    dihedral,
    escher_assignment,
    exponent_matrix,
    find_homomorphisms,
    heisenberg_regular,
    higman_scan,
    named_target,
    quotient_order,
    reidemeister_schreier,
    smith_normal_form,
    spanning_tree,
    tietze_reduce,
    todd_coxeter,
    verify_homomorphism,
)
from bmw.localaction import sigma
from bmw.permgroup import PermGroup, Permutation


def G(gens, rels, name=""):
    return GenericPresentation.from_strings(gens, rels, name)


def _sympy_order(gens, rels):
    F, *syms = free_group(",".join(gens))
    env = dict(zip(gens, syms))
    words = [eval(r, {}, env) for r in rels]
    return FpGroup(F, words).order()


# ---------------------------------------------------------------------------
# Todd-Coxeter


@pytest.mark.parametrize(
    "gens,rels,order",
    [
        ("ab", ["a^2", "b^3", "a b a b a b a b a b"], 60),
        ("ab", ["a^2", "b^3", "a b a b a b a b"], 24),
        ("ab", ["a^4", "b^2", "a b a b"], 8),
        ("ab", ["a^3", "b^3", "a b a b"], 12),
        ("ab", ["a^5", "b^3", "[a,b]"], 15),
        ("abc", ["a^2", "b^2", "c^2", "a b a b", "b c b c b c", "a c a c a c"], 24),
    ],
)
@pytest.mark.parametrize("strategy", ["hlt", "felsch", "hlt+felsch"])
def test_group_orders(gens, rels, order, strategy):
    assert quotient_order(G(gens, rels), strategy=strategy) == order


def test_orders_agree_with_sympy():
    cases = [
        ("ab", ["a**2", "b**3", "(a*b)**5"], ["a^2", "b^3", "a b a b a b a b a b"]),
        ("ab", ["a**6", "b**2", "(a*b)**2"], ["a^6", "b^2", "a b a b"]),
        ("ab", ["a**3", "b**3", "(a*b)**3", "(a*b**-1)**3"], ["a^3", "b^3", "a b a b a b", "a b^-1 a b^-1 a b^-1"]),
    ]
    for gens, srels, rels in cases:
        assert quotient_order(G(gens, rels)) == _sympy_order(gens, srels)


def test_subgroup_index_and_table():
    g = G("ab", ["a^2", "b^3", "a b a b a b a b a b"])
    t = todd_coxeter(g, ["b"])
    assert t.index == 20
    assert t.is_consistent() and t.satisfies(g.relators)
    assert t.trace(0, g.word("b")) == 0
    assert PermGroup(t.permutations(), degree=20).order() == 60


def test_regular_action_on_trivial_subgroup():
    g = G("ab", ["a^4", "b^2", "a b a b"])
    t = todd_coxeter(g)
    grp = PermGroup(t.permutations(), degree=t.index)
    assert grp.order() == t.index == 8


def test_overflow_is_not_a_claim():
    with pytest.raises(Overflow):
        quotient_order(core.catalog("z2"), max_cosets=1000)


def test_killing_all_generators(cat):
    p = cat("gamma66")
    g = core.to_generic(p)
    assert quotient_order(p, list(g.gens)) == 1


def test_bad_strategy_and_limit():
    with pytest.raises(KeyError):
        quotient_order(G("a", ["a^2"]), strategy="dfs")
    with pytest.raises(ValueError):
        quotient_order(G("a", ["a^2"]), max_cosets=0)


FINITE_TRIANGLES = [(2, 2, n) for n in range(2, 12)] + [(2, 3, 3), (2, 3, 4), (2, 3, 5)]


@settings(max_examples=120, deadline=None)
@given(st.sampled_from(FINITE_TRIANGLES), st.permutations([0, 1, 2]), st.sampled_from(["hlt", "felsch", "hlt+felsch"]))
def test_triangle_group_orders(lmn, perm, strategy):
    l, m, n = (lmn[i] for i in perm)
    order = Fraction(2) / (Fraction(1, l) + Fraction(1, m) + Fraction(1, n) - 1)
    g = G("ab", [f"a^{l}", f"b^{m}", " ".join(["a b"] * n)])
    t = todd_coxeter(g, strategy=strategy)
    assert t.index == order
    # a has order exactly l in a spherical triangle group
    assert todd_coxeter(g, ["a"], strategy=strategy).index == order / l


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 3))
def test_abelian_orders(m, n, extra):
    rels = [f"a^{m}", f"b^{n}", "[a,b]"] + [f"a^{m}"] * extra
    assert quotient_order(G("ab", rels)) == m * n


# ---------------------------------------------------------------------------
# Reidemeister-Schreier and Tietze


def test_even_length_subgroup_of_free_group():
    g = GenericPresentation(("a", "b"), ())
    t = todd_coxeter(g, ["a^2", "a b", "a b^-1"])
    assert t.index == 2
    s = reidemeister_schreier(g, t)
    assert len(s.gens) == 3 and not s.relators
    assert abelianization(s).free_rank == 3


def test_index_one_subgroup():
    g = G("ab", ["a^2", "b^3"])
    t = todd_coxeter(g, ["a", "b"])
    s = reidemeister_schreier(g, t, simplify=False)
    assert len(s.gens) == 2
    assert abelianization(s) == abelianization(g)


def test_rs_of_finite_group():
    g = G("ab", ["a^2", "b^3", "a b a b a b a b a b"])
    t = todd_coxeter(g, ["b"])
    s = reidemeister_schreier(g, t)
    assert quotient_order(s) == 3


@pytest.mark.parametrize("name", ["gamma45", "gamma66"])
def test_parity_subgroups_are_perfect(cat, name):
    p = cat(name)
    q = core.parity_quotient(p)
    s = reidemeister_schreier(p, q.coset_table())
    assert abelianization(s).is_trivial()


def test_tree_choice_does_not_change_abelianization(cat):
    p = cat("gamma45")
    t = core.parity_quotient(p).coset_table()
    cols = list(range(t.rows.shape[1]))
    a = abelianization(reidemeister_schreier(p, t))
    b = abelianization(reidemeister_schreier(p, t, tree_order=cols[::-1]))
    assert a == b
    tree = spanning_tree(t, cols[::-1])
    assert len(tree) == t.index


def test_tietze_preserves_order():
    g = G("abc", ["a^2", "b^3", "c^-1 a b", "c^5"])
    r = tietze_reduce(g)
    assert len(r.gens) < len(g.gens)
    assert quotient_order(r) == quotient_order(g) == 60


# ---------------------------------------------------------------------------
# Smith normal form and abelianization


def _det(m):
    return int(sympy.Matrix(m).det())


def _determinantal_invariants(m):
    """d_k = D_k / D_{k-1} with D_k the gcd of all k x k minors."""
    rows, cols = len(m), len(m[0])
    out, prev = [], 1
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in itertools.combinations(range(rows), k):
            for cs in itertools.combinations(range(cols), k):
                g = math.gcd(g, _det([[m[i][j] for j in cs] for i in rs]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def test_snf_examples():
    assert smith_normal_form([[2, 0], [0, 3]]).diagonal == [1, 6]
    assert smith_normal_form([[0, 0], [0, 0]]).diagonal == [0, 0]
    assert smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]).diagonal == [2, 6, 12]


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_snf_against_determinantal_divisors(r, c, data):
    m = [[data.draw(st.integers(-9, 9)) for _ in range(c)] for _ in range(r)]
    s = smith_normal_form(m)
    nz = [d for d in s.diagonal if d]
    assert nz == _determinantal_invariants(m)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert abs(_det(s.U)) == 1 and abs(_det(s.V)) == 1
    assert (sympy.Matrix(s.U) * sympy.Matrix(m) * sympy.Matrix(s.V)).tolist() == s.D


def test_catalog_abelianizations():
    assert abelianization(core.catalog("gamma45plus")).is_trivial()
    assert str(abelianization(core.catalog("higman"))) == "trivial"
    assert str(abelianization(core.catalog("klein"))) == "Z + Z/2"
    assert str(abelianization(core.catalog("escher"))) == "Z/7 + Z/14"
    assert exponent_matrix(G("ab", ["a^2 b^-1"])) == [[2, -1]]


def _random_tietze(g, rng):
    gens, rels = list(g.gens), [list(r) for r in g.relators]
    for _ in range(4):
        move = rng.randrange(4)
        if move == 0 and rels:  # replace a relator by a cyclic conjugate
            i = rng.randrange(len(rels))
            k = rng.randrange(len(rels[i]))
            rels[i] = rels[i][k:] + rels[i][:k]
        elif move == 1 and rels:  # multiply one relator by another
            i, j = rng.randrange(len(rels)), rng.randrange(len(rels))
            rels.append(rels[i] + [-l for l in reversed(rels[j])])
        elif move == 2:  # new generator equal to a word
            w = [rng.choice([1, -1]) * rng.randint(1, len(gens)) for _ in range(rng.randint(1, 4))]
            gens.append(f"g{len(gens)}")
            rels.append(w + [-len(gens)])
        elif rels:  # invert a relator
            i = rng.randrange(len(rels))
            rels[i] = [-l for l in reversed(rels[i])]
    return GenericPresentation(tuple(gens), tuple(tuple(r) for r in rels))


@st.composite
def small_presentations(draw):
    k = draw(st.integers(1, 3))
    letters = st.sampled_from([s * i for i in range(1, k + 1) for s in (1, -1)])
    rels = draw(st.lists(st.lists(letters, min_size=1, max_size=8), min_size=0, max_size=4))
    return GenericPresentation(tuple("abc"[:k]), tuple(tuple(r) for r in rels))


@settings(max_examples=120, deadline=None)
@given(small_presentations(), st.integers(0, 2**32 - 1))
def test_abelianization_invariant_under_tietze_moves(g, seed):
    h = _random_tietze(g, random.Random(seed))
    assert abelianization(h) == abelianization(g)
    assert abelianization(tietze_reduce(h)) == abelianization(g)


def _hom_count_abelian(ab, factors):
    """|Hom(A, C_f1 x C_f2 x ...)| for A = Z^r + sum Z/d."""
    total = 1
    for f in factors:
        total *= f ** ab.free_rank
        for d in ab.torsion:
            total *= math.gcd(d, f)
    return total


ABELIAN_TARGETS = {
    "C2": ([Permutation([1, 0])], [2]),
    "C2xC2": ([Permutation([1, 0, 3, 2]), Permutation([2, 3, 0, 1])], [2, 2]),
    "C6": ([Permutation([1, 2, 3, 4, 5, 0])], [6]),
}


@settings(max_examples=100, deadline=None)
@given(small_presentations(), st.sampled_from(sorted(ABELIAN_TARGETS)))
def test_hom_counts_into_abelian_targets(g, name):
    gens, factors = ABELIAN_TARGETS[name]
    target = PermGroup(gens, degree=gens[0].degree)
    assert len(find_homomorphisms(g, target)) == _hom_count_abelian(abelianization(g), factors)


# ---------------------------------------------------------------------------
# homomorphisms into permutation groups


def test_free_group_to_sym3():
    assert len(find_homomorphisms(GenericPresentation(("a", "b"), ()), named_target("sym3"))) == 36


def test_surjections_and_conjugacy_pruning():
    g = G("ab", ["a^2", "b^3", "a b a b a b"])  # Alt(4)
    alt4 = PermGroup.alternating(4)
    homs = find_homomorphisms(g, alt4)
    surj = find_homomorphisms(g, alt4, surjective_only=True)
    assert len(surj) == 24  # surjections onto Alt(4) are its automorphisms, |Aut(Alt(4))| = 24
    reps = find_homomorphisms(g, alt4, up_to_conjugacy=True)
    assert 0 < len(reps) < len(homs)
    assert len(find_homomorphisms(g, alt4, limit=3)) == 3


def test_parallel_search_matches_serial():
    g = core.catalog("baumslag")
    target = named_target("sym4")
    a = find_homomorphisms(g, target)
    b = find_homomorphisms(g, target, jobs=2)
    assert a == b


def test_baumslag_images_cyclic():
    g = core.catalog("baumslag")
    for h in find_homomorphisms(g, named_target("sym5")):
        grp = PermGroup(list(h), degree=5)
        assert grp.is_cyclic()


def test_higman_small_targets():
    h = core.catalog("higman")
    homs = find_homomorphisms(h, named_target("sym5"))
    assert len(homs) == 1 and all(x.is_identity() for x in homs[0])


def test_named_targets():
    assert named_target("sym5").order() == 120
    assert named_target("Alt6").order() == 360
    with pytest.raises(ValueError):
        named_target("psl27")


def test_conjugacy_class_reps_sym4():
    s4 = PermGroup.symmetric(4)
    E = np.array([e.array for e in s4.elements()])
    assert len(conjugacy_class_reps(E, [g.array for g in s4.generators])) == 5


def test_verify_homomorphism_examples(cat):
    e = cat("escher")
    ok, order = verify_homomorphism(e, escher_assignment())
    assert ok and order == 50078 == 343 * 146
    ident = {n: Permutation.identity(5) for n in e.gens}
    assert verify_homomorphism(e, ident) == (True, 1)
    sv = cat("sv")
    g = core.to_generic(sv)
    asg = {}
    for name in g.gens:
        l = sv.lookup(name)
        asg[name] = sigma(sv, "X", l).perm if l.side == core.A_SIDE else Permutation.identity(4)
    assert verify_homomorphism(sv, asg)[0] is False
    with pytest.raises(ValueError):
        verify_homomorphism(G("ab", []), [Permutation.identity(2), Permutation.identity(3)])


def test_heisenberg_and_dihedral():
    x, y, z = heisenberg_regular(7)
    grp = PermGroup([x, y], degree=343)
    assert grp.order() == 343
    assert x * z == z * x and y * z == z * y and not (x * y == y * x)
    t, r = dihedral(73)
    assert PermGroup([t, r], degree=73).order() == 146


def test_higman_scan():
    assert higman_scan(1000) == [n for n in range(1, 1001) if (2**n - 1) % n == 0] == [1]
    with pytest.raises(ValueError):
        higman_scan(0)
