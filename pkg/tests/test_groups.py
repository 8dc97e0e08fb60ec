import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from outerlab.config import Config
from outerlab.errors import GroupConstructionError, NotNormalError, SizeError
from outerlab.groups import (
    FiniteGroup,
    Subgroup,
    all_subgroups,
    automorphism_group,
    automorphism_group_bruteforce,
    build_group,
    center,
    centralizer,
    compose_autos,
    conjugate_subgroup,
    conjugation,
    cycles_to_perm,
    fixed_subgroup,
    from_permutations,
    identity_auto,
    inner_automorphisms,
    invert_auto,
    normalizer,
    perm_mul,
    preset,
    quotient_group,
    subgroup_classes,
    subgroup_generated,
    trivial,
    whole,
    Automorphism,
)

SMALL = ["cyclic 1", "cyclic 2", "cyclic 6", "cyclic 8", "symmetric 3", "dihedral 4", "quaternion8",
         "cyclic 2 x cyclic 2", "alternating 4", "cyclic 3 x cyclic 3", "cyclic 2 x cyclic 4"]


# --- table validation --------------------------------------------------------


def test_c2_table_accepted():
    G = FiniteGroup.from_table([[0, 1], [1, 0]])
    assert G.order == 2 and G.inverse == (0, 1)


def test_non_latin_rejected_with_location():
    with pytest.raises(GroupConstructionError, match="row 1"):
        FiniteGroup.from_table([[0, 1, 2], [1, 1, 0], [2, 0, 1]])


def test_non_associative_loop_rejected():
    # a Latin square with identity 0 but no associativity (order-5 loop)
    loop = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(GroupConstructionError, match="associativity fails for triple"):
        FiniteGroup.from_table(loop)


def test_out_of_range_cell():
    with pytest.raises(GroupConstructionError, match="cell"):
        FiniteGroup.from_table([[0, 5], [1, 0]])


def test_identity_moved_to_zero():
    # identity sits at index 1 in the input
    G = FiniteGroup.from_table([[1, 0], [0, 1]])
    assert G.table[0] == (0, 1)


def test_size_cap_on_permutations():
    cfg = Config(max_group_order=10)
    with pytest.raises(SizeError):
        from_permutations([cycles_to_perm([[1, 2]], 4), cycles_to_perm([[1, 2, 3, 4]], 4)], 4, cfg)


@pytest.mark.parametrize("name,order", [
    ("cyclic 8", 8), ("dihedral 4", 8), ("symmetric 3", 6), ("symmetric 4", 24), ("alternating 4", 12),
    ("quaternion8", 8), ("cyclic 2 x dihedral 4", 16), ("product cyclic 3 x cyclic 3", 9),
])
def test_preset_orders(name, order):
    assert preset(name).order == order


def test_unknown_preset():
    with pytest.raises(GroupConstructionError):
        preset("sporadic 7")


def test_build_group_sources_agree():
    a = build_group({"preset": "symmetric 3"})
    b = build_group({"perm": [[[1, 2]], [[1, 2, 3]]], "degree": 3})
    c = build_group({"cayley": [list(r) for r in a.table]})
    assert a.table == b.table == c.table


def test_perm_product_applies_left_first():
    p = cycles_to_perm([[1, 2]], 3)
    q = cycles_to_perm([[2, 3]], 3)
    # 1 -> 2 under p, then 2 -> 3 under q
    assert perm_mul(p, q)[0] == 2


@pytest.mark.parametrize("name", SMALL)
def test_element_orders_divide_group_order(name):
    G = preset(name)
    assert all(G.order % o == 0 for o in G.orders)


def test_quaternion_census():
    assert preset("quaternion8").order_census() == [1, 2, 4, 4, 4, 4, 4, 4]


# --- subgroups ---------------------------------------------------------------


def test_subgroup_closure_violation():
    S3 = preset("symmetric 3")
    with pytest.raises(GroupConstructionError):
        Subgroup(S3, (0, 1, 2))


@pytest.mark.parametrize("name", SMALL)
def test_subgroups_closed_and_lagrange(name):
    G = preset(name)
    tbl = G.table
    for S in all_subgroups(G):
        assert G.order % S.order == 0
        assert all(tbl[a][b] in S.members for a in S for b in S)


def test_s3_subgroup_census():
    S3 = preset("symmetric 3")
    assert sorted(S.order for S in all_subgroups(S3)) == [1, 2, 2, 2, 3, 6]
    assert sorted(S.order for S in subgroup_classes(S3)) == [1, 2, 3, 6]


@pytest.mark.parametrize("name", SMALL)
def test_center_centralizer_normalizer_by_definition(name):
    G = preset(name)
    Z = center(G)
    assert Z.members == {z for z in G.elements if all(G.mul(z, g) == G.mul(g, z) for g in G.elements)}
    for S in subgroup_classes(G):
        C = centralizer(G, S)
        N = normalizer(G, S)
        assert C.members == {g for g in G.elements if all(G.mul(g, s) == G.mul(s, g) for s in S)}
        assert N.members == {g for g in G.elements if {G.conj(s, g) for s in S} == S.members}
        assert C <= N


@pytest.mark.parametrize("name", SMALL)
def test_conjugate_subgroup_same_order(name):
    G = preset(name)
    for S in subgroup_classes(G):
        assert all(conjugate_subgroup(G, S, a).order == S.order for a in G.elements)


def test_quotient_and_non_normal():
    S3 = preset("symmetric 3")
    A3 = subgroup_generated(S3, [3])
    Q, proj = quotient_group(S3, A3)
    assert Q.order == 2 and proj[0] == 0
    with pytest.raises(NotNormalError):
        quotient_group(S3, subgroup_generated(S3, [1]))


def test_left_transversal_minimal():
    C8 = preset("cyclic 8")
    K = subgroup_generated(C8, [2])
    assert K.left_transversal() == (0, 1, 0, 1, 0, 1, 0, 1)


# --- automorphisms -----------------------------------------------------------


def _units(n):
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


@pytest.mark.parametrize("n", range(1, 17))
def test_aut_cyclic_counts_units(n):
    assert len(automorphism_group(preset(f"cyclic {n}"))) == _units(n)


@pytest.mark.parametrize("name", ["cyclic 2", "cyclic 6", "symmetric 3", "dihedral 4", "quaternion8",
                                  "cyclic 2 x cyclic 2", "cyclic 2 x cyclic 4", "cyclic 3 x cyclic 3"])
def test_aut_matches_bruteforce(name):
    G = preset(name)
    fast = {a.image for a in automorphism_group(G)}
    slow = {a.image for a in automorphism_group_bruteforce(G)}
    assert fast == slow


@pytest.mark.parametrize("name,order", [
    ("symmetric 3", 6), ("quaternion8", 24), ("dihedral 4", 8), ("alternating 4", 24), ("symmetric 4", 24),
    ("cyclic 2 x cyclic 2 x cyclic 2", 168), ("cyclic 3 x cyclic 3", 48),
])
def test_aut_orders(name, order):
    assert len(automorphism_group(preset(name))) == order


def test_aut_c2_is_trivial():
    auts = automorphism_group(preset("cyclic 2"))
    assert len(auts) == 1 and auts[0].is_identity()


def test_bruteforce_cap():
    with pytest.raises(SizeError):
        automorphism_group_bruteforce(preset("cyclic 13"))


@pytest.mark.parametrize("name", ["symmetric 3", "dihedral 4", "quaternion8", "alternating 4", "symmetric 4"])
def test_aut_closed_and_contains_inner(name):
    G = preset(name)
    auts = automorphism_group(G)
    images = {a.image for a in auts}
    for f in auts:
        assert invert_auto(f).image in images
        for g in auts:
            assert compose_autos(f, g).image in images
    inner = inner_automorphisms(G)
    assert len(inner) == G.order // center(G).order
    assert {a.image for a, _ in inner} <= images
    assert len(auts) % len(inner) == 0


@pytest.mark.parametrize("name", ["symmetric 3", "dihedral 4", "quaternion8", "alternating 4"])
def test_compose_associative_and_inverse(name):
    G = preset(name)
    auts = automorphism_group(G)
    ident = identity_auto(G)
    for f, g, h in itertools.product(auts, repeat=3):
        assert compose_autos(compose_autos(f, g), h) == compose_autos(f, compose_autos(g, h))
    for f in auts:
        assert compose_autos(f, invert_auto(f)) == ident == compose_autos(invert_auto(f), f)
        assert compose_autos(ident, f) == f


def test_conjugation_composes_in_product_order():
    # gamma_a then gamma_b equals gamma_{ab} under h -> g^-1 h g
    S3 = preset("symmetric 3")
    for a, b in itertools.product(S3.elements, repeat=2):
        assert compose_autos(conjugation(S3, a), conjugation(S3, b)) == conjugation(S3, S3.mul(a, b))


def test_composition_order_pointwise():
    C8 = preset("cyclic 8")
    times3 = Automorphism(C8, tuple(3 * x % 8 for x in range(8)))
    times5 = Automorphism(C8, tuple(5 * x % 8 for x in range(8)))
    fg = compose_autos(times3, times5)
    assert all(fg(x) == times5(times3(x)) for x in C8.elements)


def test_inner_abelian_trivial():
    inner = inner_automorphisms(preset("cyclic 6"))
    assert len(inner) == 1 and inner[0][0].is_identity()


def test_self_conjugation_fixes():
    S3 = preset("symmetric 3")
    assert all(conjugation(S3, g)(g) == g for g in S3.elements)


def test_fixed_subgroups():
    C8 = preset("cyclic 8")
    inv = Automorphism(C8, tuple((-x) % 8 for x in range(8)))
    assert fixed_subgroup(inv).elements == (0, 4)
    assert fixed_subgroup(identity_auto(C8)) == whole(C8)
    S3 = preset("symmetric 3")
    for g in S3.elements:
        assert fixed_subgroup(conjugation(S3, g)) == centralizer(S3, [g])


def test_automorphism_rejects_non_homomorphism():
    C4 = preset("cyclic 4")
    with pytest.raises(GroupConstructionError):
        Automorphism(C4, (0, 2, 1, 3))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_generated_subgroup_is_smallest(name, data):
    G = preset(name)
    gens = data.draw(st.lists(st.integers(0, G.order - 1), max_size=3))
    S = subgroup_generated(G, gens)
    assert set(gens) <= S.members
    containing = [T for T in all_subgroups(G) if set(gens) <= T.members]
    assert S.order == min(T.order for T in containing)


def test_trivial_and_whole():
    G = preset("dihedral 4")
    assert trivial(G).order == 1 and whole(G).order == 8
