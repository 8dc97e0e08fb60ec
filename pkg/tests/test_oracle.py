import itertools
import random

import pytest

from conftest import c2_trivial_id, c8_k2_inv, s3_a3_id
from outerlab.corpus import corpus_instances
from outerlab.engine import out_orders
from outerlab.groups import automorphism_group, centralizer, identity_auto
from outerlab.hnn import Word, apply_map, inner_map, maps_equal, words_equal
from outerlab.maps import AlphaSpec, alpha_map
from outerlab.oracle import alpha_is_inner, cross_check, enumerate_alphas, normaliser_guard, outer_classes


def _bruteforce_pairs(hnn):
    # every (delta, a) with delta(K) = K and the relation preserved, straight from the definition
    H, K = hnn.H, hnn.K
    count = 0
    for d in automorphism_group(H):
        if {d(k) for k in K} != K.members:
            continue
        for a in H.elements:
            if all(d(hnn.phi(k)) == H.mul(a, hnn.phi(d(k)), H.inverse[a]) for k in K):
                count += 1
    return count


@pytest.mark.parametrize("make", [s3_a3_id, c8_k2_inv, c2_trivial_id])
def test_enumeration_count(make):
    hnn = make()
    specs = enumerate_alphas(hnn)
    assert len(specs) == _bruteforce_pairs(hnn)
    r = out_orders(hnn)
    assert len(specs) == r.AK_order * centralizer(hnn.H, hnn.phiK).order


def test_enumeration_count_corpus_slice():
    for inst in list(corpus_instances(8))[::11]:
        hnn = inst.build()
        assert len(enumerate_alphas(hnn)) == _bruteforce_pairs(hnn)


def test_alpha_is_inner_examples(c8, s3):
    ident = identity_auto(c8.H)
    assert alpha_is_inner(c8, AlphaSpec(ident, 0)) == (True, 0)
    # t k = phi(k) t, so conjugating t by h = 2 gives -2 + phi(2) t = 4t
    ok, h = alpha_is_inner(c8, AlphaSpec(ident, 4))
    assert ok and h == 2
    assert words_equal(c8, Word(4, ((1, 0),)), Word(c8.H.inverse[h], ((1, h),)))
    assert alpha_is_inner(c8, AlphaSpec(ident, 2)) == (False, None)


def test_alpha_is_inner_agrees_with_inner_map(s3):
    for spec in enumerate_alphas(s3):
        ok, h = alpha_is_inner(s3, spec)
        if ok:
            assert maps_equal(s3, alpha_map(spec), inner_map(s3, Word.h(h)))


@pytest.mark.parametrize("make,out0,outH", [(c2_trivial_id, 2, 4), (s3_a3_id, 6, 12), (c8_k2_inv, 16, 32)])
def test_class_counts(make, out0, outH):
    o = outer_classes(make())
    assert o.alpha_count == out0 and o.total_count == outH
    assert sum(o.sizes) == len(o.specs)
    assert len(set(o.sizes)) == 1  # cosets of one subgroup


def test_s3_census(s3):
    o = outer_classes(s3)
    assert o.alpha_group().order_census() == [1, 2, 2, 2, 3, 3]
    assert len(o.full_group().order_census()) == 12


def test_c2_full_group_is_klein(c2):
    # G = C2 x Z, and its four H-preserving outer classes all have order <= 2
    assert outer_classes(c2).full_group().order_census() == [1, 2, 2, 2]


@pytest.mark.parametrize("make", [s3_a3_id, c8_k2_inv, c2_trivial_id])
def test_class_is_a_congruence(make):
    hnn = make()
    o = outer_classes(hnn)
    rng = random.Random(5)
    for _ in range(200):
        x, y, z = (rng.choice(o.specs) for _ in range(3))
        if o.cls(x) == o.cls(y):
            assert o.cls(o.compose(x, z)) == o.cls(o.compose(y, z))
            assert o.cls(o.compose(z, x)) == o.cls(o.compose(z, y))
    for x in o.specs:
        assert o.cls(o.compose(x, o.invert(x))) == 0


@pytest.mark.parametrize("make", [s3_a3_id, c8_k2_inv])
def test_inner_set_closed(make):
    o = outer_classes(make())
    inner = set(o.inner)
    for x, y in itertools.product(o.inner, repeat=2):
        assert o.compose(x, y) in inner


def test_class_members_agree_on_words(s3):
    # two alphas in one class differ by conjugation by an element of H
    o = outer_classes(s3)
    for s in o.specs:
        rep = o.reps[o.cls(s)]
        m1, m2 = alpha_map(o.spec(s)), alpha_map(o.spec(rep))
        found = False
        for h in s3.H.elements:
            if maps_equal(s3, m1, concat_maps(s3, m2, h)):
                found = True
                break
        assert found


def concat_maps(hnn, m, h):
    from outerlab.hnn import compose_maps

    return compose_maps(hnn, m, inner_map(hnn, Word.h(h)))


@pytest.mark.parametrize("make", [s3_a3_id, c8_k2_inv, c2_trivial_id])
def test_cross_check_passes(make):
    assert cross_check(make()).passed


def test_cross_check_flags_corruption(c8):
    r = out_orders(c8)
    r.out0_order += 1
    led = cross_check(c8, report=r)
    assert not led.passed
    assert [f.node for f in led.failures()] == ["Out_H^0 order (alpha classes)"]


def test_materialisation_cap(c8):
    from outerlab.config import Config

    o = outer_classes(c8, Config(max_materialized_order=8))
    assert o.alpha_table() is None and o.full_group() is None


def test_beta_coset_multiplication(s3):
    o = outer_classes(s3)
    g = o.full_group()
    c = o.alpha_count
    # alpha classes form an index-2 subgroup
    assert all(g.mul(i, j) < c for i in range(c) for j in range(c))
    assert all(g.mul(i, j) < c for i in range(c, 2 * c) for j in range(c, 2 * c))


def test_normaliser_guard_slice():
    for inst in list(corpus_instances(8))[::5]:
        out = normaliser_guard(inst.build())
        assert out["words"] > 0 and out["normalising"] == 0


def test_apply_alpha_sanity(s3):
    m = alpha_map(AlphaSpec(identity_auto(s3.H), 3))
    assert apply_map(s3, m, Word.t()) == Word(3, ((1, 0),))
