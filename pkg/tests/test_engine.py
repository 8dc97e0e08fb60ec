import pytest

from conftest import c2_trivial_id, c8_k2_inv, s3_a3_id
from outerlab.config import Config
from outerlab.corpus import corpus_instances
from outerlab.errors import PreconditionError, SizeError
from outerlab.groups import all_subgroups, automorphism_group, conjugation, identity_auto, preset, subgroup_generated, whole
from outerlab.hnn import validate_hnn
from outerlab.engine import (
    alpha_identity_batch,
    alpha_identity_check,
    chi2bar_kernel_check,
    compute_A_K,
    lemma_embedding_check,
    lemma_semidirect_aut_check,
    out_orders,
    structural_data,
    tau_check,
    theoremA_verdict,
    theoremC_split_check,
)
from outerlab.oracle import enumerate_alphas


def s4_with(gens):
    S4 = preset("symmetric 4")
    return validate_hnn(S4, subgroup_generated(S4, gens), identity_auto(S4))


def s4_s3():
    S4 = preset("symmetric 4")
    # every order-6 subgroup of S4 is a point stabiliser, a copy of S3
    K = next(K for K in all_subgroups(S4) if K.order == 6)
    return validate_hnn(S4, K, identity_auto(S4))


# hand computed: Z, CK, NK, L, J, ZK, AK, AK_mod_inn, outV, out0, outH
EXPECTED = {
    "s3": (s3_a3_id, dict(Z=1, CK=3, NK=6, L=1, J=1, ZK=3, AK=6, AK_mod_inn=1, outV=6, out0=6, outH=12)),
    "c8": (c8_k2_inv, dict(Z=8, CK=8, NK=8, L=2, J=2, ZK=8, AK=4, AK_mod_inn=4, outV=4, out0=16, outH=32)),
    "c2": (c2_trivial_id, dict(Z=2, CK=2, NK=2, L=1, J=2, ZK=2, AK=1, AK_mod_inn=1, outV=2, out0=2, outH=4)),
}


@pytest.mark.parametrize("name", EXPECTED)
def test_orders_by_hand(name):
    make, want = EXPECTED[name]
    assert out_orders(make()).orders() == want


def test_c8_L_independent(c8):
    # L = {phi^-1(k) k^-1 : k in K, central}; in C8 with inversion, -k - k = -2k
    L = structural_data(c8).L
    assert set(L.elements) == {(-2 * k) % 8 for k in (0, 2, 4, 6)}


def test_structural_by_definition():
    for inst in list(corpus_instances(8))[:80]:
        hnn = inst.build()
        H, K = hnn.H, hnn.K
        b = structural_data(hnn)
        assert b.CK.members == {c for c in H.elements if all(H.mul(c, k) == H.mul(k, c) for k in K)}
        assert b.FixPhi.members == {h for h in H.elements if hnn.phi(h) == h}
        assert b.J.members == b.Z.members & b.FixPhi.members
        assert b.ZK.members == {H.mul(z, k) for z in b.Z for k in K}


def test_A_K_by_definition(s3):
    AK = compute_A_K(s3)
    assert len(AK) == 6
    for d, a in AK:
        assert d.apply_set(s3.K) == s3.K.members
        assert all(d(s3.phi(k)) == s3.H.mul(a, s3.phi(d(k)), s3.H.inverse[a]) for k in s3.K)


def test_A_K_c8_all_units(c8):
    assert sorted(d(1) for d, _ in compute_A_K(c8)) == [1, 3, 5, 7]


def test_size_cap(s3):
    with pytest.raises(SizeError):
        out_orders(s3, Config(max_analysis_order=4))


def test_arithmetic_self_check(c8):
    r = out_orders(c8)
    assert r.check_arithmetic()
    r.outV_order += 1
    assert not r.check_arithmetic()


def test_theorem_a_verdict(s3, c8):
    v = theoremA_verdict(s3)
    assert v.equality and v.fa and v.condition1 and v.condition3
    assert v.condition2 and v.condition2_witness == 0
    assert len(v.justification) == 4


def test_theorem_a_condition2_witness_nontrivial():
    S3 = preset("symmetric 3")
    hnn = validate_hnn(S3, subgroup_generated(S3, [2]), conjugation(S3, 3))
    v = theoremA_verdict(hnn)
    w = v.condition2_witness
    assert {S3.conj(k, w) for k in hnn.K} == hnn.phiK.members


def test_split_s3(s3):
    v = theoremC_split_check(s3)
    assert v.applicable and v.passed
    assert v.details["C_K"] == 3 and v.details["N_K"] == 2 and v.details["meet"] == 1


@pytest.mark.parametrize("name", ["cyclic 4", "cyclic 2 x cyclic 2", "cyclic 6"])
def test_split_abelian_identity(name):
    G = preset(name)
    for K in all_subgroups(G):
        if K.order < G.order:
            assert theoremC_split_check(validate_hnn(G, K, identity_auto(G))).applicable


def test_split_not_applicable_c8(c8):
    v = theoremC_split_check(c8)
    assert not v.applicable and v.details["J"] == 2


@pytest.mark.parametrize("make", [s3_a3_id, c8_k2_inv, c2_trivial_id])
def test_chi2bar_kernel(make):
    hnn = make()
    v = chi2bar_kernel_check(hnn)
    b = structural_data(hnn)
    assert v.details["kernel"] == len({hnn.H.mul(j, k) for j in b.J for k in hnn.K})


@pytest.mark.parametrize("make", [s3_a3_id, c8_k2_inv, c2_trivial_id])
def test_tau(make):
    hnn = make()
    v = tau_check(hnn)
    assert v.details["kernel"] == hnn.K.order


def test_tau_inner_beyond_K_when_centraliser_nontrivial(c2):
    # with K = 1 and H abelian, varphi_d is conjugation by d, so every d is inner
    assert tau_check(c2).details["inner"] == 2


def test_embedding_s3(s3):
    v = lemma_embedding_check(s3, whole(s3.H))
    assert v.details == {"image": 2, "index": 3, "bound": 3}
    v = lemma_embedding_check(s3, s3.K)
    assert v.details["image"] == 1


def test_embedding_not_applicable(c2):
    assert not lemma_embedding_check(c2, whole(c2.H)).applicable


def test_embedding_precondition(s3):
    with pytest.raises(PreconditionError):
        lemma_embedding_check(s3, subgroup_generated(s3.H, [1]))


def test_semidirect_lemma_cases(s3, c8):
    assert not lemma_semidirect_aut_check(s3).applicable  # C_H(A3) = A3
    v = lemma_semidirect_aut_check(c8)
    assert not v.applicable and v.details["reason"] == "A_K not inside Inn(H)"


@pytest.mark.parametrize("make,quotient", [(s4_s3, 1), (lambda: s4_with([3, 8]), 2)])
def test_semidirect_lemma_s4(make, quotient):
    v = lemma_semidirect_aut_check(make())
    assert v.applicable and v.details["NK/K"] == quotient == v.details["out0_oracle"]


def test_alpha_identities(c8):
    specs = enumerate_alphas(c8)
    assert alpha_identity_check(c8, specs) == len(specs) ** 2


def test_invariants_on_corpus_slice():
    for inst in list(corpus_instances(8))[::7]:
        hnn = inst.build()
        r = out_orders(hnn)
        o = r.orders()
        assert r.check_arithmetic()
        assert o["L"] <= o["CK"] and o["Z"] <= o["ZK"] <= o["NK"]
        assert len(automorphism_group(hnn.H)) % o["AK"] == 0
        assert r.index2 == (r.beta is not None)


@pytest.mark.parametrize("make", [s3_a3_id, c8_k2_inv, c2_trivial_id])
def test_alpha_identity_batch_agrees(make):
    hnn = make()
    specs = enumerate_alphas(hnn)
    out = alpha_identity_batch(hnn, specs, block=7)
    assert out["pairs"] == alpha_identity_check(hnn, specs) and out["failures"] == 0


def test_alpha_identity_batch_flags_bad_inverse(monkeypatch, c8):
    import outerlab.engine as engine

    monkeypatch.setattr(engine, "invert_alpha", lambda s: s)
    out = alpha_identity_batch(c8, enumerate_alphas(c8))
    # a spec is rarely its own inverse, so most rows must fail
    assert out["inverse"] > 0 and out["composition"] == 0


def test_alpha_identity_batch_flags_missing_spec(c8):
    specs = enumerate_alphas(c8)
    out = alpha_identity_batch(c8, specs[:-1])
    assert out["closure"] > 0
