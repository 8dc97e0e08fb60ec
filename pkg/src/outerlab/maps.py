"""Automorphisms of G that preserve H: the alpha, beta and tau families.

Notation is translated once, here, into explicit pointwise form. Maps compose
left to right (``fg`` = apply ``f`` then ``g``) and ``gamma_a(x) = a^-1 x a``.

====================================  =========================================
compact form                          expanded, as checked in code
====================================  =========================================
delta phi (k) = phi delta gamma_a (k)  delta(phi(k)) == a * phi(delta(k)) * a^-1
zeta phi^-1 (k) = phi zeta gamma_b (k) phi^-1(zeta(k)) == b^-1 * zeta(phi(k)) * b
zeta^2 gamma_b (K) = K                 b^-1 * zeta(zeta(K)) * b == K
alpha_(d1,a1) alpha_(d2,a2)            alpha_(d1 d2, d2(a1) a2)
alpha_(d,a)^-1                         alpha_(d^-1, d^-1(a^-1))
alpha_(d,a) beta_(z,b)                 beta_(d z, z(a) b)
====================================  =========================================

``alpha_(delta, a)`` sends ``h -> delta(h)``, ``t -> a t``;
``beta_(zeta, b)`` sends ``h -> zeta(h)``, ``t -> b t^-1``;
``tau(d) = varphi_d`` sends ``h -> h``, ``t -> phi(d) t d^-1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import ConsistencyError, PreconditionError
from .groups import Automorphism, automorphism_group, compose_autos, conjugation, identity_auto, invert_auto
from .hnn import (
    HnnData,
    Word,
    WordMap,
    compose_maps,
    maps_equal,
    preserves_relations,
    words_equal,
)


@dataclass(frozen=True)
class AlphaSpec:
    delta: Automorphism
    a: int

    def key(self, aut_index: dict) -> tuple[int, int]:
        return aut_index[self.delta.image], self.a


@dataclass(frozen=True)
class BetaSpec:
    zeta: Automorphism
    b: int


def alpha_condition(hnn: HnnData, delta: Automorphism, a: int) -> bool:
    """``delta(K) = K`` and ``delta(phi(k)) = a phi(delta(k)) a^-1`` on K."""
    if delta.apply_set(hnn.K) != hnn.K.members:
        return False
    return _alpha_pointwise(hnn, delta, a)


def _alpha_pointwise(hnn: HnnData, delta: Automorphism, a: int) -> bool:
    tbl = hnn.H.table
    ainv = hnn.H.inverse[a]
    d, p = delta.image, hnn.phi.image
    return all(d[p[k]] == tbl[tbl[a][p[d[k]]]][ainv] for k in hnn.K)


def beta_condition(hnn: HnnData, zeta: Automorphism, b: int) -> bool:
    H = hnn.H
    z = zeta.image
    if zeta.apply_set(hnn.K) != hnn.phiK.members:
        return False
    if frozenset(H.conj(z[z[k]], b) for k in hnn.K) != hnn.K.members:
        return False
    tbl = H.table
    binv = H.inverse[b]
    p, pinv = hnn.phi.image, hnn.phi_inv.image
    return all(pinv[z[k]] == tbl[tbl[binv][z[p[k]]]][b] for k in hnn.K)


def compose_alpha(s1: AlphaSpec, s2: AlphaSpec) -> AlphaSpec:
    """Spec of ``alpha_s1`` followed by ``alpha_s2``."""
    H = s1.delta.group
    return AlphaSpec(compose_autos(s1.delta, s2.delta), H.table[s2.delta(s1.a)][s2.a])


def invert_alpha(s: AlphaSpec) -> AlphaSpec:
    dinv = invert_auto(s.delta)
    return AlphaSpec(dinv, dinv(s.delta.group.inverse[s.a]))


def alpha_then_beta(s: AlphaSpec, b: BetaSpec) -> BetaSpec:
    H = s.delta.group
    return BetaSpec(compose_autos(s.delta, b.zeta), H.table[b.zeta(s.a)][b.b])


def alpha_map(spec: AlphaSpec) -> WordMap:
    return WordMap(spec.delta.image, Word(spec.a, ((1, 0),)))


def beta_map(spec: BetaSpec) -> WordMap:
    return WordMap(spec.zeta.image, Word(spec.b, ((-1, 0),)))


def build_alpha(hnn: HnnData, spec: AlphaSpec, verify: bool = True) -> WordMap:
    """Word map of ``alpha_(delta, a)``; optionally verified at word level.

    Verification checks the defining relations and that
    ``alpha_(delta^-1, delta^-1(a^-1))`` is a two-sided inverse on generators.
    """
    if not alpha_condition(hnn, spec.delta, spec.a):
        raise PreconditionError("(delta, a) violates delta(K) = K or the pointwise condition")
    m = alpha_map(spec)
    if verify:
        if not preserves_relations(hnn, m):
            raise ConsistencyError(f"alpha {spec} does not preserve the relations")
        inv = alpha_map(invert_alpha(spec))
        ident = WordMap.identity(hnn)
        if not (maps_equal(hnn, compose_maps(hnn, m, inv), ident) and maps_equal(hnn, compose_maps(hnn, inv, m), ident)):
            raise ConsistencyError(f"alpha {spec} and its stated inverse do not compose to the identity")
    return m


def build_beta(hnn: HnnData, spec: BetaSpec, verify: bool = True) -> WordMap:
    """Word map of ``beta_(zeta, b)``; inverse is ``h -> zeta^-1(h)``, ``t -> t^-1 zeta^-1(b)``."""
    if not beta_condition(hnn, spec.zeta, spec.b):
        raise PreconditionError("(zeta, b) violates the beta conditions")
    m = beta_map(spec)
    if verify:
        if not preserves_relations(hnn, m):
            raise ConsistencyError(f"beta {spec} does not preserve the relations")
        zinv = invert_auto(spec.zeta)
        inv = WordMap(zinv.image, Word(0, ((-1, zinv(spec.b)),)))
        ident = WordMap.identity(hnn)
        if not (maps_equal(hnn, compose_maps(hnn, m, inv), ident) and maps_equal(hnn, compose_maps(hnn, inv, m), ident)):
            raise ConsistencyError(f"beta {spec} has no two-sided inverse of the expected form")
    return m


def beta_witnesses(hnn: HnnData, auts: list[Automorphism] | None = None) -> Iterator[BetaSpec]:
    """Every ``(zeta, b)`` satisfying the beta conditions, in canonical order."""
    auts = auts if auts is not None else automorphism_group(hnn.H)
    for zeta in auts:
        if zeta.apply_set(hnn.K) != hnn.phiK.members:
            continue
        for b in hnn.H.elements:
            if beta_condition(hnn, zeta, b):
                yield BetaSpec(zeta, b)


def beta_search(hnn: HnnData, auts: list[Automorphism] | None = None, verify: bool = True) -> BetaSpec | None:
    """First beta witness in (automorphism order, element index) order, or None."""
    for spec in beta_witnesses(hnn, auts):
        if verify:
            build_beta(hnn, spec)
        return spec
    return None


def inner_witness(hnn: HnnData, m: WordMap) -> int | None:
    """Least ``h`` in H with ``m`` equal to conjugation by ``h`` on generators.

    Only conjugators in H are searched: a conjugation preserving H comes from
    the normaliser of H in G, which is H itself when K is proper and finite.
    """
    H = hnn.H
    for h in H.elements:
        if any(m.hmap[x] != H.conj(x, h) for x in H.elements):
            continue
        hinv = H.inverse[h]
        if words_equal(hnn, m.timage, Word(hinv, ((1, h),))):
            return h
    return None


def tau_map(hnn: HnnData, d: int) -> WordMap:
    """``varphi_d``: ``h -> h``, ``t -> phi(d) t d^-1`` for ``d`` normalising K."""
    H = hnn.H
    if any(H.conj(k, d) not in hnn.K.members for k in hnn.K):
        raise PreconditionError(f"element {d} does not normalise K")
    return WordMap(tuple(range(H.order)), Word(hnn.phi(d), ((1, H.inverse[d]),)))


def normaliser_alpha(hnn: HnnData, b: int) -> AlphaSpec:
    """``alpha_(gamma_b, b^-1 phi(b))`` for ``b`` normalising K."""
    H = hnn.H
    return AlphaSpec(conjugation(H, b), H.table[H.inverse[b]][hnn.phi(b)])


def identity_alpha(hnn: HnnData) -> AlphaSpec:
    return AlphaSpec(identity_auto(hnn.H), 0)
