"""Brute-force construction of the outer classes of H-preserving automorphisms.

Every valid ``(delta, a)`` is enumerated, the inner ones are found by direct
search, and the valid specs are partitioned into cosets of the inner ones.
Nothing here uses the structural formulas of :mod:`outerlab.engine`; the two
are compared by :func:`cross_check`.

Internally a spec is the pair ``(automorphism index, a)``; a "twisted" spec
``(delta index, a, eps)`` stands for ``h -> delta(h)``, ``t -> a t^eps``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .config import Config, load_config
from .errors import ConsistencyError, SizeError
from .groups import Automorphism, FiniteGroup, automorphism_group, conjugation
from .hnn import HnnData, Word, words_equal
from .maps import AlphaSpec, BetaSpec, alpha_condition, beta_search, build_alpha, build_beta


class AutTable:
    """Indexed ``Aut(H)`` with cached composition (left to right)."""

    def __init__(self, auts: list[Automorphism]):
        self.auts = auts
        self.index = {f.image: i for i, f in enumerate(auts)}
        self._comp: dict[tuple[int, int], int] = {}
        self._inv: dict[int, int] = {}

    def __len__(self):
        return len(self.auts)

    def comp(self, i: int, j: int) -> int:
        key = (i, j)
        r = self._comp.get(key)
        if r is None:
            gi = self.auts[j].image
            r = self.index[tuple(gi[x] for x in self.auts[i].image)]
            self._comp[key] = r
        return r

    def inv(self, i: int) -> int:
        r = self._inv.get(i)
        if r is None:
            img = self.auts[i].image
            out = [0] * len(img)
            for x, y in enumerate(img):
                out[y] = x
            r = self.index[tuple(out)]
            self._inv[i] = r
        return r

    def of(self, f: Automorphism) -> int:
        return self.index[f.image]


@dataclass
class OuterClass:
    representative: AlphaSpec | BetaSpec
    members_count: int
    is_trivial: bool


def enumerate_alphas(hnn: HnnData, auts: list[Automorphism] | None = None, verify: bool = False) -> list[AlphaSpec]:
    """Every valid ``(delta, a)`` in canonical order; ``verify`` runs the word-level checks."""
    auts = auts if auts is not None else automorphism_group(hnn.H)
    out = []
    for delta in auts:
        if delta.apply_set(hnn.K) != hnn.K.members:
            continue
        for a in hnn.H.elements:
            if alpha_condition(hnn, delta, a):
                spec = AlphaSpec(delta, a)
                if verify:
                    build_alpha(hnn, spec, verify=True)
                out.append(spec)
    return out


def alpha_is_inner(hnn: HnnData, spec: AlphaSpec) -> tuple[bool, int | None]:
    """Search ``h`` in H with ``delta = gamma_h`` on H and ``a t = h^-1 t h`` in G."""
    H = hnn.H
    d = spec.delta.image
    at = Word(spec.a, ((1, 0),))
    for h in H.elements:
        if all(d[x] == H.conj(x, h) for x in H.elements) and words_equal(hnn, at, Word(H.inverse[h], ((1, h),))):
            return True, h
    return False, None


@dataclass
class OuterOracle:
    """Outer classes of ``Out_H^0(G)`` (and of ``Out_H(G)`` when a beta exists)."""

    hnn: HnnData
    autt: AutTable
    specs: list[tuple[int, int]]
    inner: list[tuple[int, int]]
    class_of: dict[tuple[int, int], int]
    reps: list[tuple[int, int]]
    sizes: list[int]
    beta0: BetaSpec | None
    config: Config = field(default_factory=load_config)

    # -- spec algebra on indices --

    def compose(self, s1, s2):
        (d1, a1), (d2, a2) = s1, s2
        img2 = self.autt.auts[d2].image
        return self.autt.comp(d1, d2), self.hnn.H.table[img2[a1]][a2]

    def invert(self, s):
        d, a = s
        di = self.autt.inv(d)
        return di, self.autt.auts[di].image[self.hnn.H.inverse[a]]

    def compose_twisted(self, s1, s2):
        """Compose twisted specs, normalising modulo conjugation by an H-element."""
        (d1, a1, e1), (d2, a2, e2) = s1, s2
        H = self.hnn.H
        img2 = self.autt.auts[d2].image
        if e1 == 1:
            return self.autt.comp(d1, d2), H.table[img2[a1]][a2], e2
        # t -> d2(a1) t^-e2 a2^-1, then conjugate by a2.
        g = self.autt.index[conjugation(H, a2).image]
        return self.autt.comp(self.autt.comp(d1, d2), g), H.table[H.inverse[a2]][img2[a1]], -e2

    def spec(self, key) -> AlphaSpec:
        return AlphaSpec(self.autt.auts[key[0]], key[1])

    def key(self, spec: AlphaSpec) -> tuple[int, int]:
        return self.autt.of(spec.delta), spec.a

    def cls(self, s) -> int:
        """Class index of an alpha spec (index pair or AlphaSpec)."""
        if isinstance(s, AlphaSpec):
            s = self.key(s)
        try:
            return self.class_of[s]
        except KeyError:
            raise ConsistencyError(f"spec {s} is not a valid alpha; closure of the alpha family fails") from None

    @property
    def alpha_count(self) -> int:
        return len(self.reps)

    @property
    def total_count(self) -> int:
        return self.alpha_count * (2 if self.beta0 is not None else 1)

    @cached_property
    def inner_delta(self) -> dict[int, list[int]]:
        """Automorphism index -> every ``b`` in H with ``gamma_b`` equal to it."""
        out: dict[int, list[int]] = {}
        for b in self.hnn.H.elements:
            out.setdefault(self.autt.index[conjugation(self.hnn.H, b).image], []).append(b)
        return out

    def mul(self, i: int, j: int) -> int:
        return self.cls(self.compose(self.reps[i], self.reps[j]))

    # -- beta coset --

    @cached_property
    def _beta_twisted(self):
        b = self.beta0
        return self.autt.of(b.zeta), b.b, -1

    @cached_property
    def _beta_square_inverse(self):
        d, a, e = self.compose_twisted(self._beta_twisted, self._beta_twisted)
        assert e == 1
        return self.invert((d, a))

    def locate(self, tw) -> int:
        """Index in the full table of a twisted spec (beta classes follow alpha classes)."""
        d, a, e = tw
        if e == 1:
            return self.cls((d, a))
        x = self.compose_twisted(tw, self._beta_twisted)
        x = self.compose(x[:2], self._beta_square_inverse)
        return self.alpha_count + self.cls(x)

    def full_rep(self, i: int):
        c = self.alpha_count
        d, a = self.reps[i % c]
        if i < c:
            return d, a, 1
        return self.compose_twisted((d, a, 1), self._beta_twisted)

    # -- outputs --

    def classes(self) -> list[OuterClass]:
        out = [
            OuterClass(self.spec(r), self.sizes[i], i == 0)
            for i, r in enumerate(self.reps)
        ]
        if self.beta0 is not None:
            for i in range(self.alpha_count):
                d, a, _ = self.full_rep(self.alpha_count + i)
                out.append(OuterClass(BetaSpec(self.autt.auts[d], a), self.sizes[i], False))
        return out

    def alpha_table(self) -> list[list[int]] | None:
        c = self.alpha_count
        if c > self.config.max_materialized_order:
            return None
        return [[self.mul(i, j) for j in range(c)] for i in range(c)]

    def alpha_group(self) -> FiniteGroup | None:
        t = self.alpha_table()
        return None if t is None else FiniteGroup.from_table(t, provenance="cayley", name="Out_H^0(G)")

    def full_table(self) -> list[list[int]] | None:
        if self.beta0 is None:
            return self.alpha_table()
        n = self.total_count
        if n > self.config.max_materialized_order:
            return None
        reps = [self.full_rep(i) for i in range(n)]
        return [[self.locate(self.compose_twisted(p, q)) for q in reps] for p in reps]

    def full_group(self) -> FiniteGroup | None:
        t = self.full_table()
        return None if t is None else FiniteGroup.from_table(t, provenance="cayley", name="Out_H(G)")


def outer_classes(hnn: HnnData, config: Config | None = None, verify: bool = False) -> OuterOracle:
    """Partition the valid alpha specs into outer classes.

    ``verify`` additionally runs word-level verification on every enumerated
    alpha and on the beta witness.
    """
    cfg = config or load_config()
    if hnn.H.order > cfg.max_analysis_order:
        raise SizeError(f"|H| = {hnn.H.order} exceeds analysis cap {cfg.max_analysis_order}")
    auts = automorphism_group(hnn.H, cfg)
    autt = AutTable(auts)
    specs = [(autt.of(s.delta), s.a) for s in enumerate_alphas(hnn, auts, verify=verify)]
    inner_auts = {conjugation(hnn.H, b).image for b in hnn.H.elements}
    inner = []
    for d, a in specs:
        if auts[d].image in inner_auts:
            ok, _ = alpha_is_inner(hnn, AlphaSpec(auts[d], a))
            if ok:
                inner.append((d, a))
    oracle = OuterOracle(hnn, autt, specs, inner, {}, [], [], None, cfg)
    class_of = oracle.class_of
    for s in specs:
        if s in class_of:
            continue
        idx = len(oracle.reps)
        oracle.reps.append(s)
        members = {oracle.compose(s, i) for i in inner}
        oracle.sizes.append(len(members))
        for m in members:
            if m in class_of:
                raise ConsistencyError("inner coset overlaps an earlier class")
            class_of[m] = idx
    if len(class_of) != len(specs):
        raise ConsistencyError("inner cosets do not cover the valid alpha specs")
    oracle.beta0 = beta_search(hnn, auts, verify=verify)
    return oracle


@dataclass
class CheckResult:
    node: str
    passed: bool
    expected: object = None
    observed: object = None
    detail: str = ""


@dataclass
class CrossCheckLedger:
    results: list[CheckResult] = field(default_factory=list)

    def add(self, node, passed, expected=None, observed=None, detail=""):
        self.results.append(CheckResult(node, bool(passed), expected, observed, detail))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            line = f"{'PASS' if r.passed else 'FAIL'}  {r.node}"
            if r.expected is not None or r.observed is not None:
                line += f": expected {r.expected}, observed {r.observed}"
            if r.detail:
                line += f"  ({r.detail})"
            out.append(line)
        return out


def chi_class_data(oracle: OuterOracle):
    """Per-class images under chi_1 (delta modulo Inn(H)) and chi_2 (b Z(H)K).

    Every member of every class is examined, so a map that is not well defined
    shows up as a class with more than one image.
    """
    from .groups import center, normalizer, product_subgroup

    hnn = oracle.hnn
    H = hnn.H
    autt = oracle.autt
    inner_idx = set(oracle.inner_delta)
    inn_list = sorted(inner_idx)
    ZK = product_subgroup(H, center(H), hnn.K)
    NK = normalizer(H, hnn.K)
    zk_rep = ZK.left_transversal()
    chi1: dict[int, set] = {}
    chi2: dict[int, set] = {}
    coset_cache: dict[int, frozenset] = {}
    for s, c in oracle.class_of.items():
        d = s[0]
        coset = coset_cache.get(d)
        if coset is None:
            coset = frozenset(autt.comp(d, g) for g in inn_list)
            coset_cache[d] = coset
        chi1.setdefault(c, set()).add(min(coset))
        if d in inner_idx:
            for b in oracle.inner_delta[d]:
                if b not in NK:
                    raise ConsistencyError("inner delta stabilising K from a non-normaliser")
                chi2.setdefault(c, set()).add(zk_rep[b])
    return chi1, chi2, ZK, NK


def cross_check(hnn: HnnData, report=None, oracle: OuterOracle | None = None) -> CrossCheckLedger:
    """Compare oracle class arithmetic with the engine report node by node."""
    from .engine import out_orders

    oracle = oracle or outer_classes(hnn)
    report = report or out_orders(hnn)
    led = CrossCheckLedger()
    led.add("Out_H^0 order (alpha classes)", oracle.alpha_count == report.out0_order, report.out0_order, oracle.alpha_count)

    chi1, chi2, ZK, NK = chi_class_data(oracle)
    bad1 = [c for c, v in chi1.items() if len(v) != 1]
    image1 = {next(iter(v)) for v in chi1.values()}
    led.add("chi_1 well defined", not bad1, 0, len(bad1), "classes with several images")
    led.add("chi_1 image = A_K Inn(H)/Inn(H)", len(image1) == report.AK_mod_inn_order, report.AK_mod_inn_order, len(image1))
    vclasses = sorted(chi2)
    led.add("chi_1 kernel = Out_H^(V)", len(vclasses) == report.outV_order, report.outV_order, len(vclasses))

    bad2 = [c for c, v in chi2.items() if len(v) != 1]
    led.add("chi_2 well defined", not bad2, 0, len(bad2), "classes with several cosets")
    image2 = {next(iter(v)) for v in chi2.values()}
    target = NK.order // ZK.order if ZK <= NK else None
    led.add("chi_2 onto N_H(K)/Z(H)K", len(image2) == target, target, len(image2))

    H = hnn.H
    idx_id = oracle.autt.index[tuple(range(H.order))]
    ck = {oracle.cls((idx_id, a)) for a in H.elements if (idx_id, a) in oracle.class_of}
    trivial_coset = ZK.left_transversal()[0]
    kernel2 = {c for c, v in chi2.items() if v == {trivial_coset}}
    bundle = report.bundle
    ck_expected = bundle.CK.order // bundle.L.order
    led.add(
        "chi_2 kernel C_K = C_H(K)/L",
        ck == kernel2 and len(ck) == ck_expected,
        ck_expected,
        len(ck),
        f"|L| = {bundle.L.order}",
    )
    led.add("Out_H order (total classes)", oracle.total_count == report.outH_order, report.outH_order, oracle.total_count)
    return led


def normaliser_guard(hnn: HnnData, max_t: int = 2) -> dict:
    """Count words of t-length 1..``max_t`` whose conjugation maps H into H.

    The inner test only searches conjugators in H, which is sound when the
    normaliser of H in G is H itself. A word in normal form with a stable
    letter lies outside H, so any hit here would be a counterexample.
    """
    import numpy as np

    from .groups import generating_set
    from .wordbatch import Batch, all_words_batch, concat_batch, inverse_batch, normal_form_batch, reduce_batch

    gens = generating_set(hnn.H)
    checked = 0
    hits = 0
    for L in range(1, max_t + 1):
        g = normal_form_batch(hnn, all_words_batch(hnn, L))
        # distinct normal forms that still contain a stable letter
        _, first = np.unique(g.canonical_rows(), axis=0, return_index=True)
        first = first[g.lens[first] > 0]
        g = Batch(g.hs[first], g.es[first], g.lens[first])
        ginv = inverse_batch(hnn, g)
        inside = np.ones(len(g), dtype=bool)
        for x in gens:
            hx = Batch(np.full((len(g), 1), x, dtype=np.int64), np.zeros((len(g), 0), dtype=np.int64), np.zeros(len(g), dtype=np.int64))
            r = reduce_batch(hnn, concat_batch(hnn, concat_batch(hnn, ginv, hx), g))
            inside &= r.lens == 0
        checked += len(g)
        hits += int(inside.sum())
    return {"words": checked, "normalising": hits}
