"""Word-engine self-checks: insertion invariance, idempotence, normal-form completeness.

All checks run on :mod:`outerlab.wordbatch` kernels. The completeness check is
exhaustive: every word of t-length at most ``max_t`` is shown equal to its
normal form, and every pair of distinct normal forms is shown unequal by
reducing their quotient. Pairs are only compared inside classes of a family of
verified homomorphisms ``G -> H x| Z`` and ``G -> H^m x| C_m`` (equal elements
have equal images), which keeps the pair count tractable without skipping any
pair that could be equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .groups import automorphism_group
from .hnn import HnnData
from .wordbatch import (
    Batch,
    all_words_batch,
    concat_batch,
    equal_batch,
    inverse_batch,
    is_t_reduced_batch,
    normal_form_batch,
    quotient_images,
    random_batch,
    reduce_batch,
    semidirect_quotients,
    wreath_images,
    wreath_quotients,
    stack,
    take,
)


@dataclass
class WordCheckResult:
    name: str
    trials: int
    failures: int
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0


def _split(b: Batch, p: int, u: np.ndarray, T) -> tuple[Batch, Batch]:
    """Cut every row at H-letter ``p`` into ``(... u)`` and ``(u^-1 h_p ...)``."""
    N = len(b)
    left_hs = np.concatenate([b.hs[:, :p], u[:, None]], axis=1)
    v = T.mul[T.inv[u], b.hs[:, p]]
    right_hs = np.concatenate([v[:, None], b.hs[:, p + 1:]], axis=1)
    left = Batch(left_hs, b.es[:, :p].copy(), np.full(N, p, dtype=np.int64))
    right = Batch(right_hs, b.es[:, p:].copy(), b.lens - p)
    return left, right


def _relators(hnn: HnnData, rng, n: int) -> Batch:
    """``t k t^-1 phi(k)^-1`` or ``t^-1 k' t phi^-1(k')^-1``, chosen at random."""
    from .wordbatch import _tables

    T = _tables(hnn)
    K = np.asarray(hnn.K.elements)
    PK = np.asarray(hnn.phiK.elements)
    forward = rng.random(n) < 0.5
    k = K[rng.integers(0, len(K), n)]
    kp = PK[rng.integers(0, len(PK), n)]
    mid = np.where(forward, k, kp)
    last = np.where(forward, T.inv[T.phi[k]], T.inv[T.phinv[kp]])
    es = np.stack([np.where(forward, 1, -1), np.where(forward, -1, 1)], axis=1)
    hs = np.stack([np.zeros(n, dtype=np.int64), mid, last], axis=1)
    return Batch(hs.astype(np.int64), es.astype(np.int64), np.full(n, 2, dtype=np.int64))


def _cancellers(hnn: HnnData, rng, n: int, max_t: int = 2) -> Batch:
    """``g g^-1`` for random words ``g`` (not freely reduced)."""
    parts = []
    sizes = np.bincount(rng.integers(0, max_t + 1, n), minlength=max_t + 1)
    for L, cnt in enumerate(sizes):
        if cnt:
            g = random_batch(hnn, rng, int(cnt), L)
            parts.append(concat_batch(hnn, g, inverse_batch(hnn, g)))
    return stack(parts)


def insertion_check(hnn: HnnData, trials: int = 10_000, seed: int = 0, max_t: int = 4) -> WordCheckResult:
    """Normal forms are unchanged by inserting a relator or ``g g^-1`` at any position."""
    from .wordbatch import _tables

    T = _tables(hnn)
    rng = np.random.default_rng(seed)
    failures = 0
    done = 0
    # spread trials over (base length, insertion point) cells
    cells = [(L, p) for L in range(max_t + 1) for p in range(L + 1)]
    per = np.full(len(cells), trials // len(cells))
    per[: trials % len(cells)] += 1
    for (L, p), cnt in zip(cells, per):
        cnt = int(cnt)
        if not cnt:
            continue
        base = random_batch(hnn, rng, cnt, L)
        half = cnt // 2
        ins = stack([_relators(hnn, rng, half), _cancellers(hnn, rng, cnt - half)]) if half and cnt - half else (
            _relators(hnn, rng, cnt) if half else _cancellers(hnn, rng, cnt)
        )
        u = rng.integers(0, hnn.H.order, cnt).astype(np.int64)
        left, right = _split(base, p, u, T)
        grown = concat_batch(hnn, concat_batch(hnn, left, ins), right)
        a = normal_form_batch(hnn, base).canonical_rows()
        b = normal_form_batch(hnn, grown).canonical_rows()
        w = max(a.shape[1], b.shape[1])
        failures += int(np.any(_pad(a, w) != _pad(b, w), axis=1).sum())
        done += cnt
    return WordCheckResult("insertion invariance", done, failures)


def _pad(a: np.ndarray, width: int) -> np.ndarray:
    """Widen canonical rows (lens | hs | es) to a common width."""
    if a.shape[1] == width:
        return a
    M = (a.shape[1] - 2) // 2
    M2 = (width - 2) // 2
    lens = a[:, :1]
    hs = np.full((len(a), M2 + 1), -1, dtype=np.int64)
    hs[:, : M + 1] = a[:, 1: M + 2]
    es = np.zeros((len(a), M2), dtype=np.int64)
    es[:, :M] = a[:, M + 2:]
    return np.concatenate([lens, hs, es], axis=1)


def idempotence_check(hnn: HnnData, trials: int = 10_000, seed: int = 1, max_t: int = 6) -> WordCheckResult:
    """Reduction and normal form are fixed points on their own output."""
    rng = np.random.default_rng(seed)
    failures = 0
    per = trials // (max_t + 1)
    sizes = [per + (1 if L < trials % (max_t + 1) else 0) for L in range(max_t + 1)]
    for L, cnt in enumerate(sizes):
        b = random_batch(hnn, rng, cnt, L)
        r = reduce_batch(hnn, b)
        rr = reduce_batch(hnn, r)
        n = normal_form_batch(hnn, b)
        nn = normal_form_batch(hnn, n)
        bad = np.any(r.canonical_rows() != rr.canonical_rows(), axis=1)
        bad |= np.any(n.canonical_rows() != nn.canonical_rows(), axis=1)
        bad |= ~is_t_reduced_batch(hnn, r)
        bad |= r.lens > b.lens
        failures += int(bad.sum())
    return WordCheckResult("reduction idempotence", trials, failures)


def completeness_check(hnn: HnnData, max_t: int = 3, chunk: int = 1_000_000) -> WordCheckResult:
    """``words_equal(w1, w2)`` iff the normal forms coincide, over all words of t-length <= ``max_t``.

    If direction: every word equals its normal form. Only-if direction: every
    pair of distinct normal forms is unequal.
    """
    words = stack([all_words_batch(hnn, L) for L in range(max_t + 1)])
    nf = normal_form_batch(hnn, words)
    fail_self = int((~equal_batch(hnn, words, nf)).sum())
    fail_reduced = int((~is_t_reduced_batch(hnn, nf)).sum())
    fail_idem = int(np.any(normal_form_batch(hnn, nf).canonical_rows() != nf.canonical_rows(), axis=1).sum())

    _, first = np.unique(_pack_rows(nf.canonical_rows()), return_index=True)
    distinct = take(nf, np.sort(first))
    auts = automorphism_group(hnn.H)
    quotients = semidirect_quotients(hnn, auts)
    wreaths = wreath_quotients(hnn, auts)
    keys = np.concatenate(
        [np.stack([quotient_images(hnn, distinct, q) for q in quotients], axis=1)]
        + [wreath_images(hnn, distinct, q) for q in wreaths],
        axis=1,
    )
    # hash collisions only merge classes, which adds pairs but never drops one
    _, group = np.unique(_hash_rows(keys), return_inverse=True)
    group = group.ravel()
    order = np.argsort(group, kind="stable")
    bounds = np.flatnonzero(np.diff(group[order])) + 1
    pair_i, pair_j = [], []
    triu: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for members in np.split(order, bounds):
        size = len(members)
        if size > 1:
            if size not in triu:
                triu[size] = np.triu_indices(size, k=1)
            i, j = triu[size]
            pair_i.append(members[i])
            pair_j.append(members[j])
    fail_pairs = 0
    n_pairs = 0
    if pair_i:
        I = np.concatenate(pair_i)
        J = np.concatenate(pair_j)
        n_pairs = len(I)
        for s in range(0, n_pairs, chunk):
            a = take(distinct, I[s: s + chunk])
            b = take(distinct, J[s: s + chunk])
            fail_pairs += int(equal_batch(hnn, a, b).sum())
    failures = fail_self + fail_reduced + fail_idem + fail_pairs
    return WordCheckResult(
        "normal-form completeness",
        len(words),
        failures,
        {
            "words": len(words),
            "normal_forms": len(distinct),
            "homomorphisms": len(quotients) + len(wreaths),
            "pairs": n_pairs,
            "word_vs_nf": fail_self,
            "not_reduced": fail_reduced,
            "not_idempotent": fail_idem,
            "distinct_but_equal": fail_pairs,
        },
    )


def _pack_rows(rows: np.ndarray) -> np.ndarray:
    """Injective integer code for small non-negative-shifted rows, else row bytes."""
    shifted = rows + 1
    base = int(shifted.max()) + 1 if shifted.size else 1
    if base ** rows.shape[1] < 2**62:
        code = np.zeros(len(rows), dtype=np.int64)
        for c in range(rows.shape[1]):
            code = code * base + shifted[:, c]
        return code
    return np.array([r.tobytes() for r in rows])


def _hash_rows(rows: np.ndarray) -> np.ndarray:
    h = np.full(len(rows), 1469598103934665603, dtype=np.uint64)
    prime = np.uint64(1099511628211)
    with np.errstate(over="ignore"):
        for c in range(rows.shape[1]):
            h = (h ^ rows[:, c].astype(np.uint64)) * prime
    return h
