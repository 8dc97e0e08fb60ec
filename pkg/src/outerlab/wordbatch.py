"""Vectorised Britton reduction and normal forms over many words at once.

A batch is ``(hs, es, lens)``: ``hs`` has shape ``(N, M+1)`` with the H-letters,
``es`` shape ``(N, M)`` with exponents, ``lens`` the t-length of each row.
Entries past a row's length are padding and carry ``-1`` in outputs.
The scalar functions in :mod:`outerlab.hnn` are the reference; these mirror
them step for step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import invert_auto
from .hnn import HnnData, Word


@dataclass
class Batch:
    hs: np.ndarray
    es: np.ndarray
    lens: np.ndarray

    def __len__(self):
        return len(self.lens)

    @property
    def width(self) -> int:
        return self.es.shape[1]

    def word(self, i: int) -> Word:
        n = int(self.lens[i])
        return Word.from_letters([int(x) for x in self.hs[i, : n + 1]], [int(e) for e in self.es[i, :n]])

    def keys(self) -> list[bytes]:
        """Byte strings equal exactly when the rows are identical words."""
        return [row.tobytes() for row in self.canonical_rows()]

    def canonical_rows(self) -> np.ndarray:
        M = self.width
        hs = self.hs.copy()
        es = self.es.astype(np.int64)
        cols = np.arange(M + 1)
        hs[cols[None, :] > self.lens[:, None]] = -1
        es[cols[None, :M] >= self.lens[:, None]] = 0
        return np.concatenate([self.lens[:, None].astype(np.int64), hs, es], axis=1)


def from_words(words) -> Batch:
    words = list(words)
    M = max((w.t_length for w in words), default=0)
    N = len(words)
    hs = np.full((N, M + 1), -1, dtype=np.int64)
    es = np.zeros((N, M), dtype=np.int64)
    lens = np.zeros(N, dtype=np.int64)
    for i, w in enumerate(words):
        n = w.t_length
        lens[i] = n
        hs[i, : n + 1] = w.letters()
        es[i, :n] = w.exponents
    return Batch(hs, es, lens)


class Tables:
    """numpy copies of the group data used by the batch kernels."""

    def __init__(self, hnn: HnnData):
        self.mul = np.asarray(hnn.H.table, dtype=np.int64)
        self.inv = np.asarray(hnn.H.inverse, dtype=np.int64)
        self.inK = np.asarray(hnn.K.mask, dtype=bool)
        self.inPK = np.asarray(hnn.phiK.mask, dtype=bool)
        self.phi = np.asarray(hnn.phi.image, dtype=np.int64)
        self.phinv = np.asarray(hnn.phi_inv.image, dtype=np.int64)
        self.repK = np.asarray(hnn.transversal_K, dtype=np.int64)
        self.repPK = np.asarray(hnn.transversal_phiK, dtype=np.int64)


def _tables(hnn: HnnData) -> Tables:
    cache = hnn.__dict__.setdefault("_batch_tables", None)
    if cache is None:
        cache = Tables(hnn)
        hnn.__dict__["_batch_tables"] = cache
    return cache


def reduce_batch(hnn: HnnData, b: Batch) -> Batch:
    """Stack reduction of every row (same pinch rules as :func:`~outerlab.hnn.britton_reduce`)."""
    T = _tables(hnn)
    N, M = len(b), b.width
    sh = np.full((N, M + 1), -1, dtype=np.int64)
    se = np.zeros((N, M), dtype=np.int64)
    top = np.zeros(N, dtype=np.int64)
    sh[:, 0] = b.hs[:, 0]
    rows = np.arange(N)
    for j in range(M):
        live = j < b.lens
        e = b.es[:, j]
        h = b.hs[:, j + 1]
        mid = sh[rows, top]
        prev_e = se[rows, np.maximum(top - 1, 0)]
        can = live & (top > 0) & (prev_e == -e)
        safe_mid = np.where(can, mid, 0)
        pinch = can & (((e == -1) & T.inK[safe_mid]) | ((e == 1) & T.inPK[safe_mid]))
        push = live & ~pinch
        # push
        r = rows[push]
        se[r, top[r]] = e[r]
        top[r] += 1
        sh[r, top[r]] = h[r]
        # pinch
        r = rows[pinch]
        if len(r):
            m = safe_mid[r]
            val = np.where(e[r] == -1, T.phi[m], T.phinv[m])
            sh[r, top[r]] = -1
            se[r, top[r] - 1] = 0
            top[r] -= 1
            sh[r, top[r]] = T.mul[T.mul[sh[r, top[r]], val], h[r]]
    return Batch(sh, se, top)


def normal_form_batch(hnn: HnnData, b: Batch) -> Batch:
    """Row-wise :func:`~outerlab.hnn.normal_form`."""
    T = _tables(hnn)
    r = reduce_batch(hnn, b)
    N, M = len(r), r.width
    out = np.full((N, M + 1), -1, dtype=np.int64)
    carry = np.zeros(N, dtype=np.int64)
    for i in range(M):
        live = i < r.lens
        h = T.mul[carry, np.where(live, r.hs[:, i], 0)]
        plus = r.es[:, i] == 1
        rep = np.where(plus, T.repPK[h], T.repK[h])
        rest = T.mul[T.inv[rep], h]
        new_carry = np.where(plus, T.phinv[rest], T.phi[rest])
        out[:, i] = np.where(live, rep, out[:, i])
        carry = np.where(live, new_carry, carry)
    rows = np.arange(N)
    out[rows, r.lens] = T.mul[carry, r.hs[rows, r.lens]]
    return Batch(out, r.es.copy(), r.lens.copy())


def inverse_batch(hnn: HnnData, b: Batch) -> Batch:
    T = _tables(hnn)
    N, M = len(b), b.width
    hs = np.full((N, M + 1), -1, dtype=np.int64)
    es = np.zeros((N, M), dtype=np.int64)
    rows = np.arange(N)
    for j in range(M + 1):
        live = j <= b.lens
        src = np.where(live, b.lens - j, 0)
        hs[:, j] = np.where(live, T.inv[np.maximum(b.hs[rows, src], 0)], -1)
    for j in range(M):
        live = j < b.lens
        src = np.where(live, b.lens - 1 - j, 0)
        es[:, j] = np.where(live, -b.es[rows, src], 0)
    return Batch(hs, es, b.lens.copy())


def concat_batch(hnn: HnnData, a: Batch, b: Batch) -> Batch:
    """Row-wise ``a[i] * b[i]`` (joining the last letter of ``a`` to the head of ``b``)."""
    T = _tables(hnn)
    N = len(a)
    M = a.width + b.width
    hs = np.full((N, M + 1), -1, dtype=np.int64)
    es = np.zeros((N, M), dtype=np.int64)
    rows = np.arange(N)
    hs[:, : a.width + 1] = a.hs
    es[:, : a.width] = a.es
    hs[rows, a.lens] = T.mul[a.hs[rows, a.lens], b.hs[:, 0]]
    for j in range(b.width):
        live = j < b.lens
        r = rows[live]
        es[r, a.lens[r] + j] = b.es[r, j]
        hs[r, a.lens[r] + j + 1] = b.hs[r, j + 1]
    return Batch(hs, es, a.lens + b.lens)


def apply_map_batch(hnn: HnnData, b: Batch, hmaps: np.ndarray, timages: Batch) -> Batch:
    """Row-wise :func:`~outerlab.hnn.apply_genmap`: row ``i`` of ``b`` under ``(hmaps[i], timages[i])``, reduced."""
    N = len(b)
    rows = np.arange(N)
    tinv = inverse_batch(hnn, timages)
    empty = np.zeros((N, 0), dtype=np.int64)
    zero = np.zeros(N, dtype=np.int64)
    out = Batch(hmaps[rows, b.hs[:, 0]][:, None], empty, zero)
    for j in range(b.width):
        live = j < b.lens
        fwd = (b.es[:, j] == 1)[:, None]
        piece = Batch(
            np.where(live[:, None], np.where(fwd, timages.hs, tinv.hs), np.where(np.arange(timages.width + 1) == 0, 0, -1)),
            np.where(live[:, None], np.where(fwd, timages.es, tinv.es), 0),
            np.where(live, timages.lens, 0),
        )
        letter = np.where(live, hmaps[rows, np.maximum(b.hs[:, j + 1], 0)], 0)
        out = concat_batch(hnn, out, piece)
        out = concat_batch(hnn, out, Batch(letter[:, None], empty, zero))
    return reduce_batch(hnn, out)


def is_identity_batch(hnn: HnnData, b: Batch) -> np.ndarray:
    r = reduce_batch(hnn, b)
    return (r.lens == 0) & (r.hs[:, 0] == 0)


def equal_batch(hnn: HnnData, a: Batch, b: Batch) -> np.ndarray:
    """Row-wise ``words_equal``: reduce ``a b^-1`` to the identity."""
    return is_identity_batch(hnn, concat_batch(hnn, a, inverse_batch(hnn, b)))


def is_t_reduced_batch(hnn: HnnData, b: Batch) -> np.ndarray:
    T = _tables(hnn)
    ok = np.ones(len(b), dtype=bool)
    for i in range(b.width - 1):
        live = i + 1 < b.lens
        mid = np.maximum(b.hs[:, i + 1], 0)
        e1, e2 = b.es[:, i], b.es[:, i + 1]
        bad = live & (((e1 == 1) & (e2 == -1) & T.inK[mid]) | ((e1 == -1) & (e2 == 1) & T.inPK[mid]))
        ok &= ~bad
    return ok


def random_batch(hnn: HnnData, rng: np.random.Generator, n: int, t_length: int) -> Batch:
    H = hnn.H.order
    hs = rng.integers(0, H, size=(n, t_length + 1))
    es = rng.choice(np.array([1, -1]), size=(n, t_length))
    return Batch(hs.astype(np.int64), es.astype(np.int64), np.full(n, t_length, dtype=np.int64))


def all_words_batch(hnn: HnnData, t_length: int) -> Batch:
    """Every word of exactly ``t_length`` stable letters, same order as :func:`~outerlab.hnn.words_of_length`."""
    H = hnn.H.order
    es = np.array(np.meshgrid(*[[1, -1]] * t_length, indexing="ij")).reshape(t_length, -1).T if t_length else np.zeros((1, 0), dtype=np.int64)
    hs = np.array(np.meshgrid(*[np.arange(H)] * (t_length + 1), indexing="ij")).reshape(t_length + 1, -1).T
    ne, nh = len(es), len(hs)
    return Batch(
        np.tile(hs, (ne, 1)).astype(np.int64),
        np.repeat(es, nh, axis=0).astype(np.int64),
        np.full(ne * nh, t_length, dtype=np.int64),
    )


def stack(batches: list[Batch]) -> Batch:
    M = max(b.width for b in batches)

    def pad(a, width, fill):
        out = np.full((a.shape[0], width), fill, dtype=np.int64)
        out[:, : a.shape[1]] = a
        return out

    return Batch(
        np.concatenate([pad(b.hs, M + 1, -1) for b in batches]),
        np.concatenate([pad(b.es, M, 0) for b in batches]),
        np.concatenate([b.lens for b in batches]),
    )


def take(b: Batch, idx) -> Batch:
    return Batch(b.hs[idx], b.es[idx], b.lens[idx])


# --- homomorphisms to H x| Z, used as equality-preserving invariants ------------


def semidirect_quotients(hnn: HnnData, auts, limit: int = 48) -> list[tuple[np.ndarray, int]]:
    """Maps ``h -> (h, 0)``, ``t -> (x, 1)`` into ``H x|_theta Z``.

    ``(theta, x)`` qualifies when ``x theta(k) x^-1 = phi(k)`` on K, which is
    exactly the defining relation, so each is a homomorphism of G. At most
    ``limit`` qualifying pairs are kept, evenly spaced in enumeration order.
    Each is returned as ``(power tables of theta, x)``.
    """
    H = hnn.H
    tbl = H.table
    found = []
    for theta in auts:
        th = theta.image
        for x in H.elements:
            xi = H.inverse[x]
            if all(tbl[tbl[x][th[k]]][xi] == hnn.phi(k) for k in hnn.K):
                found.append((theta, x))
    if len(found) > limit:
        step = len(found) / limit
        found = [found[int(i * step)] for i in range(limit)]
    tables = {}
    out = []
    for theta, x in found:
        if theta.image not in tables:
            tables[theta.image] = _power_tables(theta)
        out.append((tables[theta.image], x))
    return out


_R = 16


def _power_tables(theta) -> np.ndarray:
    """Rows ``m + R`` hold ``theta^m`` for ``-R <= m <= R``."""
    n = theta.group.order
    f = np.asarray(theta.image)
    g = np.asarray(invert_auto(theta).image)
    up, down = [np.arange(n)], [np.arange(n)]
    for _ in range(_R):
        up.append(f[up[-1]])
        down.append(g[down[-1]])
    rows = list(reversed(down[1:])) + up
    return np.stack(rows)


def quotient_images(hnn: HnnData, b: Batch, quotient) -> np.ndarray:
    """Image ``(element, exponent sum)`` of each row, packed into one integer."""
    T = _tables(hnn)
    pw, x = quotient
    N = len(b)
    a = np.zeros(N, dtype=np.int64)
    m = np.zeros(N, dtype=np.int64)
    xinv = T.inv[x]
    for j in range(b.width + 1):
        live = j <= b.lens
        h = np.maximum(b.hs[:, j], 0)
        a = np.where(live, T.mul[a, pw[m + _R, h]], a)
        if j < b.width:
            live_t = j < b.lens
            e = b.es[:, j]
            step_plus = T.mul[a, pw[m + _R, x]]
            step_minus = T.mul[a, pw[m - 1 + _R, xinv]]
            a = np.where(live_t, np.where(e == 1, step_plus, step_minus), a)
            m = np.where(live_t, m + e, m)
    return a * (4 * _R + 1) + (m + 2 * _R)


def wreath_quotients(hnn: HnnData, auts, m: int = 3, count: int = 12, seed: int = 0, tries: int = 200) -> list[tuple[np.ndarray, np.ndarray]]:
    """Maps into ``H^m x| C_m`` (cyclic shift of coordinates).

    ``h -> ((rho_0(h), ..., rho_{m-1}(h)), 0)`` and ``t -> ((x_0, ..., x_{m-1}), 1)``
    respect the defining relation iff ``x_i rho_{i-1}(k) x_i^-1 = rho_i(phi(k))``
    for every i (indices mod m) and k in K. Each ``rho_i`` is an automorphism or
    the trivial map; chains are drawn at random and kept only when every
    coordinate condition holds, so each returned pair is a homomorphism of G.
    """
    import random

    H = hnn.H
    tbl, inv = H.table, H.inverse
    n = H.order
    rng = random.Random(seed)
    cands = [tuple([0] * n)] + [a.image for a in auts]
    K = list(hnn.K)
    phi = hnn.phi.image

    def valid(prev, rho, x):
        xi = inv[x]
        return all(tbl[tbl[x][prev[k]]][xi] == rho[phi[k]] for k in K)

    out = []
    seen = set()
    for _ in range(tries):
        if len(out) >= count:
            break
        rhos = [rng.choice(cands)]
        xs = [0]
        ok = True
        for _i in range(1, m):
            found = None
            for _j in range(64):
                rho, x = rng.choice(cands), rng.randrange(n)
                if valid(rhos[-1], rho, x):
                    found = (rho, x)
                    break
            if found is None:
                ok = False
                break
            rhos.append(found[0])
            xs.append(found[1])
        if not ok:
            continue
        closing = [x for x in range(n) if valid(rhos[-1], rhos[0], x)]
        if not closing:
            continue
        xs[0] = rng.choice(closing)
        key = (tuple(rhos), tuple(xs))
        if key in seen or all(r == cands[0] for r in rhos):
            continue
        seen.add(key)
        out.append((np.asarray(rhos, dtype=np.int64), np.asarray(xs, dtype=np.int64)))
    return out


def wreath_images(hnn: HnnData, b: Batch, quotient) -> np.ndarray:
    """Image of each row in ``H^m x| C_m`` as an ``(N, m+1)`` integer array."""
    T = _tables(hnn)
    R, X = quotient
    m = len(X)
    N = len(b)
    a = np.zeros((N, m), dtype=np.int64)
    s = np.zeros(N, dtype=np.int64)
    coords = np.arange(m)
    Xinv = T.inv[X]
    for j in range(b.width + 1):
        live = j <= b.lens
        h = np.maximum(b.hs[:, j], 0)
        idx = (coords[None, :] - s[:, None]) % m
        a = np.where(live[:, None], T.mul[a, R[idx, h[:, None]]], a)
        if j < b.width:
            lt = j < b.lens
            e = b.es[:, j]
            plus = T.mul[a, X[idx]]
            minus = T.mul[a, Xinv[(idx + 1) % m]]
            a = np.where(lt[:, None], np.where((e == 1)[:, None], plus, minus), a)
            s = np.where(lt, (s + e) % m, s)
    return np.concatenate([a, s[:, None]], axis=1)
