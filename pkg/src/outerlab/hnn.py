"""Automorphism-induced HNN-extensions ``G = <H, t | t k t^-1 = phi(k), k in K>``.

Words are stored flat: a head letter in ``H`` followed by ``(exponent,
letter)`` pairs, so ``Word(h0, ((e1, h1), (e2, h2)))`` is
``h0 t^e1 h1 t^e2 h2``. Exponents are only +1 or -1.

A pinch is a factor ``t k t^-1`` with ``k`` in ``K`` or ``t^-1 k' t`` with
``k'`` in ``phi(K)``; a word without pinches is t-reduced.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import HnnValidationError, InstanceParseError
from .groups import (
    Automorphism,
    FiniteGroup,
    GroupConstructionError,
    Subgroup,
    _check_automorphism,
    invert_auto,
)


@dataclass(frozen=True)
class Word:
    head: int = 0
    tail: tuple[tuple[int, int], ...] = ()

    @property
    def t_length(self) -> int:
        return len(self.tail)

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(e for e, _ in self.tail)

    def letters(self) -> list[int]:
        return [self.head] + [h for _, h in self.tail]

    @classmethod
    def from_letters(cls, hs: Sequence[int], es: Sequence[int]) -> Word:
        if len(hs) != len(es) + 1:
            raise ValueError("need one more H-letter than t-letters")
        return cls(hs[0], tuple(zip(es, hs[1:])))

    @classmethod
    def h(cls, x: int) -> Word:
        return cls(x, ())

    @classmethod
    def t(cls, e: int = 1) -> Word:
        return cls(0, ((e, 0),))


IDENTITY = Word()


@dataclass(frozen=True, eq=False)
class HnnData:
    H: FiniteGroup
    K: Subgroup
    phi: Automorphism
    phiK: Subgroup = field(init=False)
    transversal_K: tuple[int, ...] = field(init=False)
    transversal_phiK: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        phiK = Subgroup(self.H, tuple(self.phi(k) for k in self.K), check=False)
        object.__setattr__(self, "phiK", phiK)
        object.__setattr__(self, "transversal_K", self.K.left_transversal())
        object.__setattr__(self, "transversal_phiK", phiK.left_transversal())

    @cached_property
    def phi_inv(self) -> Automorphism:
        return invert_auto(self.phi)

    def __repr__(self):
        return f"HnnData(H={self.H!r}, |K|={self.K.order})"


def validate_hnn(H: FiniteGroup, K: Subgroup, phi: Automorphism) -> HnnData:
    """Check the triple and build the cached HNN data."""
    if K.parent is not H:
        raise HnnValidationError("K is not a subgroup of H")
    if phi.group is not H:
        raise HnnValidationError("phi does not act on H")
    try:
        _check_automorphism(H, phi.image)
    except GroupConstructionError as exc:
        raise HnnValidationError(f"phi is not an automorphism of H: {exc}") from None
    if K.order == H.order:
        raise HnnValidationError("K = H: mapping-torus excluded (K must be a proper subgroup)")
    hnn = HnnData(H, K, phi)
    assert hnn.phiK.order == K.order
    return hnn


# --- word arithmetic ---------------------------------------------------------


def concat(hnn: HnnData, *words: Word) -> Word:
    tbl = hnn.H.table
    hs: list[int] = [0]
    es: list[int] = []
    for w in words:
        hs[-1] = tbl[hs[-1]][w.head]
        for e, h in w.tail:
            es.append(e)
            hs.append(h)
    return Word.from_letters(hs, es)


def inverse(hnn: HnnData, w: Word) -> Word:
    inv = hnn.H.inverse
    hs = [inv[h] for h in reversed(w.letters())]
    es = [-e for e in reversed(w.exponents)]
    return Word.from_letters(hs, es)


def _reduce_letters(hnn: HnnData, hs_in: Sequence[int], es_in: Sequence[int]) -> tuple[list[int], list[int]]:
    tbl = hnn.H.table
    inK = hnn.K.mask
    inPK = hnn.phiK.mask
    phi = hnn.phi.image
    phinv = hnn.phi_inv.image
    hs = [hs_in[0]]
    es: list[int] = []
    for e, h in zip(es_in, hs_in[1:]):
        if es and es[-1] == -e:
            mid = hs[-1]
            if e == -1 and inK[mid]:
                val = phi[mid]
            elif e == 1 and inPK[mid]:
                val = phinv[mid]
            else:
                es.append(e)
                hs.append(h)
                continue
            es.pop()
            hs.pop()
            hs[-1] = tbl[tbl[hs[-1]][val]][h]
        else:
            es.append(e)
            hs.append(h)
    return hs, es


def britton_reduce(hnn: HnnData, w: Word) -> Word:
    """Remove pinches (``t k t^-1 -> phi(k)``, ``t^-1 k' t -> phi^-1(k')``) until none remain."""
    hs, es = _reduce_letters(hnn, w.letters(), w.exponents)
    return Word.from_letters(hs, es)


def is_t_reduced(hnn: HnnData, w: Word) -> bool:
    inK, inPK = hnn.K.mask, hnn.phiK.mask
    hs, es = w.letters(), w.exponents
    for i in range(len(es) - 1):
        mid = hs[i + 1]
        if es[i] == 1 and es[i + 1] == -1 and inK[mid]:
            return False
        if es[i] == -1 and es[i + 1] == 1 and inPK[mid]:
            return False
    return True


def is_identity(hnn: HnnData, w: Word) -> bool:
    r = britton_reduce(hnn, w)
    return not r.tail and r.head == 0


def words_equal(hnn: HnnData, w1: Word, w2: Word) -> bool:
    """Decide ``w1 = w2`` in G by reducing ``w1 w2^-1``."""
    return is_identity(hnn, concat(hnn, w1, inverse(hnn, w2)))


def normal_form(hnn: HnnData, w: Word) -> Word:
    """Canonical word for the element represented by ``w``.

    Scans the reduced word left to right; the H-letter before ``t`` is split as
    ``r k'`` with ``k'`` in ``phi(K)`` and before ``t^-1`` as ``r k`` with ``k``
    in ``K`` (``r`` the least element of the left coset), and the subgroup part
    is pushed through the stable letter.
    """
    hs, es = _reduce_letters(hnn, w.letters(), w.exponents)
    tbl = hnn.H.table
    inv = hnn.H.inverse
    repK, repPK = hnn.transversal_K, hnn.transversal_phiK
    phi, phinv = hnn.phi.image, hnn.phi_inv.image
    out = []
    carry = 0
    for i, e in enumerate(es):
        h = tbl[carry][hs[i]]
        if e == 1:
            r = repPK[h]
            carry = phinv[tbl[inv[r]][h]]
        else:
            r = repK[h]
            carry = phi[tbl[inv[r]][h]]
        out.append(r)
    out.append(tbl[carry][hs[-1]])
    return Word.from_letters(out, es)


# --- word maps ---------------------------------------------------------------


@dataclass(frozen=True)
class WordMap:
    """Endomorphism of G given on generators: ``h -> hmap(h)``, ``t -> timage``."""

    hmap: tuple[int, ...]
    timage: Word

    @classmethod
    def identity(cls, hnn: HnnData) -> WordMap:
        return cls(tuple(range(hnn.H.order)), Word.t())


def apply_genmap(hnn: HnnData, hmap: Automorphism | Sequence[int], timage: Word, w: Word) -> Word:
    """Substitute ``hmap`` on H-letters and ``timage`` (or its inverse) on t-letters, then reduce."""
    img = hmap.image if isinstance(hmap, Automorphism) else hmap
    tinv = inverse(hnn, timage)
    parts = [Word.h(img[w.head])]
    for e, h in w.tail:
        parts.append(timage if e == 1 else tinv)
        parts.append(Word.h(img[h]))
    return britton_reduce(hnn, concat(hnn, *parts))


def apply_map(hnn: HnnData, m: WordMap, w: Word) -> Word:
    return apply_genmap(hnn, m.hmap, m.timage, w)


def compose_maps(hnn: HnnData, f: WordMap, g: WordMap) -> WordMap:
    """Apply ``f`` first, then ``g``."""
    hmap = tuple(g.hmap[x] for x in f.hmap)
    return WordMap(hmap, apply_map(hnn, g, f.timage))


def maps_equal(hnn: HnnData, f: WordMap, g: WordMap) -> bool:
    """Agreement on the generators ``H`` and ``t``."""
    return f.hmap == g.hmap and words_equal(hnn, f.timage, g.timage)


def preserves_relations(hnn: HnnData, m: WordMap) -> bool:
    """``m(t) m(k) m(t)^-1 = m(phi(k))`` for every ``k`` in K."""
    tinv = inverse(hnn, m.timage)
    for k in hnn.K:
        lhs = concat(hnn, m.timage, Word.h(m.hmap[k]), tinv)
        if not words_equal(hnn, lhs, Word.h(m.hmap[hnn.phi(k)])):
            return False
    return True


def inner_map(hnn: HnnData, g: Word) -> WordMap:
    """Conjugation ``x -> g^-1 x g`` as a word map (H-letters must land in H)."""
    ginv = inverse(hnn, g)
    hmap = []
    for h in range(hnn.H.order):
        r = britton_reduce(hnn, concat(hnn, ginv, Word.h(h), g))
        if r.tail:
            raise ValueError("conjugation by g does not preserve H")
        hmap.append(r.head)
    return WordMap(tuple(hmap), britton_reduce(hnn, concat(hnn, ginv, Word.t(), g)))


# --- conjugation profile -----------------------------------------------------


def conjugation_profile(hnn: HnnData, g: Word) -> tuple[int, int]:
    """``(i, a)`` with ``g^-1 b g = a^-1 phi^i(b) a`` whenever the left side lies in H.

    Built letter by letter: passing ``t^e`` then ``d`` sends ``(i, a)`` to
    ``(i - e, phi^-e(a) d)``.
    """
    tbl = hnn.H.table
    phi, phinv = hnn.phi.image, hnn.phi_inv.image
    i, a = 0, g.head
    for e, d in g.tail:
        i -= e
        a = tbl[phinv[a] if e == 1 else phi[a]][d]
    return i, a


# --- text syntax -------------------------------------------------------------


_TOKEN = re.compile(r"^h(\d+)$")


def parse_word(hnn_or_group: HnnData | FiniteGroup, text: str) -> Word:
    """Parse whitespace-separated ``h<index>``, ``t``, ``T`` tokens (``T`` is ``t^-1``)."""
    H = hnn_or_group.H if isinstance(hnn_or_group, HnnData) else hnn_or_group
    hs = [0]
    es: list[int] = []
    for tok in text.split():
        if tok == "t":
            es.append(1)
            hs.append(0)
        elif tok == "T":
            es.append(-1)
            hs.append(0)
        else:
            m = _TOKEN.match(tok)
            if not m:
                raise InstanceParseError(f"bad word token {tok!r}")
            x = int(m.group(1))
            if x >= H.order:
                raise InstanceParseError(f"element h{x} outside group of order {H.order}")
            hs[-1] = H.table[hs[-1]][x]
    return Word.from_letters(hs, es)


def format_word(w: Word) -> str:
    toks = []
    if w.head:
        toks.append(f"h{w.head}")
    for e, h in w.tail:
        toks.append("t" if e == 1 else "T")
        if h:
            toks.append(f"h{h}")
    return " ".join(toks)


def random_word(hnn: HnnData, rng, t_length: int) -> Word:
    n = hnn.H.order
    hs = [rng.randrange(n) for _ in range(t_length + 1)]
    es = [rng.choice((1, -1)) for _ in range(t_length)]
    return Word.from_letters(hs, es)


def words_of_length(hnn: HnnData, t_length: int) -> Iterable[Word]:
    """Every word with exactly ``t_length`` stable letters (H-letters over all of H)."""
    from itertools import product

    n = hnn.H.order
    for es in product((1, -1), repeat=t_length):
        for hs in product(range(n), repeat=t_length + 1):
            yield Word.from_letters(hs, es)
