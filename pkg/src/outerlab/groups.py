"""Finite groups given by Cayley tables.

Every group is stored as an ``n x n`` multiplication table over the element
indices ``0..n-1`` with ``table[i][j]`` the index of ``i*j`` (left factor
first). Element 0 is always the identity.

Maps compose left to right: ``compose_autos(f, g)`` is "apply f, then g".
The inner automorphism attached to ``g`` is ``h -> g^-1 h g``.
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import InitVar, dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .config import Config, load_config
from .errors import GroupConstructionError, NotNormalError, SizeError


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    table: tuple[tuple[int, ...], ...]
    inverse: tuple[int, ...] = field(init=False)
    labels: tuple[str, ...] | None = None
    provenance: str = "cayley"
    name: str = ""

    def __post_init__(self):
        n = len(self.table)
        if n == 0:
            raise GroupConstructionError("empty table")
        arr = np.asarray(self.table, dtype=np.int64)
        if arr.shape != (n, n):
            raise GroupConstructionError(f"table is not square: shape {arr.shape}")
        _check_table(arr)
        inv = [0] * n
        for i, row in enumerate(self.table):
            inv[i] = row.index(0)
        object.__setattr__(self, "inverse", tuple(inv))
        if self.labels is not None and len(self.labels) != n:
            raise GroupConstructionError("label count does not match order")

    @property
    def order(self) -> int:
        return len(self.table)

    def __len__(self):
        return len(self.table)

    def __repr__(self):
        name = self.name or self.provenance
        return f"FiniteGroup({name}, order={self.order})"

    def mul(self, *elements: int) -> int:
        x = 0
        tbl = self.table
        for e in elements:
            x = tbl[x][e]
        return x

    def inv(self, x: int) -> int:
        return self.inverse[x]

    def conj(self, h: int, g: int) -> int:
        """``h^g = g^-1 h g``."""
        tbl = self.table
        return tbl[tbl[self.inverse[g]][h]][g]

    def label(self, x: int) -> str:
        if self.labels is None:
            return f"h{x}"
        return self.labels[x]

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != 0:
            y = self.table[y][x]
            k += 1
        return k

    @cached_property
    def orders(self) -> tuple[int, ...]:
        return tuple(self.element_order(x) for x in range(self.order))

    def order_census(self) -> list[int]:
        """Sorted multiset of element orders."""
        return sorted(self.orders)

    def is_abelian(self) -> bool:
        tbl = self.table
        n = self.order
        return all(tbl[i][j] == tbl[j][i] for i in range(n) for j in range(i + 1, n))

    @property
    def elements(self) -> range:
        return range(self.order)

    @classmethod
    def from_table(cls, table, labels=None, provenance="cayley", name=""):
        """Validate ``table``, moving the identity to index 0 if needed."""
        rows = [list(map(int, r)) for r in table]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise GroupConstructionError("table must be a non-empty square array")
        for i, r in enumerate(rows):
            for j, v in enumerate(r):
                if not 0 <= v < n:
                    raise GroupConstructionError(f"cell ({i}, {j}) holds {v}, outside 0..{n - 1}")
        ident = next(
            (e for e in range(n) if rows[e] == list(range(n)) and all(rows[i][e] == i for i in range(n))),
            None,
        )
        if ident is None:
            raise GroupConstructionError("table has no two-sided identity")
        if ident != 0:
            perm = list(range(n))
            perm[0], perm[ident] = ident, 0  # perm[new] = old
            pos = {old: new for new, old in enumerate(perm)}
            rows = [[pos[rows[perm[i]][perm[j]]] for j in range(n)] for i in range(n)]
            if labels is not None:
                labels = [labels[perm[i]] for i in range(n)]
        return cls(
            table=tuple(tuple(r) for r in rows),
            labels=tuple(labels) if labels is not None else None,
            provenance=provenance,
            name=name,
        )


def _check_table(arr: np.ndarray) -> None:
    n = arr.shape[0]
    if arr.min() < 0 or arr.max() >= n:
        i, j = np.argwhere((arr < 0) | (arr >= n))[0]
        raise GroupConstructionError(f"cell ({i}, {j}) holds {arr[i, j]}, outside 0..{n - 1}")
    if not (np.array_equal(arr[0], np.arange(n)) and np.array_equal(arr[:, 0], np.arange(n))):
        raise GroupConstructionError("element 0 is not the identity")
    ref = np.arange(n)
    for axis, kind in ((1, "row"), (0, "column")):
        bad = ~np.all(np.sort(arr, axis=axis) == (ref if axis == 1 else ref[:, None]), axis=axis)
        if bad.any():
            idx = int(np.argmax(bad))
            raise GroupConstructionError(f"not a Latin square: {kind} {idx} repeats an entry")
    # Chunked over the left factor to bound memory.
    for i in range(n):
        left = arr[arr[i]]            # (i j) k  for all j, k
        right = arr[i][arr]           # i (j k)
        if not np.array_equal(left, right):
            j, k = np.argwhere(left != right)[0]
            raise GroupConstructionError(f"associativity fails for triple ({i}, {j}, {k})")


# --- subgroups ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: FiniteGroup
    elements: tuple[int, ...]
    check: InitVar[bool] = True

    def __post_init__(self, check):
        elems = tuple(sorted(set(self.elements)))
        object.__setattr__(self, "elements", elems)
        if check:
            s = set(elems)
            tbl = self.parent.table
            if 0 not in s:
                raise GroupConstructionError("subgroup does not contain the identity")
            for x in elems:
                if self.parent.inverse[x] not in s:
                    raise GroupConstructionError(f"subgroup not closed under inverse at {x}")
                for y in elems:
                    if tbl[x][y] not in s:
                        raise GroupConstructionError(f"subgroup not closed: {x}*{y}")
            if self.parent.order % len(elems):
                raise GroupConstructionError("subgroup order does not divide group order")

    @cached_property
    def members(self) -> frozenset[int]:
        return frozenset(self.elements)

    @cached_property
    def mask(self) -> tuple[bool, ...]:
        m = [False] * self.parent.order
        for x in self.elements:
            m[x] = True
        return tuple(m)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.members

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.parent is other.parent and self.elements == other.elements

    def __hash__(self):
        return hash((id(self.parent), self.elements))

    def __le__(self, other: Subgroup) -> bool:
        return self.members <= other.members

    def __repr__(self):
        return f"Subgroup(order={self.order}, elements={list(self.elements)})"

    def is_normal(self) -> bool:
        return find_non_normalizing(self.parent, self) is None

    def left_transversal(self) -> tuple[int, ...]:
        """``rep[h]``: the minimal index in the left coset ``h*S``."""
        tbl = self.parent.table
        return tuple(min(tbl[h][s] for s in self.elements) for h in range(self.parent.order))


def _closure(G: FiniteGroup, seeds: Iterable[int]) -> set[int]:
    tbl = G.table
    gens = [s for s in set(seeds) if s != 0]
    elems = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = tbl[x][g]
            if y not in elems:
                elems.add(y)
                queue.append(y)
    return elems


def subgroup_generated(G: FiniteGroup, seeds: Iterable[int]) -> Subgroup:
    """Smallest subgroup of ``G`` containing ``seeds``."""
    seeds = list(seeds)
    for s in seeds:
        if not 0 <= s < G.order:
            raise ValueError(f"element {s} not in group of order {G.order}")
    return Subgroup(G, tuple(_closure(G, seeds)), check=False)


def whole(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, tuple(range(G.order)), check=False)


def trivial(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, (0,), check=False)


def center(G: FiniteGroup) -> Subgroup:
    return centralizer(G, range(G.order))


def centralizer(G: FiniteGroup, S: Iterable[int]) -> Subgroup:
    S = list(S)
    tbl = G.table
    elems = [g for g in range(G.order) if all(tbl[g][s] == tbl[s][g] for s in S)]
    return Subgroup(G, tuple(elems), check=False)


def normalizer(G: FiniteGroup, S: Subgroup | Iterable[int]) -> Subgroup:
    members = S.members if isinstance(S, Subgroup) else frozenset(S)
    elems = [g for g in range(G.order) if all(G.conj(s, g) in members for s in members)]
    return Subgroup(G, tuple(elems), check=False)


def conjugate_subgroup(G: FiniteGroup, S: Subgroup, a: int) -> Subgroup:
    """``a^-1 S a``."""
    return Subgroup(G, tuple(G.conj(s, a) for s in S), check=False)


def find_non_normalizing(G: FiniteGroup, N: Subgroup) -> tuple[int, int] | None:
    """A pair ``(g, n)`` with ``g^-1 n g`` outside ``N``, or None if N is normal."""
    for g in range(G.order):
        for n in N.elements:
            if G.conj(n, g) not in N.members:
                return g, n
    return None


def product_subgroup(G: FiniteGroup, A: Subgroup, B: Subgroup) -> Subgroup:
    """The subgroup generated by ``A`` and ``B``."""
    return subgroup_generated(G, list(A.elements) + list(B.elements))


def intersection(A: Subgroup, B: Subgroup) -> Subgroup:
    return Subgroup(A.parent, tuple(A.members & B.members), check=False)


def quotient_group(G: FiniteGroup, N: Subgroup) -> tuple[FiniteGroup, tuple[int, ...]]:
    """Coset group ``G/N`` and the projection ``element -> coset index``.

    Cosets are indexed in increasing order of their minimal element, so the
    trivial coset is 0.
    """
    bad = find_non_normalizing(G, N)
    if bad is not None:
        g, n = bad
        raise NotNormalError(f"subgroup is not normal: conjugating {n} by {g} leaves it")
    rep = N.left_transversal()
    reps = sorted(set(rep))
    index = {r: i for i, r in enumerate(reps)}
    proj = tuple(index[rep[x]] for x in range(G.order))
    tbl = G.table
    table = [[proj[tbl[r][s]] for s in reps] for r in reps]
    labels = None
    if G.labels is not None:
        labels = [G.labels[r] + "N" for r in reps]
    Q = FiniteGroup.from_table(table, labels=labels, provenance="cayley", name=f"{G.name}/N")
    return Q, proj


def all_subgroups(G: FiniteGroup) -> list[Subgroup]:
    """Every subgroup of ``G``, sorted by (order, elements)."""
    cyclic = {frozenset(_closure(G, [g])) for g in range(G.order)}
    found = set(cyclic)
    frontier = set(cyclic)
    while frontier:
        new = set()
        for A in frontier:
            for C in cyclic:
                if C <= A:
                    continue
                J = frozenset(_closure(G, A | C))
                if J not in found:
                    new.add(J)
        found |= new
        frontier = new
    subs = sorted(found, key=lambda s: (len(s), sorted(s)))
    return [Subgroup(G, tuple(s), check=False) for s in subs]


def subgroup_classes(G: FiniteGroup) -> list[Subgroup]:
    """One representative per conjugacy class of subgroups (the lexicographically least)."""
    seen = set()
    reps = []
    for S in all_subgroups(G):
        if S.elements in seen:
            continue
        conjugates = {tuple(sorted(G.conj(s, a) for s in S)) for a in range(G.order)}
        seen |= conjugates
        reps.append(Subgroup(G, min(conjugates), check=False))
    return reps


# --- automorphisms -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Automorphism:
    group: FiniteGroup
    image: tuple[int, ...]
    check: InitVar[bool] = True

    def __post_init__(self, check):
        object.__setattr__(self, "image", tuple(self.image))
        if check:
            _check_automorphism(self.group, self.image)

    def __call__(self, x: int) -> int:
        return self.image[x]

    def __eq__(self, other):
        if not isinstance(other, Automorphism):
            return NotImplemented
        return self.group is other.group and self.image == other.image

    def __hash__(self):
        return hash(self.image)

    def __repr__(self):
        return f"Automorphism({list(self.image)})"

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.image))

    def apply_set(self, S: Iterable[int]) -> frozenset[int]:
        return frozenset(self.image[x] for x in S)

    def power(self, k: int) -> Automorphism:
        f = self if k >= 0 else invert_auto(self)
        out = identity_auto(self.group)
        for _ in range(abs(k)):
            out = compose_autos(out, f)
        return out


def _check_automorphism(G: FiniteGroup, image: Sequence[int]) -> None:
    n = G.order
    if len(image) != n or sorted(image) != list(range(n)):
        raise GroupConstructionError("image vector is not a bijection of the group")
    if image[0] != 0:
        raise GroupConstructionError("automorphism does not fix the identity")
    tbl = G.table
    for i in range(n):
        ri = tbl[image[i]]
        row = tbl[i]
        for j in range(n):
            if image[row[j]] != ri[image[j]]:
                raise GroupConstructionError(f"not a homomorphism at ({i}, {j})")


def identity_auto(G: FiniteGroup) -> Automorphism:
    return Automorphism(G, tuple(range(G.order)), check=False)


def compose_autos(f: Automorphism, g: Automorphism) -> Automorphism:
    """``fg``: apply ``f`` first, then ``g``."""
    if f.group is not g.group:
        raise ValueError("automorphisms act on different groups")
    gi = g.image
    return Automorphism(f.group, tuple(gi[x] for x in f.image), check=False)


def invert_auto(f: Automorphism) -> Automorphism:
    inv = [0] * len(f.image)
    for x, y in enumerate(f.image):
        inv[y] = x
    return Automorphism(f.group, tuple(inv), check=False)


def conjugation(G: FiniteGroup, g: int) -> Automorphism:
    """``gamma_g: h -> g^-1 h g``."""
    return Automorphism(G, tuple(G.conj(h, g) for h in range(G.order)), check=False)


def inner_automorphisms(G: FiniteGroup) -> list[tuple[Automorphism, int]]:
    """Distinct inner automorphisms with their least conjugator."""
    seen = {}
    for g in range(G.order):
        gam = conjugation(G, g)
        seen.setdefault(gam.image, (gam, g))
    out = sorted(seen.values(), key=lambda p: p[0].image)
    assert len(out) * center(G).order == G.order
    return out


def fixed_subgroup(f: Automorphism) -> Subgroup:
    elems = tuple(x for x, y in enumerate(f.image) if x == y)
    return Subgroup(f.group, elems, check=True)


def generating_set(G: FiniteGroup) -> list[int]:
    """Greedy small generating set: repeatedly add the element enlarging the span most."""
    gens: list[int] = []
    span = {0}
    while len(span) < G.order:
        best, best_span = None, span
        for g in range(G.order):
            if g in span:
                continue
            s = _closure(G, gens + [g])
            if len(s) > len(best_span):
                best, best_span = g, s
        gens.append(best)
        span = best_span
    return gens


def automorphism_group(G: FiniteGroup, config: Config | None = None) -> list[Automorphism]:
    """All automorphisms of ``G`` sorted by image vector (identity first).

    Backtracks over images of a greedy generating set; each partial assignment
    is propagated along the Cayley graph so conflicts prune early.
    """
    cfg = config or load_config()
    if G.order > cfg.max_group_order:
        raise SizeError(f"|G| = {G.order} exceeds automorphism cap {cfg.max_group_order}")
    cached = G.__dict__.get("_aut_cache")
    if cached is not None:
        return cached
    n = G.order
    tbl = G.table
    gens = generating_set(G)
    orders = G.orders
    candidates = [[y for y in range(n) if orders[y] == orders[g]] for g in gens]
    results = []

    def extend(fmap, used, depth, imgs):
        # fmap is defined on <gens[:depth]>; add gens[depth] -> candidate.
        if depth == len(gens):
            results.append(tuple(fmap))
            return
        g = gens[depth]
        for y in candidates[depth]:
            if used[y] and fmap[g] != y:
                continue
            if fmap[g] not in (-1, y):
                continue
            new = list(fmap)
            nused = list(used)
            pairs = list(zip(gens[:depth], imgs)) + [(g, y)]
            queue = deque(x for x in range(n) if new[x] != -1)
            ok = True
            while queue and ok:
                x = queue.popleft()
                fx = new[x]
                for s, fs in pairs:
                    xs = tbl[x][s]
                    v = tbl[fx][fs]
                    cur = new[xs]
                    if cur == -1:
                        if nused[v]:
                            ok = False
                            break
                        new[xs] = v
                        nused[v] = True
                        queue.append(xs)
                    elif cur != v:
                        ok = False
                        break
            if ok:
                extend(new, nused, depth + 1, imgs + [y])

    start = [-1] * n
    start[0] = 0
    used = [False] * n
    used[0] = True
    extend(start, used, 0, [])
    auts = [Automorphism(G, img, check=True) for img in sorted(set(results))]
    G.__dict__["_aut_cache"] = auts
    return auts


def automorphism_group_bruteforce(G: FiniteGroup, config: Config | None = None) -> list[Automorphism]:
    """Filter every bijection fixing 0; a self-test for small groups only."""
    cfg = config or load_config()
    if G.order > cfg.brute_force_aut_order:
        raise SizeError(f"brute-force enumeration limited to order {cfg.brute_force_aut_order}")
    n = G.order
    tbl = G.table
    out = []
    for perm in itertools.permutations(range(1, n)):
        img = (0,) + perm
        if all(img[tbl[i][j]] == tbl[img[i]][img[j]] for i in range(1, n) for j in range(1, n)):
            out.append(Automorphism(G, img, check=False))
    return out


# --- construction ------------------------------------------------------------


def perm_mul(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """Apply ``p`` first, then ``q``."""
    return tuple(q[x] for x in p)


def cycles_to_perm(cycles: Iterable[Sequence[int]], degree: int, one_based: bool = True) -> tuple[int, ...]:
    img = list(range(degree))
    off = 1 if one_based else 0
    for cyc in cycles:
        c = [x - off for x in cyc]
        for x in c:
            if not 0 <= x < degree:
                raise GroupConstructionError(f"point {x + off} outside degree {degree}")
        for a, b in zip(c, c[1:] + c[:1]):
            img[a] = b
    if sorted(img) != list(range(degree)):
        raise GroupConstructionError("cycles do not define a permutation")
    return tuple(img)


def perm_to_cycles(p: Sequence[int]) -> str:
    seen, parts = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j + 1)
            j = p[j]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "()"


def from_permutations(gens: Sequence[Sequence[int]], degree: int, config: Config | None = None, name: str = "") -> FiniteGroup:
    """Close permutation generators under products and table the result.

    Elements are indexed in lexicographic order of their image tuples, which
    puts the identity at 0.
    """
    cfg = config or load_config()
    ident = tuple(range(degree))
    gens = [tuple(g) for g in gens]
    for g in gens:
        if sorted(g) != list(ident):
            raise GroupConstructionError(f"generator {g} is not a permutation of degree {degree}")
    elems = {ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = perm_mul(x, g)
            if y not in elems:
                elems.add(y)
                if len(elems) > cfg.max_group_order:
                    raise SizeError(f"permutation closure exceeds cap {cfg.max_group_order}")
                queue.append(y)
    ordered = sorted(elems)
    index = {p: i for i, p in enumerate(ordered)}
    table = [[index[perm_mul(p, q)] for q in ordered] for p in ordered]
    labels = [perm_to_cycles(p) for p in ordered]
    return FiniteGroup.from_table(table, labels=labels, provenance="perm", name=name)


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupConstructionError("cyclic group needs n >= 1")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup.from_table(table, labels=[str(i) for i in range(n)], provenance="preset", name=f"C{n}")


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n. Index ``s*n + k`` is ``r^k s^s``."""
    if n < 1:
        raise GroupConstructionError("dihedral group needs n >= 1")

    def mul(x, y):
        (s1, k1), (s2, k2) = divmod(x, n), divmod(y, n)
        k = (k1 + (-k2 if s1 else k2)) % n
        return ((s1 ^ s2) * n) + k

    table = [[mul(x, y) for y in range(2 * n)] for x in range(2 * n)]
    labels = [("r%d" % (x % n) if x < n else "r%ds" % (x % n)) for x in range(2 * n)]
    return FiniteGroup.from_table(table, labels=labels, provenance="preset", name=f"D{n}")


def symmetric(n: int, config: Config | None = None) -> FiniteGroup:
    if n < 1:
        raise GroupConstructionError("symmetric group needs n >= 1")
    if n == 1:
        return FiniteGroup.from_table([[0]], labels=["()"], provenance="preset", name="S1")
    gens = [cycles_to_perm([(1, 2)], n), cycles_to_perm([tuple(range(1, n + 1))], n)]
    G = from_permutations(gens, n, config)
    return _as_preset(G, f"S{n}")


def alternating(n: int, config: Config | None = None) -> FiniteGroup:
    if n < 1:
        raise GroupConstructionError("alternating group needs n >= 1")
    if n < 3:
        return FiniteGroup.from_table([[0]], labels=["()"], provenance="preset", name=f"A{n}")
    gens = [cycles_to_perm([(1, 2, k)], n) for k in range(3, n + 1)]
    return _as_preset(from_permutations(gens, n, config), f"A{n}")


def quaternion8() -> FiniteGroup:
    # Regular representation on the units {1, i, j, k, -1, -i, -j, -k}.
    gens = [
        cycles_to_perm([(1, 2, 5, 6), (3, 4, 7, 8)], 8),
        cycles_to_perm([(1, 3, 5, 7), (2, 8, 6, 4)], 8),
    ]
    return _as_preset(from_permutations(gens, 8), "Q8")


def direct_product(*factors: FiniteGroup, config: Config | None = None) -> FiniteGroup:
    """Index of ``(x1, ..., xr)`` is mixed-radix with the first factor most significant."""
    cfg = config or load_config()
    sizes = [F.order for F in factors]
    total = 1
    for s in sizes:
        total *= s
    if total > cfg.max_group_order:
        raise SizeError(f"direct product of order {total} exceeds cap {cfg.max_group_order}")
    tuples = list(itertools.product(*[range(s) for s in sizes]))
    index = {t: i for i, t in enumerate(tuples)}
    table = [
        [index[tuple(F.table[a][b] for F, a, b in zip(factors, x, y))] for y in tuples]
        for x in tuples
    ]
    labels = ["(" + ",".join(F.label(a) for F, a in zip(factors, x)) + ")" for x in tuples]
    name = "x".join(F.name for F in factors)
    return FiniteGroup.from_table(table, labels=labels, provenance="preset", name=name)


def _as_preset(G: FiniteGroup, name: str) -> FiniteGroup:
    return FiniteGroup(table=G.table, labels=G.labels, provenance="preset", name=name)


_PRESET_RE = re.compile(r"^\s*([a-z0-9]+)\s*(\d+)?\s*$")


def preset(descriptor: str, config: Config | None = None) -> FiniteGroup:
    """Build a named group, e.g. ``"symmetric 3"``, ``"cyclic 2 x dihedral 4"``.

    Recognised names: cyclic, dihedral, symmetric, alternating, quaternion8.
    Factors joined by `` x `` (or the word ``product`` as a prefix) give a
    direct product.
    """
    cfg = config or load_config()
    desc = descriptor.strip().lower()
    if desc.startswith("product "):
        desc = desc[len("product "):]
    parts = [p for p in re.split(r"\s+x\s+|\s*\*\s*", desc) if p.strip()]
    if len(parts) > 1:
        return direct_product(*[preset(p, cfg) for p in parts], config=cfg)
    m = _PRESET_RE.match(desc)
    if not m:
        raise GroupConstructionError(f"unrecognised preset {descriptor!r}")
    kind, num = m.group(1), m.group(2)
    if kind in ("quaternion8", "q8", "quaternion"):
        G = quaternion8()
    else:
        if num is None:
            raise GroupConstructionError(f"preset {kind!r} needs a size parameter")
        k = int(num)
        builders = {
            "cyclic": cyclic, "c": cyclic,
            "dihedral": dihedral, "d": dihedral,
            "symmetric": lambda k: symmetric(k, cfg), "s": lambda k: symmetric(k, cfg),
            "alternating": lambda k: alternating(k, cfg), "a": lambda k: alternating(k, cfg),
        }
        if kind not in builders:
            raise GroupConstructionError(f"unrecognised preset {descriptor!r}")
        G = builders[kind](k)
    if G.order > cfg.max_group_order:
        raise SizeError(f"|G| = {G.order} exceeds cap {cfg.max_group_order}")
    return G


def build_group(source, config: Config | None = None) -> FiniteGroup:
    """Build a group from a descriptor.

    ``source`` is one of a preset string, ``{"preset": str}``,
    ``{"perm": [cycle-lists...], "degree": d}`` (1-based cycles, or image
    tuples when ``"images": true``), or ``{"cayley": table}``.
    """
    cfg = config or load_config()
    if isinstance(source, str):
        return preset(source, cfg)
    if "preset" in source:
        return preset(source["preset"], cfg)
    if "perm" in source:
        degree = int(source["degree"])
        if source.get("images"):
            gens = [tuple(g) for g in source["perm"]]
        else:
            gens = [cycles_to_perm(g, degree) for g in source["perm"]]
        return from_permutations(gens, degree, cfg)
    if "cayley" in source:
        table = source["cayley"]
        if len(table) > cfg.max_group_order:
            raise SizeError(f"|G| = {len(table)} exceeds cap {cfg.max_group_order}")
        return FiniteGroup.from_table(table, labels=source.get("labels"), provenance="cayley")
    raise GroupConstructionError(f"unrecognised group source {source!r}")
