"""Instance files: a base group, an associated subgroup and an automorphism.

Text form, one directive per line, ``#`` starts a comment::

    group preset symmetric 3          # or: group perm 3 (1 2) (1 2 3)
                                      # or: group cayley 0 1; 1 0
    subgroup gens h4                  # or: subgroup elements 0 4 5 / trivial
    phi id                            # or: phi conj h1 / phi images ... / phi gens h1:h2 ...

Files ending in ``.json`` hold the same three keys; ``group`` takes any
source understood by :func:`~outerlab.groups.build_group`.
"""

from __future__ import annotations

import json
import re
from collections import deque
from pathlib import Path

from .config import Config, load_config
from .errors import GroupConstructionError, InstanceParseError
from .groups import (
    Automorphism,
    FiniteGroup,
    Subgroup,
    _check_automorphism,
    build_group,
    conjugation,
    identity_auto,
    subgroup_generated,
    trivial,
)
from .hnn import HnnData, validate_hnn

_CYCLE = re.compile(r"\(([^()]*)\)")


def _element(tok, n: int) -> int:
    s = str(tok).strip()
    if s.startswith("h"):
        s = s[1:]
    try:
        x = int(s)
    except ValueError:
        raise InstanceParseError(f"bad element {tok!r}") from None
    if not 0 <= x < n:
        raise InstanceParseError(f"element {x} outside group of order {n}")
    return x


def _parse_group_line(rest: str, cfg: Config) -> FiniteGroup:
    kind, _, args = rest.partition(" ")
    args = args.strip()
    if kind == "preset":
        return build_group(args, cfg)
    if kind == "perm":
        deg, _, cyc = args.partition(" ")
        try:
            degree = int(deg)
        except ValueError:
            raise InstanceParseError(f"perm group needs a degree, got {deg!r}") from None
        gens = []
        # each generator is a run of adjacent cycles: "(1 2)(3 4) (1 2 3)"
        for chunk in re.split(r"\)\s+\(", cyc.strip()):
            chunk = "(" + chunk.strip().lstrip("(").rstrip(")") + ")"
            cycles = [[int(v) for v in c.replace(",", " ").split()] for c in _CYCLE.findall(chunk)]
            gens.append([c for c in cycles if c])
        if not gens:
            raise InstanceParseError("perm group needs at least one generator")
        return build_group({"perm": gens, "degree": degree}, cfg)
    if kind == "cayley":
        rows = [r.split() for r in args.split(";") if r.strip()]
        try:
            table = [[int(v) for v in r] for r in rows]
        except ValueError:
            raise InstanceParseError("cayley rows must be integers") from None
        return build_group({"cayley": table}, cfg)
    raise InstanceParseError(f"unknown group kind {kind!r}")


def _subgroup(H: FiniteGroup, spec) -> Subgroup:
    if spec == "trivial":
        return trivial(H)
    kind, vals = spec
    xs = [_element(v, H.order) for v in vals]
    if kind == "gens":
        return subgroup_generated(H, xs)
    if kind == "elements":
        try:
            return Subgroup(H, tuple(sorted(set(xs) | {0})), check=True)
        except GroupConstructionError as exc:
            raise InstanceParseError(f"subgroup elements: {exc}") from None
    raise InstanceParseError(f"unknown subgroup kind {kind!r}")


def extend_generator_images(H: FiniteGroup, pairs: dict[int, int]) -> Automorphism:
    """Extend ``x -> pairs[x]`` to a homomorphism and check it is an automorphism."""
    tbl = H.table
    img = {0: 0}
    todo = deque([0])
    while todo:
        g = todo.popleft()
        for x, y in pairs.items():
            gx, v = tbl[g][x], tbl[img[g]][y]
            if gx in img:
                if img[gx] != v:
                    raise InstanceParseError("generator images do not define a homomorphism")
            else:
                img[gx] = v
                todo.append(gx)
    if len(img) != H.order:
        raise InstanceParseError("phi generators do not generate H")
    image = tuple(img[x] for x in H.elements)
    try:
        _check_automorphism(H, image)
    except GroupConstructionError as exc:
        raise InstanceParseError(f"phi: {exc}") from None
    return Automorphism(H, image, check=False)


def _phi(H: FiniteGroup, spec) -> Automorphism:
    if spec == "id":
        return identity_auto(H)
    kind, vals = spec
    if kind == "conj":
        return conjugation(H, _element(vals[0] if isinstance(vals, list) else vals, H.order))
    if kind == "images":
        image = tuple(_element(v, H.order) for v in vals)
        if len(image) != H.order:
            raise InstanceParseError(f"phi images needs {H.order} entries, got {len(image)}")
        try:
            _check_automorphism(H, image)
        except GroupConstructionError as exc:
            raise InstanceParseError(f"phi: {exc}") from None
        return Automorphism(H, image, check=False)
    if kind == "gens":
        return extend_generator_images(H, {_element(x, H.order): _element(y, H.order) for x, y in vals})
    raise InstanceParseError(f"unknown phi kind {kind!r}")


def parse_text(text: str, config: Config | None = None) -> HnnData:
    cfg = config or load_config()
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        if key not in ("group", "subgroup", "phi"):
            raise InstanceParseError(f"line {lineno}: unknown directive {key!r}")
        if key in lines:
            raise InstanceParseError(f"line {lineno}: duplicate {key!r}")
        lines[key] = rest.strip()
    missing = [k for k in ("group", "subgroup", "phi") if k not in lines]
    if missing:
        raise InstanceParseError(f"missing section(s): {', '.join(missing)}")
    H = _parse_group_line(lines["group"], cfg)

    sub = lines["subgroup"].split()
    if sub == ["trivial"]:
        K = _subgroup(H, "trivial")
    elif sub and sub[0] in ("gens", "elements"):
        K = _subgroup(H, (sub[0], sub[1:]))
    else:
        raise InstanceParseError(f"bad subgroup line {lines['subgroup']!r}")

    ph = lines["phi"].split()
    if ph == ["id"]:
        phi = _phi(H, "id")
    elif ph and ph[0] in ("conj", "images"):
        phi = _phi(H, (ph[0], ph[1:]))
    elif ph and ph[0] == "gens":
        try:
            pairs = [tuple(p.split(":")) for p in ph[1:]]
            if any(len(p) != 2 for p in pairs):
                raise ValueError
        except ValueError:
            raise InstanceParseError("phi gens expects x:y pairs") from None
        phi = _phi(H, ("gens", pairs))
    else:
        raise InstanceParseError(f"bad phi line {lines['phi']!r}")
    return validate_hnn(H, K, phi)


def parse_json(doc: dict, config: Config | None = None) -> HnnData:
    cfg = config or load_config()
    try:
        H = build_group(doc["group"], cfg)
        sub, ph = doc["subgroup"], doc["phi"]
    except KeyError as exc:
        raise InstanceParseError(f"missing key {exc}") from None
    if sub == "trivial" or sub == {"trivial": True}:
        K = _subgroup(H, "trivial")
    elif isinstance(sub, dict) and len(sub) == 1:
        (kind, vals), = sub.items()
        K = _subgroup(H, (kind, list(vals)))
    else:
        raise InstanceParseError(f"bad subgroup entry {sub!r}")
    if ph == "id":
        phi = _phi(H, "id")
    elif isinstance(ph, dict) and len(ph) == 1:
        (kind, vals), = ph.items()
        if kind == "gens":
            vals = list(vals.items()) if isinstance(vals, dict) else [tuple(v) for v in vals]
        phi = _phi(H, (kind, vals))
    else:
        raise InstanceParseError(f"bad phi entry {ph!r}")
    return validate_hnn(H, K, phi)


def load_instance(path, config: Config | None = None) -> HnnData:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InstanceParseError(f"cannot read {p}: {exc.strerror}") from None
    if p.suffix == ".json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceParseError(f"{p}: {exc}") from None
        return parse_json(doc, config)
    return parse_text(text, config)
