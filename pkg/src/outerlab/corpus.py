"""The built-in instance sweep and the per-instance verification driver."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from .config import Config, load_config
from .engine import chi2bar_kernel_check, out_orders, tau_check, theoremC_split_check
from .errors import ConsistencyError
from .groups import (
    FiniteGroup,
    Subgroup,
    automorphism_group,
    center,
    compose_autos,
    conjugation,
    identity_auto,
    preset,
    subgroup_classes,
)
from .hnn import HnnData, validate_hnn
from .oracle import CrossCheckLedger, cross_check, outer_classes

SMALL_PRESETS = (
    [f"cyclic {n}" for n in range(2, 17)]
    # dihedral 3 is the symmetric group on 3 letters, listed separately
    + [f"dihedral {n}" for n in (2, 4, 5, 6, 7, 8)]
    + [
        "symmetric 3",
        "alternating 4",
        "quaternion8",
        "cyclic 2 x cyclic 4",
        "cyclic 2 x cyclic 2 x cyclic 2",
        "cyclic 3 x cyclic 3",
        "cyclic 2 x cyclic 6",
        "cyclic 4 x cyclic 4",
        "cyclic 2 x cyclic 8",
        "cyclic 2 x dihedral 4",
        "cyclic 2 x quaternion8",
    ]
)

# order 24: identity and one inner automorphism only
LARGE_PRESETS = ["symmetric 4", "dihedral 12"]


@dataclass(frozen=True)
class CorpusInstance:
    group: str
    order: int
    K: tuple[int, ...]
    phi_label: str
    phi_image: tuple[int, ...]

    @property
    def name(self) -> str:
        ks = "{" + ",".join(map(str, self.K)) + "}"
        return f"{self.group} | K={ks} | phi={self.phi_label}"

    def build(self, config: Config | None = None) -> HnnData:
        from .groups import Automorphism

        H = preset(self.group, config)
        K = Subgroup(H, self.K, check=False)
        return validate_hnn(H, K, Automorphism(H, self.phi_image, check=False))


def phi_sample(H: FiniteGroup, max_outer: int = 4, inner_only: bool = False) -> list[tuple[str, tuple[int, ...]]]:
    """Identity, conjugations by a transversal of Z(H), and outer representatives.

    Outer representatives are the first automorphisms, in enumeration order,
    from distinct cosets of Inn(H) other than Inn(H) itself.
    """
    out = [("id", identity_auto(H).image)]
    seen = {out[0][1]}
    Z = center(H)
    for b in sorted(set(Z.left_transversal())):
        img = conjugation(H, b).image
        if img not in seen:
            seen.add(img)
            out.append((f"conj h{b}", img))
    if inner_only:
        return out
    inner = [conjugation(H, g) for g in H.elements]
    covered = {g.image for g in inner}
    picked = 0
    for idx, a in enumerate(automorphism_group(H)):
        if picked >= max_outer:
            break
        if a.image in covered:
            continue
        out.append((f"aut{idx}", a.image))
        covered |= {compose_autos(a, g).image for g in inner}
        picked += 1
    return out


def corpus_instances(max_order: int | None = None, config: Config | None = None) -> Iterator[CorpusInstance]:
    cfg = config or load_config()
    for name in SMALL_PRESETS:
        H = preset(name, cfg)
        if max_order is not None and H.order > max_order:
            continue
        phis = phi_sample(H)
        for K in subgroup_classes(H):
            if K.order == H.order:
                continue
            for label, img in phis:
                yield CorpusInstance(name, H.order, K.elements, label, img)
    for name in LARGE_PRESETS:
        H = preset(name, cfg)
        if max_order is not None and H.order > max_order:
            continue
        if H.order > cfg.max_analysis_order:
            continue
        phis = phi_sample(H, inner_only=True)[:2]
        for K in subgroup_classes(H):
            if K.order == H.order:
                continue
            for label, img in phis:
                yield CorpusInstance(name, H.order, K.elements, label, img)


def verify_instance(hnn: HnnData, config: Config | None = None, corrupt: Callable | None = None):
    """Engine report plus the oracle ledger, extended with kernel and split checks.

    ``corrupt`` (test hook) may rewrite the report before it is checked.
    """
    cfg = config or load_config()
    report = out_orders(hnn, cfg)
    if corrupt is not None:
        report = corrupt(report)
    oracle = outer_classes(hnn, cfg)
    ledger = cross_check(hnn, report, oracle)
    _guarded(ledger, "chi_2-bar kernel = JK", lambda: chi2bar_kernel_check(hnn, oracle))
    _guarded(ledger, "split when Z(H) <= Fix(phi)", lambda: theoremC_split_check(hnn, oracle))
    if hnn.H.order <= 16:
        _guarded(ledger, "tau homomorphism with kernel K", lambda: tau_check(hnn))
    thm = report.thmA
    ledger.add("H-preserving = all outer classes", thm.fa and thm.condition1 and thm.equality)
    return report, oracle, ledger


def _guarded(ledger: CrossCheckLedger, node: str, fn) -> None:
    try:
        v = fn()
    except ConsistencyError as exc:
        ledger.add(node, False, detail=str(exc))
        return
    if v.applicable:
        ledger.add(node, v.passed, detail=", ".join(f"{k}={val}" for k, val in v.details.items()))
    else:
        ledger.add(node, True, detail="not applicable: " + str(v.details.get("reason", "")))


@dataclass
class CorpusSummary:
    instances: int = 0
    passed: int = 0
    index2: int = 0
    thmC: int = 0
    max_outH: int = 0
    failures: list = None

    def lines(self) -> list[str]:
        out = [
            f"instances        {self.instances}",
            f"verified         {self.passed}",
            f"index-2 (beta)   {self.index2}",
            f"split applicable {self.thmC}",
            f"max |Out_H(G)|   {self.max_outH}",
        ]
        for name, why in self.failures or []:
            out.append(f"FAILED  {name}: {why}")
        return out


def run_corpus(max_order: int | None = None, config: Config | None = None, progress=None) -> CorpusSummary:
    cfg = config or load_config()
    s = CorpusSummary(failures=[])
    for inst in corpus_instances(max_order, cfg):
        s.instances += 1
        try:
            report, _, ledger = verify_instance(inst.build(cfg), cfg)
        except Exception as exc:  # reported per instance, the sweep continues
            s.failures.append((inst.name, f"{type(exc).__name__}: {exc}"))
            continue
        if ledger.passed:
            s.passed += 1
        else:
            s.failures.append((inst.name, "; ".join(f.node for f in ledger.failures())))
        s.index2 += report.index2
        s.thmC += report.thmC_applicable
        s.max_outH = max(s.max_outH, report.outH_order)
        if progress:
            progress(inst, ledger)
    return s
