"""Element correspondence computation under configurable pipelines.

Three pipelines are offered. Top-down only pairs children of already paired
parents: fast, but blind to moved elements. Full-scope scores every
same-metatype cross pair, so moves are found at quadratic cost. Two-phase
runs top-down first and full-scope scoring only over the leftovers, which is
the usual speed/quality trade-off.

Scores combine configurable name similarity with a structural context score;
the greedy selection is deterministic (score, then parent-name affinity,
then document order). An optional exact-name pre-pass pairs elements whose
(metatype, name) is globally unique in both models before any scoring, which
flips exchange-location scenarios from rename to move readings.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field

from mmdiff.errors import MetatypeMismatch
from mmdiff.model import Edge, Element, Metatype, Model
from mmdiff.similarity import (
    SynonymDictionary,
    bigram_sim,
    exact_sim,
    lcs_sim,
    semantic_sim,
)

PIPELINES = ("topdown", "fullscope", "twophase")
NAME_SIMS = ("exact", "lcs", "bigram", "semantic")
EDGE_POLICIES = ("strict", "target-flexible")


@dataclass(frozen=True)
class MatcherConfig:
    """Complete configuration of one matching run."""

    pipeline: str = "twophase"
    name_sim: str = "bigram"
    threshold: float = 0.6
    name_weight: float = 0.7
    struct_weight: float = 0.3
    exact_name_first: bool = False
    edge_policy: str = "strict"
    synonyms: SynonymDictionary | None = None

    def __post_init__(self):
        if self.pipeline not in PIPELINES:
            raise ValueError(f"unknown pipeline {self.pipeline!r}")
        if self.name_sim not in NAME_SIMS:
            raise ValueError(f"unknown name similarity {self.name_sim!r}")
        if self.edge_policy not in EDGE_POLICIES:
            raise ValueError(f"unknown edge policy {self.edge_policy!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        if abs(self.name_weight + self.struct_weight - 1.0) > 1e-9:
            raise ValueError("name_weight and struct_weight must sum to 1")


@dataclass
class Matching:
    """Injective correspondences between two models' elements and edges."""

    element_pairs: list[tuple[Element, Element]] = field(default_factory=list)
    edge_pairs: list[tuple[tuple[Element, Edge], tuple[Element, Edge]]] = field(default_factory=list)

    def __post_init__(self):
        self._new_by_old: dict[int, Element] = {}
        self._old_by_new: dict[int, Element] = {}
        for old_el, new_el in self.element_pairs:
            if old_el.metatype is not new_el.metatype:
                raise ValueError(
                    f"paired elements must share a metatype: "
                    f"{old_el.metatype.tag} vs {new_el.metatype.tag}"
                )
            if id(old_el) in self._new_by_old or id(new_el) in self._old_by_new:
                raise ValueError("element pairs must be injective both ways")
            self._new_by_old[id(old_el)] = new_el
            self._old_by_new[id(new_el)] = old_el

    def new_of(self, old_el: Element) -> Element | None:
        return self._new_by_old.get(id(old_el))

    def old_of(self, new_el: Element) -> Element | None:
        return self._old_by_new.get(id(new_el))

    def has_old(self, old_el: Element) -> bool:
        return id(old_el) in self._new_by_old

    def has_new(self, new_el: Element) -> bool:
        return id(new_el) in self._old_by_new

    def __len__(self) -> int:
        return len(self.element_pairs)


def _name_similarity(cfg: MatcherConfig, synonyms: SynonymDictionary | None, a: str, b: str) -> float:
    if cfg.name_sim == "exact":
        return exact_sim(a, b)
    if cfg.name_sim == "lcs":
        return lcs_sim(a, b)
    if cfg.name_sim == "bigram":
        return bigram_sim(a, b)
    return semantic_sim(a, b, synonyms if synonyms is not None else SynonymDictionary())


def _dice(a: Counter, b: Counter) -> float:
    total = sum(a.values()) + sum(b.values())
    if total == 0:
        return 1.0
    common = sum((a & b).values())
    return 2.0 * common / total


def _context_entries(el: Element) -> Counter:
    entries = Counter()
    for child in el.children:
        entries[("child", child.metatype.tag, child.name or "")] += 1
    for key, value in el.attributes.items():
        entries[("attr", key, value)] += 1
    return entries


def _sibling_profile(parent: Element, el: Element) -> Counter:
    profile = Counter()
    for sib in parent.children:
        if sib is not el:
            profile[(sib.metatype.tag, sib.name or "")] += 1
    return profile


def _parent_name_sim(
    cfg: MatcherConfig,
    synonyms: SynonymDictionary | None,
    old: Model,
    new: Model,
    a: Element,
    b: Element,
) -> float:
    pa = old.parent_of(a)
    pb = new.parent_of(b)
    if pa is None or pb is None:
        return 1.0 if (pa is None) == (pb is None) else 0.0
    return _name_similarity(cfg, synonyms, pa.name or "", pb.name or "")


def score_pair(
    old: Model,
    new: Model,
    a: Element,
    b: Element,
    cfg: MatcherConfig,
    synonyms: SynonymDictionary | None = None,
) -> float:
    """Similarity of one old/new element pair under a configuration.

    Named elements score name_weight * nameSim + struct_weight * contextSim,
    where contextSim is a Dice coefficient over child signatures plus
    attribute entries. Unnamed elements (events, flows) have no usable name,
    so their score is purely contextual: parent-name similarity averaged
    with a Dice over the sibling profile.
    """
    if a.metatype is not b.metatype:
        raise MetatypeMismatch(f"{a.metatype.tag} vs {b.metatype.tag}")
    synonyms = synonyms if synonyms is not None else cfg.synonyms
    if a.metatype.named:
        name_score = _name_similarity(cfg, synonyms, a.name or "", b.name or "")
        context = _dice(_context_entries(a), _context_entries(b))
        return cfg.name_weight * name_score + cfg.struct_weight * context
    parent_sim = _parent_name_sim(cfg, synonyms, old, new, a, b)
    pa, pb = old.parent_of(a), new.parent_of(b)
    profile = _dice(_sibling_profile(pa, a), _sibling_profile(pb, b)) if pa and pb else 1.0
    return 0.5 * parent_sim + 0.5 * profile


def _exact_name_prepass(old: Model, new: Model) -> list[tuple[Element, Element]]:
    """Pairs with a globally unique equal (metatype, name) key, roots excluded."""

    def unique(model: Model) -> dict[tuple, Element]:
        counts: Counter = Counter()
        first: dict[tuple, Element] = {}
        for el in model.elements:
            if el is model.root:
                continue
            key = (el.metatype, el.name or "")
            counts[key] += 1
            first.setdefault(key, el)
        return {k: e for k, e in first.items() if counts[k] == 1}

    uo = unique(old)
    un = unique(new)
    pairs = [(uo[k], un[k]) for k in uo if k in un]
    pairs.sort(key=lambda p: old.position_of(p[0]))
    return pairs


class _Selector:
    """Greedy, deterministic assignment of scored candidate pairs."""

    def __init__(self, old: Model, new: Model, cfg: MatcherConfig):
        self.old = old
        self.new = new
        self.cfg = cfg

    def score(self, a: Element, b: Element) -> float:
        return score_pair(self.old, self.new, a, b, self.cfg)

    def rank_key(self, score: float, a: Element, b: Element):
        affinity = _parent_name_sim(self.cfg, self.cfg.synonyms, self.old, self.new, a, b)
        return (-score, -affinity, self.old.position_of(a), self.new.position_of(b))

    def select(self, candidates: list[tuple[Element, Element]], taken_old, taken_new):
        scored = []
        for a, b in candidates:
            s = self.score(a, b)
            if s >= self.cfg.threshold:
                scored.append((self.rank_key(s, a, b), a, b))
        scored.sort(key=lambda t: t[0])
        chosen = []
        for _, a, b in scored:
            if id(a) in taken_old or id(b) in taken_new:
                continue
            taken_old.add(id(a))
            taken_new.add(id(b))
            chosen.append((a, b))
        return chosen


def _seed_pairs(old: Model, new: Model, cfg: MatcherConfig) -> list[tuple[Element, Element]]:
    if old.root.metatype is not new.root.metatype:
        raise MetatypeMismatch(
            f"cannot compare a {old.root.metatype.tag} document with a "
            f"{new.root.metatype.tag} document"
        )
    seeds = [(old.root, new.root)]
    if cfg.exact_name_first:
        seeds.extend(_exact_name_prepass(old, new))
    return seeds


def match_top_down(old: Model, new: Model, cfg: MatcherConfig) -> Matching:
    """Breadth-first matching where only children of paired parents compete."""
    seeds = _seed_pairs(old, new, cfg)
    selector = _Selector(old, new, cfg)
    taken_old = {id(a) for a, _ in seeds}
    taken_new = {id(b) for _, b in seeds}
    pairs = list(seeds)
    queue = deque(seeds)
    while queue:
        pa, pb = queue.popleft()
        candidates = [
            (a, b)
            for a in pa.children
            if id(a) not in taken_old
            for b in pb.children
            if id(b) not in taken_new and a.metatype is b.metatype
        ]
        chosen = selector.select(candidates, taken_old, taken_new)
        chosen.sort(key=lambda p: old.position_of(p[0]))
        pairs.extend(chosen)
        queue.extend(chosen)
    pairs.sort(key=lambda p: old.position_of(p[0]))
    return Matching(pairs)


def match_full_scope(old: Model, new: Model, cfg: MatcherConfig) -> Matching:
    """Global greedy matching over all same-metatype cross pairs."""
    seeds = _seed_pairs(old, new, cfg)
    selector = _Selector(old, new, cfg)
    taken_old = {id(a) for a, _ in seeds}
    taken_new = {id(b) for _, b in seeds}
    candidates = [
        (a, b)
        for a in old.elements
        if id(a) not in taken_old
        for b in new.elements
        if id(b) not in taken_new and b is not new.root and a.metatype is b.metatype
    ]
    pairs = list(seeds) + selector.select(candidates, taken_old, taken_new)
    pairs.sort(key=lambda p: old.position_of(p[0]))
    return Matching(pairs)


def match_two_phase(old: Model, new: Model, cfg: MatcherConfig) -> Matching:
    """Top-down pass, then full-scope scoring restricted to the leftovers."""
    phase1 = match_top_down(old, new, cfg)
    taken_old = {id(a) for a, _ in phase1.element_pairs}
    taken_new = {id(b) for _, b in phase1.element_pairs}
    selector = _Selector(old, new, cfg)
    candidates = [
        (a, b)
        for a in old.elements
        if id(a) not in taken_old
        for b in new.elements
        if id(b) not in taken_new and a.metatype is b.metatype
    ]
    chosen = selector.select(candidates, taken_old, taken_new)
    pairs = phase1.element_pairs + chosen
    pairs.sort(key=lambda p: old.position_of(p[0]))
    return Matching(pairs)


_PIPELINE_FUNCS = {
    "topdown": match_top_down,
    "fullscope": match_full_scope,
    "twophase": match_two_phase,
}


def match_edges(old: Model, new: Model, matching: Matching, cfg: MatcherConfig) -> Matching:
    """Decide edge correspondences and dissolve pairs per the edge policy.

    Under `strict`, a reference or flow pair survives only when every
    endpoint's correspondent is the other model's endpoint. Under
    `target-flexible` the target may differ (reported later as a retarget),
    but a changed source always dissolves the pair into delete+insert. For
    references, the source is the owning class: a reference whose owner
    correspondence differs counts as source-changed.
    """
    dissolved: set[int] = set()
    edge_pairs: list[tuple[tuple[Element, Edge], tuple[Element, Edge]]] = []

    for old_el, new_el in matching.element_pairs:
        roles = old_el.metatype.edge_roles
        if not roles:
            continue

        def corresponds(role: str) -> bool:
            t_old = old.by_id[old_el.edge(role).target_id]
            t_new = new.by_id[new_el.edge(role).target_id]
            return matching.new_of(t_old) is t_new

        if old_el.metatype is Metatype.EREFERENCE:
            source_ok = matching.new_of(old.parent_of(old_el)) is new.parent_of(new_el)
        else:
            source_ok = corresponds("source")
        if not source_ok:
            dissolved.add(id(old_el))
            continue
        if not corresponds("target") and cfg.edge_policy == "strict":
            dissolved.add(id(old_el))
            continue
        for role in roles:
            edge_pairs.append(((old_el, old_el.edge(role)), (new_el, new_el.edge(role))))

    kept = [(a, b) for a, b in matching.element_pairs if id(a) not in dissolved]
    return Matching(kept, edge_pairs)


def match_models(old: Model, new: Model, cfg: MatcherConfig) -> Matching:
    """Run the configured pipeline followed by edge correspondence."""
    matching = _PIPELINE_FUNCS[cfg.pipeline](old, new, cfg)
    return match_edges(old, new, matching, cfg)
