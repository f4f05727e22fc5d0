"""Name-similarity functions the matcher can be configured with.

All functions return a score in [0, 1], are symmetric, and score identical
non-empty inputs as 1. Character-level functions (LCS ratio, bigram Dice)
deliberately know nothing about word meaning; the semantic function pairs
name tokens through an offline synonym dictionary instead.
"""

from __future__ import annotations

import re
from collections import Counter
from functools import lru_cache
from importlib import resources

from mmdiff.errors import EmptyGroup

_SPLIT_RE = re.compile(r"[^0-9A-Za-z]+")
_CAMEL_RE = re.compile(r"(?<=[a-z])(?=[A-Z])")


def exact_sim(a: str, b: str) -> float:
    """1.0 if the trimmed strings are equal (case-sensitive), else 0.0."""
    return 1.0 if a.strip() == b.strip() else 0.0


def lcs_sim(a: str, b: str) -> float:
    """Longest-common-subsequence ratio 2*|LCS| / (|a|+|b|), case-folded."""
    a, b = a.lower(), b.lower()
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    # bottom-up DP over prefix lengths
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return 2.0 * prev[len(b)] / (len(a) + len(b))


def _bigrams(s: str) -> Counter:
    return Counter(s[i:i + 2] for i in range(len(s) - 1))


def bigram_sim(a: str, b: str) -> float:
    """Dice coefficient over multisets of adjacent character pairs.

    Inputs are case-folded first. Bigrams are taken over the raw string
    including spaces. Inputs shorter than two characters have no bigrams,
    so the exact comparison decides.
    """
    if min(len(a), len(b)) < 2:
        return exact_sim(a, b)
    ga = _bigrams(a.lower())
    gb = _bigrams(b.lower())
    common = sum((ga & gb).values())
    return 2.0 * common / (sum(ga.values()) + sum(gb.values()))


def tokenize(name: str) -> list[str]:
    """Split a name on whitespace, punctuation, underscores and camelCase.

    Tokens come back lowercased; empty tokens are dropped.
    """
    tokens: list[str] = []
    for part in _SPLIT_RE.split(name):
        for token in _CAMEL_RE.split(part):
            if token:
                tokens.append(token.lower())
    return tokens


class SynonymDictionary:
    """Closed groups of pairwise-synonymous lowercase tokens.

    Overlapping input groups are merged so that a token belongs to at most
    one group.
    """

    def __init__(self, groups=()):
        merged: list[set[str]] = []
        for group in groups:
            g = {t.lower() for t in group}
            for existing in [m for m in merged if m & g]:
                merged.remove(existing)
                g |= existing
            merged.append(g)
        self.groups: tuple[frozenset[str], ...] = tuple(frozenset(g) for g in merged)
        self._group_of: dict[str, int] = {}
        for i, g in enumerate(self.groups):
            for token in g:
                self._group_of[token] = i

    def synonyms(self, a: str, b: str) -> bool:
        """True when both tokens sit in the same synonym group."""
        ga = self._group_of.get(a.lower())
        return ga is not None and ga == self._group_of.get(b.lower())

    def __len__(self) -> int:
        return len(self.groups)


def semantic_sim(a: str, b: str, synonyms: SynonymDictionary) -> float:
    """Token-level Dice score with synonym-aware pairing.

    Tokens of `a` are greedily paired, in order, against the first still
    unpaired token of `b` that is equal or a dictionary synonym. The score
    is 2 * pairs / (tokens(a) + tokens(b)).
    """
    ta = tokenize(a)
    tb = tokenize(b)
    if not ta and not tb:
        return 1.0
    taken = [False] * len(tb)
    pairs = 0
    for t in ta:
        for j, u in enumerate(tb):
            if not taken[j] and (t == u or synonyms.synonyms(t, u)):
                taken[j] = True
                pairs += 1
                break
    return 2.0 * pairs / (len(ta) + len(tb))


def load_synonyms(text: str) -> SynonymDictionary:
    """Parse a synonym dictionary document.

    One group per line, comma-separated; `#` lines and blank lines are
    ignored. A line with fewer than two tokens raises EmptyGroup.
    """
    groups = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = [t.strip().lower() for t in line.split(",") if t.strip()]
        if len(tokens) < 2:
            raise EmptyGroup(f"line {lineno}: a synonym group needs at least two tokens: {raw!r}")
        groups.append(tokens)
    return SynonymDictionary(groups)


@lru_cache(maxsize=1)
def default_synonyms() -> SynonymDictionary:
    """The synonym dictionary shipped with the benchmark fixtures."""
    text = resources.files("mmdiff").joinpath("data/synonyms.txt").read_text(encoding="utf-8")
    return load_synonyms(text)
