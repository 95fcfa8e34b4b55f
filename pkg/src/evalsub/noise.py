"""Controlled degradation of reference segmentations and texts.

Every run draws all of its randomness up front from a PCG64 stream keyed by
``(seed, operation kind)``: a permutation of the candidate boundaries (or token
positions) plus one auxiliary draw per candidate.  A run at p% applies the
first ceil(p * count / 100) operations of that fixed order, so the edits made
at a lower percentage are always a subset of those made at a higher one.
"""

from __future__ import annotations

import bisect
import enum
import logging
import re
from dataclasses import dataclass, field

import numpy as np

from .core import BoundaryTag, Corpus, SegmentedText

logger = logging.getLogger(__name__)


class NoiseKind(str, enum.Enum):
    SHIFT = "shift"
    ADD = "add"
    DELETE = "delete"
    REPLACE = "replace"
    MIXED = "mixed"
    TEXT = "text"


SEGMENTATION_KINDS = frozenset({NoiseKind.SHIFT, NoiseKind.ADD, NoiseKind.DELETE,
                                NoiseKind.REPLACE, NoiseKind.MIXED})

# fixed sub-stream ids; never renumber
_STREAM = {NoiseKind.SHIFT: 1, NoiseKind.ADD: 2, NoiseKind.DELETE: 3,
           NoiseKind.REPLACE: 4, NoiseKind.MIXED: 5, NoiseKind.TEXT: 6}

_LABEL = re.compile(r"^(shift)\.([123])\.(\d+)$|^(add|delete|replace|mixed|text)\.(\d+)$")


@dataclass(frozen=True)
class NoiseSpec:
    kind: NoiseKind
    percentage: int
    seed: int = 0
    k: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if not 0 <= self.percentage <= 100:
            raise ValueError(f"percentage {self.percentage} outside 0..100")
        if self.kind is NoiseKind.SHIFT:
            if self.k not in (1, 2, 3):
                raise ValueError("shift needs k in {1, 2, 3}")
        elif self.k is not None:
            raise ValueError(f"{self.kind.value} takes no shift size")

    @property
    def label(self) -> str:
        if self.kind is NoiseKind.SHIFT:
            return f"shift.{self.k}.{self.percentage}"
        return f"{self.kind.value}.{self.percentage}"

    @property
    def filename(self) -> str:
        return f"{self.label}.seed{self.seed}.txt"

    @classmethod
    def parse(cls, label: str, seed: int = 0) -> "NoiseSpec":
        m = _LABEL.match(label)
        if not m:
            raise ValueError(f"bad noise label {label!r}; expected e.g. shift.1.20 or delete.80")
        if m.group(1):
            return cls(NoiseKind.SHIFT, int(m.group(3)), seed, int(m.group(2)))
        return cls(NoiseKind(m.group(4)), int(m.group(5)), seed)


@dataclass(frozen=True)
class NoiseResult:
    corpus: Corpus
    spec: NoiseSpec
    requested: int
    applied: int
    skipped: int
    skip_reasons: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"label": self.spec.label, "seed": self.spec.seed, "requested": self.requested,
                "applied": self.applied, "skipped": self.skipped,
                "skip_reasons": dict(sorted(self.skip_reasons.items()))}


def _rng(spec: NoiseSpec) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([spec.seed, _STREAM[spec.kind]])))


def op_count(percentage: int, total: int) -> int:
    return -(-percentage * total // 100)


class _Tally:
    def __init__(self):
        self.applied = 0
        self.reasons: dict[str, int] = {}

    def skip(self, reason: str) -> None:
        self.reasons[reason] = self.reasons.get(reason, 0) + 1

    @property
    def skipped(self) -> int:
        return sum(self.reasons.values())


# -- segmentation noise -------------------------------------------------------

def _shift(state, lengths, sent, gap, k, direction, tally):
    bounds = state[sent]
    for d in (direction, -direction):
        dest = gap + d * k
        if 1 <= dest <= lengths[sent] and dest not in bounds:
            bounds[dest] = bounds.pop(gap)
            tally.applied += 1
            return
    tally.skip("shift_blocked")


def _add(state, sent, gap, tag, tally):
    if gap in state[sent]:
        tally.skip("add_occupied")
        return
    state[sent][gap] = tag
    tally.applied += 1


def noise_segmentation(corpus: Corpus, spec: NoiseSpec, add_kind: str = "ratio") -> NoiseResult:
    """Apply a boundary operation to p% of the corpus boundaries.

    ``add_kind="ratio"`` draws added tag kinds with the corpus eol:eob ratio,
    ``"uniform"`` with equal odds.  ``mixed`` cycles shift (size 1-3), add,
    delete and replace in equal shares.
    """
    if spec.kind not in SEGMENTATION_KINDS:
        raise ValueError(f"{spec.kind.value} is not a segmentation noise")
    if add_kind not in ("ratio", "uniform"):
        raise ValueError(f"unknown add_kind {add_kind!r}")
    rng = _rng(spec)
    state = [dict(s.boundaries) for s in corpus]
    lengths = [len(s) for s in corpus]
    bounds = [(i, g) for i, s in enumerate(corpus) for g in s.boundaries]
    sites = [(i, g) for i, s in enumerate(corpus) for g in range(1, len(s) + 1)
             if g not in s.boundaries]
    b = len(bounds)
    n_eol = sum(1 for s in corpus for t in s.boundaries.values() if t is BoundaryTag.EOL)
    p_eol = 0.5 if add_kind == "uniform" or not b else n_eol / b

    # all draws happen here, in a fixed order, whatever the percentage
    b_order = rng.permutation(b)
    directions = np.where(rng.random(b) < 0.5, -1, 1)
    shift_sizes = rng.integers(1, 4, size=b)
    s_order = rng.permutation(len(sites))
    eol_draw = rng.random(len(sites)) < p_eol

    n = op_count(spec.percentage, b)
    tally = _Tally()
    if spec.kind is NoiseKind.MIXED:
        cycle = (NoiseKind.SHIFT, NoiseKind.ADD, NoiseKind.DELETE, NoiseKind.REPLACE)
        ops = [cycle[i % 4] for i in range(n)]
    else:
        ops = [spec.kind] * n
    next_b = next_s = 0
    for op in ops:
        if op is NoiseKind.ADD:
            if next_s >= len(sites):
                tally.skip("add_no_site")
                continue
            sent, gap = sites[s_order[next_s]]
            tag = BoundaryTag.EOL if eol_draw[next_s] else BoundaryTag.EOB
            next_s += 1
            _add(state, sent, gap, tag, tally)
            continue
        if next_b >= b:
            tally.skip("no_boundary_left")
            continue
        idx = b_order[next_b]
        next_b += 1
        sent, gap = bounds[idx]
        if op is NoiseKind.SHIFT:
            k = spec.k if spec.kind is NoiseKind.SHIFT else int(shift_sizes[idx])
            _shift(state, lengths, sent, gap, k, int(directions[idx]), tally)
        elif op is NoiseKind.DELETE:
            del state[sent][gap]
            tally.applied += 1
        else:
            state[sent][gap] = state[sent][gap].other
            tally.applied += 1
    out = corpus.replace((s.with_boundaries(st) for s, st in zip(corpus, state)),
                         f"{corpus.identifier}+{spec.label}")
    return NoiseResult(out, spec, n, tally.applied, tally.skipped, tally.reasons)


# -- text noise ---------------------------------------------------------------

class _Node:
    __slots__ = ("word", "tag")

    def __init__(self, word, tag=None):
        self.word = word
        self.tag = tag


def vocabulary(corpus: Corpus) -> list[str]:
    return sorted({w for s in corpus for w in s.tokens})


def noise_text(corpus: Corpus, spec: NoiseSpec, vocab: list[str] | None = None) -> NoiseResult:
    """Insert, delete and substitute words at p% of the token positions.

    Tags stay attached to the word they follow.  A deletion that would empty a
    sentence, or strand a tag with nowhere free to go, is skipped and counted,
    so tag counts and kinds never change.
    """
    if spec.kind is not NoiseKind.TEXT:
        raise ValueError(f"{spec.kind.value} is not a text noise")
    vocab = vocabulary(corpus) if vocab is None else sorted(set(vocab))
    if len(vocab) < 2:
        raise ValueError("vocabulary needs at least two words")
    rng = _rng(spec)
    positions = [(i, j) for i, s in enumerate(corpus) for j in range(len(s))]
    t = len(positions)
    order = rng.permutation(t)
    word_draw = rng.random(t)

    n = op_count(spec.percentage, t)
    cycle = ("ins", "del", "sub")
    plan: dict[int, dict[int, tuple[str, float]]] = {}
    for i in range(n):
        sent, pos = positions[order[i]]
        plan.setdefault(sent, {})[pos] = (cycle[i % 3], float(word_draw[i]))

    tally = _Tally()
    out = []
    for si, s in enumerate(corpus):
        ops = plan.get(si)
        if not ops:
            out.append(s)
            continue
        nodes = [_Node(w, s.boundaries.get(j + 1)) for j, w in enumerate(s.tokens)]
        result: list[_Node] = []
        for j, node in enumerate(nodes):
            op = ops.get(j)
            if op is None:
                result.append(node)
                continue
            kind, u = op
            if kind == "ins":
                result.append(_Node(vocab[int(u * len(vocab))]))
                result.append(node)
                tally.applied += 1
            elif kind == "sub":
                node.word = _substitute(vocab, node.word, u)
                result.append(node)
                tally.applied += 1
            else:
                later = len(nodes) - j - 1
                if not result and later == 0:
                    tally.skip("delete_last_token")
                    result.append(node)
                elif node.tag is not None and (not result or result[-1].tag is not None):
                    tally.skip("delete_strands_tag")
                    result.append(node)
                else:
                    if node.tag is not None:
                        result[-1].tag = node.tag
                    tally.applied += 1
        if not result:
            raise AssertionError("text noise emptied a sentence")
        out.append(SegmentedText(tuple(x.word for x in result),
                                 {k + 1: x.tag for k, x in enumerate(result) if x.tag is not None}))
    noised = corpus.replace(out, f"{corpus.identifier}+{spec.label}")
    return NoiseResult(noised, spec, n, tally.applied, tally.skipped, tally.reasons)


def _substitute(vocab: list[str], word: str, u: float) -> str:
    """Uniform draw from the sorted vocabulary minus ``word``."""
    r = bisect.bisect_left(vocab, word)
    if r < len(vocab) and vocab[r] == word:
        idx = int(u * (len(vocab) - 1))
        return vocab[idx + 1] if idx >= r else vocab[idx]
    return vocab[int(u * len(vocab))]


def apply_noise(corpus: Corpus, spec: NoiseSpec, **kwargs) -> NoiseResult:
    if spec.kind is NoiseKind.TEXT:
        return noise_text(corpus, spec, **kwargs)
    return noise_segmentation(corpus, spec, **kwargs)
