"""Boundary projection from a hypothesis onto the reference text.

The reference tokens are cut into as many spans as the hypothesis has
subtitles (or lines) so that the summed Levenshtein distance between each span
and its hypothesis subtitle is minimal; the hypothesis tags are then written at
the cut points.  The reference keeps its words, so segmentation metrics can be
computed between the true reference and the projected one.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np

from .core import BoundaryTag, MassMode, SegmentedText, subtitles

logger = logging.getLogger(__name__)


@numba.njit(cache=True)
def _span_costs(seg, ref):
    """cost[a, b] = Levenshtein distance between ``seg`` and ``ref[a:b]`` (b >= a)."""
    m = ref.shape[0]
    s = seg.shape[0]
    cost = np.zeros((m + 1, m + 1), dtype=np.int64)
    row = np.empty(s + 1, dtype=np.int64)
    for a in range(m + 1):
        # column over seg prefix lengths, advanced one reference token at a time
        for i in range(s + 1):
            row[i] = i
        cost[a, a] = s
        for b in range(a, m):
            diag = row[0]
            row[0] = b - a + 1
            for i in range(1, s + 1):
                up = row[i]
                best = diag + (0 if seg[i - 1] == ref[b] else 1)
                if up + 1 < best:
                    best = up + 1
                if row[i - 1] + 1 < best:
                    best = row[i - 1] + 1
                row[i] = best
                diag = up
            cost[a, b + 1] = row[s]
    return cost


@numba.njit(cache=True)
def _segment(costs, m):
    """Backward table then lexicographically smallest optimal cut vector."""
    j = costs.shape[0]
    inf = 1 << 60
    # rest[i, c]: best cost of segments i.. over ref[c:]
    rest = np.full((j + 1, m + 1), inf, dtype=np.int64)
    rest[j, m] = 0
    for i in range(j - 1, -1, -1):
        for c in range(m + 1):
            best = inf
            for e in range(c, m + 1):
                if rest[i + 1, e] < inf:
                    v = costs[i, c, e] + rest[i + 1, e]
                    if v < best:
                        best = v
            rest[i, c] = best
    cuts = np.zeros(j + 1, dtype=np.int64)
    c = 0
    for i in range(j):
        for e in range(c, m + 1):
            if rest[i + 1, e] < inf and costs[i, c, e] + rest[i + 1, e] == rest[i, c]:
                cuts[i + 1] = e
                c = e
                break
    return cuts, rest[0, 0]


def _ids(ref: Sequence[str], segments: Sequence[Sequence[str]]):
    vocab: dict[str, int] = {}
    enc = lambda ws: np.asarray([vocab.setdefault(w, len(vocab)) for w in ws], dtype=np.int64)
    return enc(ref), [enc(s) for s in segments]


def mwer_segment(ref_tokens: Sequence[str], hyp_segments: Sequence[Sequence[str]]
                 ) -> tuple[tuple[int, ...], int]:
    """Cut points ``(0, c1, ..., len(ref))`` and the minimal summed edit cost.

    Ties go to the lexicographically smallest cut vector.  An empty reference
    yields all cuts at 0 with every hypothesis token counted as an edit.
    """
    if not hyp_segments:
        raise ValueError("no hypothesis segments")
    m = len(ref_tokens)
    ref, segs = _ids(ref_tokens, hyp_segments)
    costs = np.stack([_span_costs(s, ref) for s in segs])
    cuts, total = _segment(costs, m)
    return tuple(int(c) for c in cuts), int(total)


@dataclass(frozen=True)
class ProjectionResult:
    ref_proj: SegmentedText
    cut_points: tuple[int, ...]
    total_edit_cost: int
    flags: tuple[str, ...] = field(default=())
    dropped_tags: int = 0


def project_boundaries(ref: SegmentedText, hyp: SegmentedText,
                       granularity: str = "line") -> ProjectionResult:
    """Copy hypothesis tags onto the reference at MWER-optimal cut points.

    ``granularity="line"`` aligns every line (split at both tag kinds);
    ``"block"`` aligns whole blocks, so only block tags are projected.
    """
    if granularity not in ("line", "block"):
        raise ValueError(f"unknown granularity {granularity!r}")
    ref_tokens = ref.tokens
    if not hyp.tokens:
        return ProjectionResult(ref.with_boundaries({}), (0, len(ref_tokens)), len(ref_tokens),
                                ("empty_hypothesis",))
    mode = MassMode.AGNOSTIC if granularity == "line" else MassMode.BLOCK
    pieces = subtitles(hyp, mode)
    cuts, cost = mwer_segment(ref_tokens, [p for p, _ in pieces])
    flags = []
    if not ref_tokens:
        flags.append("empty_reference")
    bounds: dict[int, BoundaryTag] = {}
    dropped = 0
    for (_, tag), gap in zip(pieces, cuts[1:]):
        if tag is None:
            continue
        if gap == 0:
            logger.info("projected %s lands before the first token; dropped", tag.value)
            dropped += 1
            continue
        if gap in bounds:
            logger.info("projected tags collide at gap %d; dropping earlier %s",
                        gap, bounds[gap].value)
            dropped += 1
        bounds[gap] = tag
    if dropped:
        flags.append("dropped_tags")
    proj = ref.with_boundaries(bounds) if ref_tokens else ref
    return ProjectionResult(proj, cuts, cost, tuple(flags), dropped)
