"""Segmentation metrics between two segmentations of the same token sequence.

Precision/recall/F1 work on boundary maps; Pk and WindowDiff on mass
sequences; segmentation and boundary similarity on boundary edit distance.
Every scorer returns its numerator/denominator parts so corpus scores can be
pooled (sum of parts) or averaged per sentence.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import BoundaryMap, BoundaryTag

DEFAULT_NT = 2
DEFAULT_SUB_WEIGHT = 0.5


class LengthMismatchError(ValueError):
    """The two segmentations do not cover the same number of tokens."""


@dataclass(frozen=True)
class PRF1:
    precision: float
    recall: float
    f1: float
    true_positives: int
    hyp_boundaries: int
    ref_boundaries: int

    @classmethod
    def from_counts(cls, tp: int, n_hyp: int, n_ref: int) -> "PRF1":
        # no hypothesis boundaries means nothing was wrongly proposed
        p = tp / n_hyp if n_hyp else 1.0
        r = tp / n_ref if n_ref else 1.0
        f = 2 * p * r / (p + r) if p + r > 0 else 0.0
        return cls(p, r, f, tp, n_hyp, n_ref)


@dataclass(frozen=True)
class WindowScore:
    value: float
    window_k: int
    probe_count: int
    penalties: int


@dataclass(frozen=True)
class EditSimScore:
    value: float
    additions: int
    substitutions: int
    transpositions: int
    matches: int
    weighted_edits: float
    numerator: float
    denominator: float

    @property
    def edit_counts(self) -> tuple[int, int, int]:
        return (self.additions, self.transpositions, self.matches)


def _check_tokens(ref: BoundaryMap, hyp: BoundaryMap) -> None:
    if ref.total_tokens != hyp.total_tokens:
        raise LengthMismatchError(
            f"reference has {ref.total_tokens} tokens, hypothesis {hyp.total_tokens}; "
            "project the hypothesis boundaries onto the reference first")


def precision_recall_f1(ref: BoundaryMap, hyp: BoundaryMap, type_sensitive: bool = False) -> PRF1:
    _check_tokens(ref, hyp)
    r = ref.as_dict()
    if type_sensitive:
        tp = sum(1 for g, tag in hyp.entries if r.get(g) is tag)
    else:
        tp = sum(1 for g, _ in hyp.entries if g in r)
    return PRF1.from_counts(tp, len(hyp), len(ref))


# -- window metrics ---------------------------------------------------------

def default_window(ref: Sequence[int]) -> int:
    """Half the mean reference segment size, rounded half-to-even, at least 2."""
    return max(2, round(Fraction(sum(ref), 2 * len(ref))))


def _labels(masses: Sequence[int]) -> np.ndarray:
    return np.repeat(np.arange(len(masses)), masses)


def _window_setup(ref, hyp, k):
    if any(m < 0 for m in ref) or any(m < 0 for m in hyp):
        raise ValueError("negative mass")
    n = sum(ref)
    if n != sum(hyp):
        raise LengthMismatchError(f"total mass differs: {n} vs {sum(hyp)}")
    if k is None:
        k = default_window(ref)
    if k < 1:
        raise ValueError("window must be positive")
    if n < k + 1:
        raise ValueError(f"total mass {n} too small for window {k}: no probes")
    return _labels(ref), _labels(hyp), k, n - k


def pk(ref: Sequence[int], hyp: Sequence[int], k: int | None = None) -> WindowScore:
    """Fraction of probe pairs (i, i+k) whose same-segment status differs."""
    lr, lh, k, probes = _window_setup(ref, hyp, k)
    same_r = lr[:-k] == lr[k:]
    same_h = lh[:-k] == lh[k:]
    pen = int(np.count_nonzero(same_r != same_h))
    return WindowScore(pen / probes, k, probes, pen)


def window_diff(ref: Sequence[int], hyp: Sequence[int], k: int | None = None) -> WindowScore:
    """Fraction of windows whose boundary counts differ."""
    lr, lh, k, probes = _window_setup(ref, hyp, k)
    pen = int(np.count_nonzero((lr[k:] - lr[:-k]) != (lh[k:] - lh[:-k])))
    return WindowScore(pen / probes, k, probes, pen)


# -- boundary edit distance ---------------------------------------------------

@dataclass(frozen=True)
class BoundaryEdits:
    additions: tuple[tuple[int, object, str], ...]       # (position, type, side)
    substitutions: tuple[tuple[int, object, object], ...]  # (position, ref type, hyp type)
    transpositions: tuple[tuple[int, int, object], ...]  # (ref position, hyp position, type)
    matches: int
    weighted: float


def _pair_weight(a, b, n_t, sub_weight):
    (pa, ta), (pb, tb) = a, b
    if ta == tb:
        span = abs(pa - pb)
        if 0 < span < n_t:
            return span / n_t
        return None
    if pa == pb:
        return sub_weight
    return None


def boundary_edits(ref: Iterable[tuple[int, object]], hyp: Iterable[tuple[int, object]],
                   n_t: int = DEFAULT_NT, sub_weight: float = DEFAULT_SUB_WEIGHT) -> BoundaryEdits:
    """Minimum-weight edit set between two typed boundary sets.

    Boundaries present on both sides at the same position with the same type
    are matches.  Every other boundary is either an addition (weight 1), half of
    a transposition with a same-type boundary less than ``n_t`` positions away
    on the other side (weight span/n_t), or half of a substitution with a
    boundary of a different type at the same position (``sub_weight``).  Among
    minimum-weight edit sets, the one with the most paired edits is chosen.
    """
    ref_set = set(ref)
    hyp_set = set(hyp)
    matches = len(ref_set & hyp_set)
    a = sorted(ref_set - hyp_set, key=lambda x: (x[0], str(x[1])))
    b = sorted(hyp_set - ref_set, key=lambda x: (x[0], str(x[1])))
    na, nb = len(a), len(b)
    pairs: list[tuple[int, int]] = []
    if na and nb:
        # lexicographic objective: weight first, then more pairs
        scale = 4.0 * (na + nb + 1)
        big = scale * (na + nb + 4)
        cost = np.full((na + nb, nb + na), big)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                w = _pair_weight(x, y, n_t, sub_weight)
                if w is not None:
                    cost[i, j] = w * scale - 1.0
            cost[i, nb + i] = scale
        for j in range(nb):
            cost[na + j, j] = scale
        cost[na:, nb:] = 0.0
        rows, cols = linear_sum_assignment(cost)
        pairs = [(i, j) for i, j in zip(rows, cols) if i < na and j < nb]
    paired_a = {i for i, _ in pairs}
    paired_b = {j for _, j in pairs}
    subs, trans = [], []
    weighted = 0.0
    for i, j in sorted(pairs):
        (pa, ta), (pb, tb) = a[i], b[j]
        w = _pair_weight(a[i], b[j], n_t, sub_weight)
        weighted += w
        if ta == tb:
            trans.append((pa, pb, ta))
        else:
            subs.append((pa, ta, tb))
    adds = [(p, t, "ref") for i, (p, t) in enumerate(a) if i not in paired_a]
    adds += [(p, t, "hyp") for j, (p, t) in enumerate(b) if j not in paired_b]
    weighted += len(adds)
    return BoundaryEdits(tuple(adds), tuple(subs), tuple(trans), matches, weighted)


def _mass_positions(masses: Sequence[int]) -> list[tuple[int, int]]:
    out, pos = [], 0
    for m in masses[:-1]:
        pos += m
        out.append((pos, 1))
    return out


def segmentation_similarity(ref: Sequence[int], hyp: Sequence[int],
                            n_t: int = DEFAULT_NT) -> EditSimScore:
    """One minus weighted boundary edits per potential boundary position."""
    n = sum(ref)
    if n != sum(hyp):
        raise LengthMismatchError(f"total mass differs: {n} vs {sum(hyp)}")
    ed = boundary_edits(_mass_positions(ref), _mass_positions(hyp), n_t)
    pbs = n - 1
    num = pbs - ed.weighted
    value = num / pbs if pbs > 0 else 1.0
    return EditSimScore(value, len(ed.additions), 0, len(ed.transpositions), ed.matches,
                        ed.weighted, num, pbs)


def boundary_similarity(ref: BoundaryMap, hyp: BoundaryMap, n_t: int = DEFAULT_NT,
                        sub_weight: float = DEFAULT_SUB_WEIGHT,
                        type_sensitive: bool = True) -> EditSimScore:
    """One minus weighted edits over (unweighted edits + matches)."""
    _check_tokens(ref, hyp)

    def items(bm: BoundaryMap):
        if type_sensitive:
            return [(g, t.value) for g, t in bm.entries]
        return [(g, "*") for g, _ in bm.entries]

    ed = boundary_edits(items(ref), items(hyp), n_t, sub_weight)
    count = len(ed.additions) + len(ed.substitutions) + len(ed.transpositions)
    den = count + ed.matches
    num = den - ed.weighted
    value = num / den if den > 0 else 1.0
    return EditSimScore(value, len(ed.additions), len(ed.substitutions), len(ed.transpositions),
                        ed.matches, ed.weighted, num, den)


# -- corpus aggregation -------------------------------------------------------

def pool_prf1(scores: Iterable[PRF1]) -> PRF1:
    tp = hyp = ref = 0
    for s in scores:
        tp += s.true_positives
        hyp += s.hyp_boundaries
        ref += s.ref_boundaries
    return PRF1.from_counts(tp, hyp, ref)


def pool_window(scores: Sequence[WindowScore]) -> float:
    probes = sum(s.probe_count for s in scores)
    if not probes:
        raise ValueError("no probes in any sentence")
    return sum(s.penalties for s in scores) / probes


def pool_editsim(scores: Sequence[EditSimScore]) -> float:
    den = sum(s.denominator for s in scores)
    if not den:
        return 1.0
    return sum(s.numerator for s in scores) / den


def mean_value(values: Sequence[float]) -> float:
    if not values:
        raise ValueError("no sentence-level values")
    return float(sum(values) / len(values))


__all__ = [
    "BoundaryTag", "PRF1", "WindowScore", "EditSimScore", "BoundaryEdits", "LengthMismatchError",
    "precision_recall_f1", "pk", "window_diff", "default_window", "boundary_edits",
    "segmentation_similarity", "boundary_similarity", "pool_prf1", "pool_window",
    "pool_editsim", "mean_value",
]
