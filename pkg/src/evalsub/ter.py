"""Translation edit rate with tercom-style greedy block shifts.

The shift search follows tercom's heuristics (candidate filtering, ranking and
limits) so that scores agree with ``TER|#:1|c:lc|t:tercom|nr:no|pn:yes|as:no``.
The banded edit distance runs under numba; everything else is plain Python.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np

MAX_SHIFT_SIZE = 10
MAX_SHIFT_DIST = 50
BEAM_WIDTH = 25
MAX_SHIFT_CANDIDATES = 1000

_INF = 10 ** 16
# edit ops as seen when rewriting the hypothesis into the reference
OP_NOP, OP_SUB, OP_INS, OP_DEL, OP_UNDEF = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class TerScore:
    value: float
    edits: int
    shifts: int
    ref_len: float
    signature: str = ""

    def to_dict(self) -> dict:
        return {"value": self.value, "edits": self.edits, "shifts": self.shifts,
                "ref_len": self.ref_len, "signature": self.signature}

    def __float__(self) -> float:
        return self.value


@numba.njit(cache=True)
def _beam_table(h, r, beam_width):
    nh = h.shape[0]
    nr = r.shape[0]
    cost = np.full((nh + 1, nr + 1), _INF, dtype=np.int64)
    op = np.full((nh + 1, nr + 1), OP_UNDEF, dtype=np.int8)
    for j in range(nr + 1):
        cost[0, j] = j
        op[0, j] = OP_INS
    ratio = nr / nh if nh > 0 else 1.0
    if beam_width < ratio / 2:
        beam_width = int(math.ceil(ratio / 2 + beam_width))
    for i in range(1, nh + 1):
        diag = int(math.floor(i * ratio))
        lo = max(0, diag - beam_width)
        hi = min(nr + 1, diag + beam_width)
        if i == nh:
            hi = nr + 1
        for j in range(lo, hi):
            if j == 0:
                cost[i, 0] = cost[i - 1, 0] + 1
                op[i, 0] = OP_DEL
                continue
            # preference on ties: match/substitution, deletion, insertion
            if h[i - 1] == r[j - 1]:
                best, best_op = cost[i - 1, j - 1], OP_NOP
            else:
                best, best_op = cost[i - 1, j - 1] + 1, OP_SUB
            if cost[i, j] > best:
                cost[i, j] = best
                op[i, j] = best_op
            c = cost[i - 1, j] + 1
            if cost[i, j] > c:
                cost[i, j] = c
                op[i, j] = OP_DEL
            c = cost[i, j - 1] + 1
            if cost[i, j] > c:
                cost[i, j] = c
                op[i, j] = OP_INS
    return cost, op


@numba.njit(cache=True)
def _beam_cost(h, r, beam_width):
    cost, _ = _beam_table(h, r, beam_width)
    return cost[h.shape[0], r.shape[0]]


@numba.njit(cache=True)
def _beam_trace(h, r, beam_width):
    cost, op = _beam_table(h, r, beam_width)
    i = h.shape[0]
    j = r.shape[0]
    out = np.empty(i + j, dtype=np.int8)
    n = 0
    while i > 0 or j > 0:
        o = op[i, j]
        out[n] = o
        n += 1
        if o == OP_NOP or o == OP_SUB:
            i -= 1
            j -= 1
        elif o == OP_INS:
            j -= 1
        else:
            i -= 1
    return cost[h.shape[0], r.shape[0]], out[:n][::-1]


def _alignment(trace) -> tuple[dict[int, int], list[int], list[int]]:
    """Map reference positions to hypothesis positions and mark erroneous words.

    ``trace`` rewrites hypothesis into reference; an insertion there is a
    reference word with no hypothesis counterpart.
    """
    pos_h = pos_r = -1
    align: dict[int, int] = {}
    hyp_err: list[int] = []
    ref_err: list[int] = []
    for o in trace:
        if o == OP_NOP or o == OP_SUB:
            pos_h += 1
            pos_r += 1
            align[pos_r] = pos_h
            err = int(o == OP_SUB)
            hyp_err.append(err)
            ref_err.append(err)
        elif o == OP_DEL:
            pos_h += 1
            hyp_err.append(1)
        else:
            pos_r += 1
            align[pos_r] = pos_h
            ref_err.append(1)
    return align, ref_err, hyp_err


def perform_shift(words: list, start: int, length: int, target: int) -> list:
    """Move ``words[start:start+length]`` so that it begins before index ``target``."""
    block = words[start:start + length]
    if target < start:
        return words[:target] + block + words[target:start] + words[start + length:]
    if target > start + length:
        return words[:start] + words[start + length:target] + block + words[target:]
    return (words[:start] + words[start + length:length + target] + block
            + words[length + target:])


def _matching_blocks(h: list, r: list):
    nh, nr = len(h), len(r)
    for sh in range(nh):
        for sr in range(nr):
            if abs(sr - sh) > MAX_SHIFT_DIST or h[sh] != r[sr]:
                continue
            length = 0
            while length < MAX_SHIFT_SIZE and h[sh + length] == r[sr + length]:
                length += 1
                yield sh, sr, length
                if sh + length == nh or sr + length == nr:
                    break


class _Scorer:
    """Shift search state for one reference."""

    def __init__(self, ref_ids: np.ndarray):
        self.ref = ref_ids
        self.ref_list = ref_ids.tolist()

    def cost(self, words: list) -> int:
        return int(_beam_cost(np.asarray(words, dtype=np.int64), self.ref, BEAM_WIDTH))

    def best_shift(self, words: list, checked: int):
        pre, trace = _beam_trace(np.asarray(words, dtype=np.int64), self.ref, BEAM_WIDTH)
        align, ref_err, hyp_err = _alignment(trace.tolist())
        # first erroneous position at or after each index
        next_h = _next_error(hyp_err)
        next_r = _next_error(ref_err)
        best = None
        for sh, sr, length in _matching_blocks(words, self.ref_list):
            if next_h[sh] >= sh + length or next_r[sr] >= sr + length:
                continue
            if sh <= align[sr] < sh + length:
                continue
            prev_idx = -1
            for offset in range(-1, length):
                if sr + offset == -1:
                    idx = 0
                elif sr + offset in align:
                    idx = align[sr + offset] + 1
                else:
                    break
                if idx == prev_idx:
                    continue
                prev_idx = idx
                shifted = perform_shift(words, sh, length, idx)
                cand = (int(pre) - self.cost(shifted), length, -sh, -idx, shifted)
                checked += 1
                if best is None or cand > best:
                    best = cand
            if checked >= MAX_SHIFT_CANDIDATES:
                break
        if best is None:
            return 0, words, checked
        return best[0], best[4], checked


def _next_error(err: list[int]) -> list[int]:
    n = len(err)
    out = [n] * (n + 1)
    for i in range(n - 1, -1, -1):
        out[i] = i if err[i] else out[i + 1]
    return out


def _encode(hyp: Sequence[str], ref: Sequence[str]) -> tuple[list[int], np.ndarray]:
    # ids follow string order so candidate tie-breaking on word lists is preserved
    vocab = {w: i for i, w in enumerate(sorted(set(hyp) | set(ref)))}
    return [vocab[w] for w in hyp], np.asarray([vocab[w] for w in ref], dtype=np.int64)


def sentence_edits(hyp: Sequence[str], ref: Sequence[str]) -> tuple[int, int]:
    """(total edits, number of shifts) turning ``hyp`` into ``ref``."""
    if not ref:
        raise ValueError("empty reference sentence")
    words, ref_ids = _encode(hyp, ref)
    scorer = _Scorer(ref_ids)
    shifts = 0
    checked = 0
    while True:
        gain, shifted, checked = scorer.best_shift(words, checked)
        if checked >= MAX_SHIFT_CANDIDATES or gain <= 0:
            break
        shifts += 1
        words = shifted
    return shifts + scorer.cost(words), shifts


def ter_signature(case_sensitive: bool = False) -> str:
    case = "mixed" if case_sensitive else "lc"
    return (f"TER|#:1|c:{case}|t:tercom|nr:no|pn:yes|as:no"
            f"|sz:{MAX_SHIFT_SIZE}|sd:{MAX_SHIFT_DIST}")


def ter(hyps: Sequence[Sequence[str]], refs: Sequence[Sequence[str]],
        case_sensitive: bool = False) -> TerScore:
    """Corpus TER: total edits over total reference length, times 100."""
    if not hyps:
        raise ValueError("empty corpus")
    if len(hyps) != len(refs):
        raise ValueError(f"{len(hyps)} hypotheses but {len(refs)} references")
    edits = shifts = ref_len = 0
    for hyp, ref in zip(hyps, refs):
        if not case_sensitive:
            hyp = [w.lower() for w in hyp]
            ref = [w.lower() for w in ref]
        e, s = sentence_edits(hyp, ref)
        edits += e
        shifts += s
        ref_len += len(ref)
    return TerScore(100.0 * edits / ref_len, edits, shifts, ref_len, ter_signature(case_sensitive))
