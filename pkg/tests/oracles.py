"""Slow, obviously-correct reference computations used only by the tests."""

from __future__ import annotations

import itertools
from fractions import Fraction


def positions(masses):
    out, pos = [], 0
    for m in masses[:-1]:
        pos += m
        out.append(pos)
    return out


def pk_by_definition(ref, hyp, k):
    def seg_of(masses):
        lab = []
        for i, m in enumerate(masses):
            lab += [i] * m
        return lab
    r, h = seg_of(ref), seg_of(hyp)
    n = len(r)
    pen = sum((r[i] == r[i + k]) != (h[i] == h[i + k]) for i in range(n - k))
    return pen, n - k


def window_diff_by_definition(ref, hyp, k):
    br, bh = set(positions(ref)), set(positions(hyp))
    n = sum(ref)
    pen = 0
    for i in range(n - k):
        # boundaries strictly inside tokens i..i+k sit at gaps i+1..i+k
        cr = sum(1 for g in range(i + 1, i + k + 1) if g in br)
        ch = sum(1 for g in range(i + 1, i + k + 1) if g in bh)
        pen += cr != ch
    return pen, n - k


def min_edits(ref_items, hyp_items, n_t=2, sub_weight=Fraction(1, 2)):
    """Exhaustive search over every set of disjoint ref/hyp pairings.

    Boundaries present on both sides are matches and take no part in editing,
    as in the original boundary edit distance.  Among the rest, a same-type
    pair fewer than ``n_t`` positions apart is a transposition (span/n_t) and a
    different-type pair at one position is a substitution; unpaired items are
    additions.  Returns (weight, additions, substitutions, transpositions,
    matches) for the cheapest set, preferring more pairs on ties.
    """
    common = set(ref_items) & set(hyp_items)
    ref_items = [x for x in ref_items if x not in common]
    hyp_items = [x for x in hyp_items if x not in common]

    def weight(a, b):
        (pa, ta), (pb, tb) = a, b
        if ta == tb and 0 < abs(pa - pb) < n_t:
            return Fraction(abs(pa - pb), n_t), "trans"
        if ta != tb and pa == pb:
            return sub_weight, "sub"
        return None, None

    best = None
    m = len(ref_items)
    # assign each ref item to a hyp index or None
    for choice in itertools.product(*[[None] + list(range(len(hyp_items)))] * m):
        used = [c for c in choice if c is not None]
        if len(used) != len(set(used)):
            continue
        total, kinds, ok = Fraction(0), [], True
        for i, j in enumerate(choice):
            if j is None:
                continue
            w, kind = weight(ref_items[i], hyp_items[j])
            if w is None:
                ok = False
                break
            total += w
            kinds.append(kind)
        if not ok:
            continue
        adds = (m - len(used)) + (len(hyp_items) - len(used))
        total += adds
        key = (total, -len(used))
        if best is None or key < best[0]:
            best = (key, (total, adds, kinds.count("sub"), kinds.count("trans"), len(common)))
    return best[1]


def segmentation_similarity(ref, hyp, n_t=2):
    w, *_ = min_edits([(p, 1) for p in positions(ref)], [(p, 1) for p in positions(hyp)], n_t)
    pbs = sum(ref) - 1
    return Fraction(1) if pbs == 0 else 1 - w / pbs


def boundary_similarity(ref_items, hyp_items, n_t=2, sub_weight=Fraction(1, 2)):
    w, adds, subs, trans, matches = min_edits(ref_items, hyp_items, n_t, sub_weight)
    den = adds + subs + trans + matches
    return Fraction(1) if den == 0 else 1 - w / den


def levenshtein(a, b):
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def mwer_by_enumeration(ref, segments):
    """Minimum summed Levenshtein cost over every monotone cut vector."""
    m, j = len(ref), len(segments)
    best = None
    for inner in itertools.combinations_with_replacement(range(m + 1), j - 1):
        cuts = (0,) + inner + (m,)
        cost = sum(levenshtein(ref[cuts[i]:cuts[i + 1]], segments[i]) for i in range(j))
        if best is None or (cost, cuts) < best:
            best = (cost, cuts)
    return best[1], best[0]


def shift_variants(words, max_len=None):
    """Every sequence reachable from ``words`` by moving one contiguous block."""
    n = len(words)
    out = set()
    for start in range(n):
        for end in range(start + 1, n + 1):
            if max_len is not None and end - start > max_len:
                continue
            block = words[start:end]
            rest = words[:start] + words[end:]
            for t in range(len(rest) + 1):
                cand = tuple(rest[:t] + block + rest[t:])
                if cand != tuple(words):
                    out.add(cand)
    return out


def ter_edits_exhaustive(hyp, ref, max_shifts=2):
    """Fewest shifts plus Levenshtein edits, searching all shift sequences up
    to ``max_shifts`` deep.  A lower bound for any greedy shift heuristic."""
    best = levenshtein(hyp, ref)
    frontier = {tuple(hyp)}
    for depth in range(1, max_shifts + 1):
        nxt = set()
        for w in frontier:
            nxt |= shift_variants(list(w))
        for w in nxt:
            best = min(best, depth + levenshtein(list(w), ref))
        frontier = nxt
    return best
