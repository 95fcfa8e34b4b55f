"""Corpus BLEU with clipped n-gram precisions, brevity penalty and exp smoothing.

Defaults reproduce ``BLEU|#:1|c:mixed|e:no|tok:13a|s:exp`` when ``tokenize="13a"``;
with ``tokenize="none"`` the token lists are scored as given.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

MAX_ORDER = 4

_13A_RULES = [
    (re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])"), r" \1 "),
    # period and comma unless preceded by a digit
    (re.compile(r"([^0-9])([\.,])"), r"\1 \2 "),
    # period and comma unless followed by a digit
    (re.compile(r"([\.,])([^0-9])"), r" \1 \2"),
    # dash when preceded by a digit
    (re.compile(r"([0-9])(-)"), r"\1 \2 "),
]


@lru_cache(maxsize=1 << 16)
def tokenize_13a(line: str) -> str:
    """mteval-v13a tokenization as used by WMT."""
    line = line.replace("<skipped>", "").replace("-\n", "").replace("\n", " ")
    if "&" in line:
        line = (line.replace("&quot;", '"').replace("&amp;", "&")
                .replace("&lt;", "<").replace("&gt;", ">"))
    line = f" {line} "
    for pattern, repl in _13A_RULES:
        line = pattern.sub(repl, line)
    return " ".join(line.split())


def retokenize(tokens: Sequence[str], method: str = "none", keep: frozenset = frozenset()) -> list[str]:
    """Re-tokenize a token list.  Items in ``keep`` are never split."""
    if method == "none":
        return list(tokens)
    if method != "13a":
        raise ValueError(f"unknown tokenizer {method!r}")
    if not keep:
        return tokenize_13a(" ".join(tokens)).split()
    out: list[str] = []
    run: list[str] = []
    for tok in tokens:
        if tok in keep:
            if run:
                out.extend(tokenize_13a(" ".join(run)).split())
                run = []
            out.append(tok)
        else:
            run.append(tok)
    if run:
        out.extend(tokenize_13a(" ".join(run)).split())
    return out


@dataclass(frozen=True)
class NGramPrecisions:
    """Corpus n-gram statistics; ``p`` holds smoothed precisions as fractions."""

    p: tuple[float, ...]
    hyp_len: int
    ref_len: int
    match_counts: tuple[int, ...]
    total_counts: tuple[int, ...]

    @property
    def raw(self) -> tuple[float, ...]:
        return tuple(m / t if t else 0.0 for m, t in zip(self.match_counts, self.total_counts))

    @property
    def brevity_penalty(self) -> float:
        return brevity_penalty(self.hyp_len, self.ref_len)


@dataclass(frozen=True)
class BleuScore:
    value: float
    precisions: NGramPrecisions
    brevity_penalty: float
    signature: str

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "precisions": list(self.precisions.p),
            "match_counts": list(self.precisions.match_counts),
            "total_counts": list(self.precisions.total_counts),
            "hyp_len": self.precisions.hyp_len,
            "ref_len": self.precisions.ref_len,
            "brevity_penalty": self.brevity_penalty,
            "signature": self.signature,
        }

    def __float__(self) -> float:
        return self.value


def brevity_penalty(hyp_len: int, ref_len: int) -> float:
    if hyp_len >= ref_len:
        return 1.0
    return math.exp(1 - ref_len / hyp_len) if hyp_len > 0 else 0.0


def ngram_counts(tokens: Sequence[str], max_order: int = MAX_ORDER) -> Counter:
    grams: Counter = Counter()
    for n in range(1, max_order + 1):
        for i in range(len(tokens) - n + 1):
            grams[tuple(tokens[i:i + n])] += 1
    return grams


def closest_ref_len(hyp_len: int, ref_lens: Sequence[int]) -> int:
    # ties go to the shorter reference
    return min(ref_lens, key=lambda r: (abs(hyp_len - r), r))


def sentence_stats(hyp: Sequence[str], refs: Sequence[Sequence[str]],
                   max_order: int = MAX_ORDER) -> tuple[int, int, list[int], list[int]]:
    """(hyp_len, effective ref_len, matches per order, totals per order)."""
    ref_max: Counter = Counter()
    for ref in refs:
        ref_max |= ngram_counts(ref, max_order)
    hyp_grams = ngram_counts(hyp, max_order)
    matches = [0] * max_order
    totals = [0] * max_order
    for gram, count in hyp_grams.items():
        n = len(gram) - 1
        totals[n] += count
        if gram in ref_max:
            matches[n] += min(count, ref_max[gram])
    return len(hyp), closest_ref_len(len(hyp), [len(r) for r in refs]), matches, totals


def smoothed_precisions(matches: Sequence[int], totals: Sequence[int],
                        smoothing: str = "exp") -> list[float]:
    """Precisions as fractions.  ``exp`` gives the k-th zero-match order a
    numerator of 1/2**k; an order with no n-grams at all stays at zero."""
    if smoothing not in ("exp", "none"):
        raise ValueError(f"unknown smoothing {smoothing!r}")
    out = [0.0] * len(matches)
    if not any(matches):
        return out
    halvings = 1.0
    for n, (m, t) in enumerate(zip(matches, totals)):
        if t == 0:
            break
        if m == 0:
            if smoothing == "exp":
                halvings *= 2
                out[n] = 1.0 / (halvings * t)
        else:
            out[n] = m / t
    return out


def _log(p: float) -> float:
    return math.log(p) if p > 0 else -9999999999.0


def bleu_from_stats(hyp_len: int, ref_len: int, matches: Sequence[int], totals: Sequence[int],
                    smoothing: str = "exp", signature: str = "") -> BleuScore:
    bp = brevity_penalty(hyp_len, ref_len)
    p = smoothed_precisions(matches, totals, smoothing)
    if not any(matches):
        value = 0.0
    else:
        value = 100.0 * bp * math.exp(sum(_log(x) for x in p) / len(p))
    prec = NGramPrecisions(tuple(p), hyp_len, ref_len, tuple(matches), tuple(totals))
    return BleuScore(value, prec, bp, signature)


def _as_ref_set(ref) -> list[Sequence[str]]:
    # a single token list, or a list of alternative token lists
    if ref and not isinstance(ref[0], str):
        return list(ref)
    return [ref]


def bleu_signature(n_refs: int = 1, tokenize: str = "none", smoothing: str = "exp",
                   max_order: int = MAX_ORDER) -> str:
    sig = f"BLEU|#:{n_refs}|c:mixed|e:no|tok:{tokenize}|s:{smoothing}"
    if max_order != MAX_ORDER:
        sig += f"|o:{max_order}"
    return sig


def bleu(hyps: Sequence[Sequence[str]], refs: Sequence, smoothing: str = "exp",
         tokenize: str = "none", max_order: int = MAX_ORDER,
         keep: frozenset = frozenset()) -> BleuScore:
    """Corpus BLEU.  ``refs[i]`` is a token list or a list of alternative token lists."""
    if not hyps:
        raise ValueError("empty corpus")
    if len(hyps) != len(refs):
        raise ValueError(f"{len(hyps)} hypotheses but {len(refs)} references")
    hyp_len = ref_len = 0
    matches = [0] * max_order
    totals = [0] * max_order
    n_refs = 1
    for hyp, ref in zip(hyps, refs):
        ref_set = [retokenize(r, tokenize, keep) for r in _as_ref_set(ref)]
        n_refs = max(n_refs, len(ref_set))
        h_len, r_len, m, t = sentence_stats(retokenize(hyp, tokenize, keep),
                                            ref_set, max_order)
        hyp_len += h_len
        ref_len += r_len
        for n in range(max_order):
            matches[n] += m[n]
            totals[n] += t[n]
    return bleu_from_stats(hyp_len, ref_len, matches, totals, smoothing,
                           bleu_signature(n_refs, tokenize, smoothing, max_order))
