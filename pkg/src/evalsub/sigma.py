"""Upper bound on boundary-aware BLEU and the Sigma segmentation score.

BLEU_br+ estimates the best BLEU_br reachable for a given BLEU_nb by assuming
every boundary is correct: with a boundary density alpha (boundaries per word),
unigram precision rises to (p1 + alpha) / (1 + alpha) and higher orders are
bounded from the (n-1)-gram precision.  Sigma is BLEU_br as a percentage of
that bound.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

from .bleu import BleuScore, NGramPrecisions
from .core import Corpus, check_comparable
from .mt import bleu_br, bleu_nb

logger = logging.getLogger(__name__)

UNDEFINED = "undefined"


@dataclass(frozen=True)
class BoundaryDensity:
    alpha: float
    source: str  # "reference" or "hypothesis"
    boundaries: int
    tokens: int

    @classmethod
    def of(cls, corpus: Corpus, source: str = "reference") -> "BoundaryDensity":
        if source not in ("reference", "hypothesis"):
            raise ValueError(f"unknown density source {source!r}")
        n = corpus.n_tokens
        b = corpus.n_boundaries
        return cls(b / n if n else 0.0, source, b, n)


def p_prime_1(p1: float, alpha: float) -> float:
    return (p1 + alpha) / (1 + alpha)


def p_prime_upper(n: int, p_n: float, p_nm1: float, alpha: float) -> float:
    if n < 2:
        raise ValueError("order must be at least 2")
    # (1-(n-1)a)p_n + n a p_nm1, grouped so equal precisions of 1 give exactly 1
    bound = (p_n + alpha * (n * p_nm1 - (n - 1) * p_n)) / (1 + alpha)
    return min(1.0, max(0.0, bound))


def p_prime(p: Sequence[float], alpha: float) -> list[float]:
    out = [p_prime_1(p[0], alpha)]
    for n in range(2, len(p) + 1):
        out.append(p_prime_upper(n, p[n - 1], p[n - 2], alpha))
    return out


def bleu_br_plus(nb: NGramPrecisions, alpha: float, brevity_penalty: float | None = None) -> float:
    """Bound from BLEU_nb statistics.  ``nb.p`` are BLEU_nb's smoothed precisions,
    so a zero-match order enters with the same smoothed value BLEU used."""
    if not any(nb.match_counts):
        return 0.0
    bp = nb.brevity_penalty if brevity_penalty is None else brevity_penalty
    pp = p_prime(nb.p, alpha)
    if min(pp) <= 0.0:
        return 0.0
    return 100.0 * bp * math.exp(sum(math.log(x) for x in pp) / len(pp))


@dataclass(frozen=True)
class SigmaReport:
    sigma: float | None
    bleu_nb: BleuScore
    bleu_br: BleuScore
    bleu_br_plus: float
    p_prime: tuple[float, ...]
    alpha: BoundaryDensity

    @property
    def defined(self) -> bool:
        return self.sigma is not None

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma if self.defined else UNDEFINED,
            "bleu_br_plus": self.bleu_br_plus,
            "p_prime": list(self.p_prime),
            "alpha": self.alpha.alpha,
            "alpha_source": self.alpha.source,
            "bp_source": "bleu_nb",
            "bleu_nb": self.bleu_nb.to_dict(),
            "bleu_br": self.bleu_br.to_dict(),
        }


def sigma(hyp: Corpus, ref: Corpus, alpha_source: str = "reference",
          tokenize: str = "none") -> SigmaReport:
    check_comparable(hyp, ref)
    nb = bleu_nb(hyp, ref, tokenize=tokenize)
    br = bleu_br(hyp, ref, tokenize=tokenize)
    density = BoundaryDensity.of(ref if alpha_source == "reference" else hyp, alpha_source)
    plus = bleu_br_plus(nb.precisions, density.alpha)
    pp = tuple(p_prime(nb.precisions.p, density.alpha))
    if plus <= 0.0:
        value = None
    else:
        value = 100.0 * br.value / plus
        if value > 100.0 + 1e-9:
            logger.warning("sigma %.3f exceeds 100: BLEU_br above its estimated bound", value)
    return SigmaReport(value, nb, br, plus, pp, density)
