"""Boundary-aware MT metrics over subtitle corpora."""

from __future__ import annotations

from .bleu import BleuScore, bleu
from .core import TAG_LITERALS, Corpus, check_comparable, mask_tokens, with_tags
from .ter import TerScore, ter

DEFAULT_MASK = "_"


def _pairs(hyp: Corpus, ref: Corpus):
    check_comparable(hyp, ref)
    if not len(ref):
        raise ValueError("empty corpus")


def bleu_nb(hyp: Corpus, ref: Corpus, tokenize: str = "none", smoothing: str = "exp") -> BleuScore:
    """BLEU on the word tokens only."""
    _pairs(hyp, ref)
    return bleu([list(s.tokens) for s in hyp], [list(s.tokens) for s in ref],
                smoothing=smoothing, tokenize=tokenize)


def bleu_br(hyp: Corpus, ref: Corpus, tokenize: str = "none", smoothing: str = "exp") -> BleuScore:
    """BLEU with boundary tags as ordinary one-token words."""
    _pairs(hyp, ref)
    return bleu([with_tags(s) for s in hyp], [with_tags(s) for s in ref],
                smoothing=smoothing, tokenize=tokenize, keep=TAG_LITERALS)


def ter_br(hyp: Corpus, ref: Corpus, mask: str = DEFAULT_MASK) -> TerScore:
    """TER over sequences whose words are all replaced by ``mask``."""
    _pairs(hyp, ref)
    return ter([with_tags(mask_tokens(s, mask)) for s in hyp],
               [with_tags(mask_tokens(s, mask)) for s in ref])
