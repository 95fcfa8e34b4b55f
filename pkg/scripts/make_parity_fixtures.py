"""Freeze reference-scorer outputs into tests/data/parity.json.

Needs sacrebleu==2.0.0 and segeval, which are *not* dependencies of evalsub:

    python -m venv /tmp/oracle && /tmp/oracle/bin/pip install sacrebleu==2.0.0 segeval
    /tmp/oracle/bin/python scripts/make_parity_fixtures.py
"""

import json
import random
from decimal import Decimal
from pathlib import Path

import sacrebleu
import segeval
from sacrebleu.metrics import BLEU, TER

assert sacrebleu.__version__ == "2.0.0", sacrebleu.__version__

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "parity.json"

WORDS = ("the a of to and in is it that we this you for are on with as i was "
         "have be at can they so what about there one all people but not do like "
         "now know just more very think world because these really time our see "
         "Paris London car city night water school children way years").split()
PUNCT = [",", ".", "?", "!", ":", ";", "'s", "-", "(", ")", '"', "3.5", "1,000",
         "e-mail", "U.S.", "don't", "it's", "20-year-old", "$5", "&"]


def rand_sentence(rng, lo=3, hi=30):
    n = rng.randint(lo, hi)
    out = []
    for _ in range(n):
        r = rng.random()
        if r < 0.12:
            out.append(rng.choice(PUNCT))
        else:
            w = rng.choice(WORDS)
            if rng.random() < 0.1:
                w = w.capitalize()
            out.append(w)
    return out


def noisy(rng, ref, rate):
    hyp = list(ref)
    ops = max(0, round(rate * len(ref)))
    for _ in range(ops):
        kind = rng.choice(["ins", "del", "sub", "move", "case"])
        if kind == "ins" or not hyp:
            hyp.insert(rng.randint(0, len(hyp)), rng.choice(WORDS))
        elif kind == "del" and len(hyp) > 1:
            hyp.pop(rng.randrange(len(hyp)))
        elif kind == "sub":
            hyp[rng.randrange(len(hyp))] = rng.choice(WORDS)
        elif kind == "move" and len(hyp) > 3:
            i = rng.randrange(len(hyp) - 2)
            L = rng.randint(1, min(4, len(hyp) - i))
            block = hyp[i:i + L]
            del hyp[i:i + L]
            j = rng.randint(0, len(hyp))
            hyp[j:j] = block
        elif kind == "case":
            i = rng.randrange(len(hyp))
            hyp[i] = hyp[i].upper() if rng.random() < 0.5 else hyp[i].lower()
    return hyp


def tagged(rng, words):
    out = []
    for i, w in enumerate(words):
        out.append(w)
        if i < len(words) - 1 and rng.random() < 0.18:
            out.append(rng.choice(["<eol>", "<eob>"]))
    out.append("<eob>")
    return out


def masked(rng, n):
    return tagged(rng, ["_"] * n)


def bleu_block(name, hyps, refs):
    block = {"hyps": [" ".join(h) for h in hyps], "refs": [" ".join(r) for r in refs]}
    for tok in ("13a", "none"):
        metric = BLEU(tokenize=tok, smooth_method="exp")
        corpus = metric.corpus_score(block["hyps"], [block["refs"]])
        block[f"bleu_{tok}"] = {
            "score": corpus.score, "counts": corpus.counts, "totals": corpus.totals,
            "sys_len": corpus.sys_len, "ref_len": corpus.ref_len, "bp": corpus.bp,
            "signature": str(metric.get_signature()),
            "sentence": [metric.corpus_score([h], [[r]]).score
                         for h, r in zip(block["hyps"], block["refs"])],
        }
    metric = TER()
    corpus = metric.corpus_score(block["hyps"], [block["refs"]])
    block["ter"] = {
        "score": corpus.score, "num_edits": corpus.num_edits, "ref_length": corpus.ref_length,
        "signature": str(metric.get_signature()),
        "sentence_edits": [metric.sentence_score(h, [r]).num_edits
                           for h, r in zip(block["hyps"], block["refs"])],
    }
    print(name, block["bleu_13a"]["score"], block["bleu_none"]["score"], block["ter"]["score"])
    return block


def small_ter_cases(rng, n):
    cases = []
    alphabet = "abcd"
    ter = TER(case_sensitive=True)
    while len(cases) < n:
        r = [rng.choice(alphabet) for _ in range(rng.randint(1, 8))]
        h = [rng.choice(alphabet) for _ in range(rng.randint(0, 8))]
        if rng.random() < 0.5:
            h = noisy(rng, r, 0.4)[:8]
            h = [w if w in alphabet else rng.choice(alphabet) for w in h]
        s = ter.sentence_score(" ".join(h), [" ".join(r)])
        cases.append({"hyp": h, "ref": r, "edits": s.num_edits})
    return cases


def masses_from_positions(n, cuts):
    out, prev = [], 0
    for c in sorted(cuts) + [n]:
        out.append(c - prev)
        prev = c
    return out


def segeval_cases(rng, n):
    cases = []
    while len(cases) < n:
        total = rng.randint(3, 12)
        a = masses_from_positions(total, rng.sample(range(1, total), rng.randint(0, min(3, total - 1))))
        b = masses_from_positions(total, rng.sample(range(1, total), rng.randint(0, min(3, total - 1))))
        case = {"ref": a, "hyp": b}
        for k in (2, 3):
            if total >= k + 1:
                case[f"pk_{k}"] = [int(x) for x in segeval.pk(b, a, window_size=k, return_parts=True)]
                case[f"wd_{k}"] = [int(x) for x in segeval.window_diff(b, a, window_size=k, return_parts=True)]
        case["window_default"] = segeval.compute_window_size(a)
        case["pk_default"] = str(segeval.pk(b, a))
        if len(a) > 1 or len(b) > 1:
            case["S"] = str(segeval.segmentation_similarity(b, a))
            case["B"] = str(segeval.boundary_similarity(b, a))
        cases.append(case)
    return cases


def multitype_cases(rng, n):
    """Boundary strings with two types (1=eol, 2=eob) for boundary similarity."""
    cases = []
    while len(cases) < n:
        npb = rng.randint(2, 8)

        def bstring():
            s = [[] for _ in range(npb)]
            for p in rng.sample(range(npb), rng.randint(0, min(3, npb))):
                s[p] = [rng.choice([1, 2])]
            return s

        a, b = bstring(), bstring()
        fa = tuple(frozenset(x) for x in a)
        fb = tuple(frozenset(x) for x in b)
        if not any(fa) and not any(fb):
            continue
        # segeval needs both types present for its substitution scale
        types = {t for x in a + b for t in x}
        num, den, adds, subs, trans = segeval.boundary_similarity(
            fb, fa, boundary_format=segeval.BoundaryFormat.sets, return_parts=True)
        cases.append({"a": a, "b": b, "types": sorted(types), "num": str(num), "den": str(den),
                      "B": str(Decimal(num) / Decimal(den)) if den else "1"})
    return cases


def main():
    rng = random.Random(20220614)
    refs = [rand_sentence(rng) for _ in range(150)]
    hyps = [noisy(rng, r, rng.choice([0.0, 0.1, 0.3, 0.6])) for r in refs]
    out = {"sacrebleu_version": sacrebleu.__version__, "segeval_version": segeval.__version__}
    out["plain"] = bleu_block("plain", hyps, refs)

    tag_refs = [tagged(rng, r) for r in refs]
    tag_hyps = [tagged(rng, h) if h else ["x"] for h in hyps]
    out["tagged"] = bleu_block("tagged", tag_hyps, tag_refs)

    mrefs = [masked(rng, rng.randint(4, 30)) for _ in range(120)]
    mhyps = []
    for r in mrefs:
        n = sum(1 for w in r if w == "_")
        mhyps.append(masked(rng, max(1, n + rng.randint(-3, 3))))
    out["masked"] = bleu_block("masked", mhyps, mrefs)

    out["small_ter"] = small_ter_cases(rng, 1200)
    out["segeval"] = segeval_cases(rng, 400)
    out["segeval_multitype"] = multitype_cases(rng, 400)
    OUT.write_text(json.dumps(out, indent=1))
    print("wrote", OUT)


if __name__ == "__main__":
    main()
