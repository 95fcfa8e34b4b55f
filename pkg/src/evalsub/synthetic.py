"""Deterministic English-like subtitle corpus for desk-scale experiments.

Sentences come from a small phrase grammar over a fixed vocabulary, are
tokenized the way pre-tokenized subtitle corpora are (punctuation and clitics
split off), and are broken into lines of at most 42 characters grouped into
blocks of one or two lines.
"""

from __future__ import annotations

import random

from .core import BoundaryTag, Corpus, SegmentedText

MAX_CHARS = 42
# shortest line length aimed for when a sentence has to be broken
MIN_TARGET = 34
# chance of keeping a remainder that fits on one line unbroken
KEEP_REST = 0.2
# chance of chaining another clause
CLAUSE_P = 0.5

_W = lambda s: tuple(s.split())

DET = _W("the a this that every one some another my your our their his her")
PLURAL_DET = _W("the these those some many few all our your their two three")
ADJ = _W("""small big old new young good bad real simple different important strange
  beautiful long short whole single human local public social digital early
  huge tiny quiet hard easy clear dark bright green cheap open free common
  famous rare strong weak wrong true amazing difficult natural final basic
  entire modern ancient global personal""")
NOUN = _W("""world city country idea problem question story system way time year day
  life child woman man person family friend teacher doctor scientist student
  company school hospital village house street car phone computer machine
  river ocean forest mountain island planet brain body heart hand eye voice
  book letter picture map song film game market price job project plan
  decision mistake answer reason result experiment study theory number
  language word moment morning night week decade century dream fear hope
  power energy water food money data network garden kitchen door window table
  road bridge station village engine robot camera screen ticket museum library""")
PLURAL = _W("""people children women men friends teachers doctors scientists students
  companies schools cities countries ideas problems questions stories systems
  years days lives families houses streets cars phones computers machines
  rivers forests mountains islands planets brains bodies hands eyes voices
  books letters pictures maps songs films games markets jobs projects plans
  decisions mistakes answers reasons results experiments numbers words
  moments dreams things parts kids cells animals trees birds fish plants""")
NAME = _W("""Paris London Africa India China Europe America Brazil Kenya Tokyo
  Sarah David Maria John Anna Peter Laura Ahmed Chen Lucy""")
VERB_T = _W("""see build find make take give show need want love change understand
  remember study measure design create imagine follow share leave carry open
  discover explain keep lose meet move read watch write use help ask call""")
VERB_T_PAST = _W("""saw built found made took gave showed needed wanted loved changed
  understood remembered studied measured designed created imagined followed
  shared left carried opened discovered explained kept lost met moved read
  watched wrote used helped asked called""")
VERB_I = _W("""work live grow happen matter start stop change wait travel listen
  fail succeed learn talk think move sleep disappear appear""")
VERB_I_PAST = _W("""worked lived grew happened mattered started stopped changed waited
  traveled listened failed succeeded learned talked thought moved slept
  disappeared appeared""")
MODAL = _W("can could will would should might must")
ADV = _W("""really actually just also never always often still already suddenly
  probably finally slowly quickly together again almost even simply""")
PREP = _W("in on at from with for about into through under over across near without behind")
TIME = ("last year", "every day", "ten years ago", "in the morning", "at night",
        "right now", "a few weeks later", "in the end", "for a long time", "today",
        "two years ago", "this week", "every single time", "in 2010", "after that")
OPENER = ("so ,", "and", "but", "now ,", "you know ,", "well ,", "in fact ,", "of course ,",
          "and so", "then", "actually ,", "here 's the thing :", "okay ,", "and then")
SUBJ_PRON = _W("I we you they she he")
AUX = {"I": ("'m", "am"), "we": ("'re", "are"), "you": ("'re", "are"),
       "they": ("'re", "are"), "she": ("'s", "is"), "he": ("'s", "is")}
THINK = ("I think", "we know", "it turns out", "I believe", "you can see", "we found",
         "I realized", "they told me", "it means", "I remember")
CONJ = _W("and but because so when while if although until")
NUMBERS = _W("two three four five ten twenty 100 1,000 50 30 half")


class _Grammar:
    def __init__(self, rng: random.Random):
        self.r = rng

    def pick(self, seq):
        return self.r.choice(seq)

    def maybe(self, p: float) -> bool:
        return self.r.random() < p

    def np(self, depth: int = 0) -> list[str]:
        r = self.r.random()
        if r < 0.14:
            out = [self.pick(NAME)]
        elif r < 0.26:
            out = [self.pick(_W("it this that something everything nothing someone"))]
        elif r < 0.55:
            out = [self.pick(PLURAL_DET)]
            if self.maybe(0.4):
                out.append(self.pick(ADJ))
            out.append(self.pick(PLURAL))
        elif r < 0.62:
            out = [self.pick(NUMBERS), self.pick(PLURAL)]
        else:
            out = [self.pick(DET)]
            if self.maybe(0.45):
                out.append(self.pick(ADJ))
            out.append(self.pick(NOUN))
            if self.maybe(0.12):
                out += ["'s", self.pick(NOUN)]
        if depth < 1 and self.maybe(0.22):
            out += [self.pick(PREP)] + self.np(depth + 1)
        elif depth < 1 and self.maybe(0.08):
            out += ["that"] + self.vp(past=self.maybe(0.5), depth=depth + 1)
        return out

    def vp(self, past: bool, depth: int = 0) -> list[str]:
        out: list[str] = []
        if self.maybe(0.2):
            out.append(self.pick(ADV))
        r = self.r.random()
        if r < 0.18:
            out += [self.pick(MODAL)]
            if self.maybe(0.15):
                out.append("not")
            out += [self.pick(VERB_T)] + self.np(depth)
        elif r < 0.55:
            out += [self.pick(VERB_T_PAST if past else VERB_T)] + self.np(depth)
        elif r < 0.7:
            out += [self.pick(VERB_I_PAST if past else VERB_I)]
        else:
            out += [self.pick(("was", "were")) if past else self.pick(("is", "are"))]
            if self.maybe(0.5):
                out += [self.pick(ADV[:6])]
            out += [self.pick(ADJ)] if self.maybe(0.6) else self.np(depth)
        if self.maybe(0.25):
            out += [self.pick(PREP)] + self.np(depth + 1)
        if self.maybe(0.12):
            out += self.pick(TIME).split()
        return out

    def clause(self) -> list[str]:
        past = self.maybe(0.4)
        r = self.r.random()
        if r < 0.35:
            subj = self.pick(SUBJ_PRON)
            if self.maybe(0.2) and not past:
                contracted, full = AUX[subj]
                adv = [self.pick(ADV[:8])] if self.maybe(0.3) else []
                return ([subj, contracted if self.maybe(0.6) else full] + adv
                        + ["going", "to", self.pick(VERB_T)] + self.np())
            return [subj] + self.vp(past)
        if r < 0.45:
            that = ["that"] if self.maybe(0.4) else []
            return self.pick(THINK).split() + that + self.clause_simple(past)
        if r < 0.52:
            return ["there", self.pick(("is", "was", "are"))] + self.np()
        return self.np() + self.vp(past)

    def clause_simple(self, past: bool) -> list[str]:
        return [self.pick(SUBJ_PRON)] + self.vp(past)

    def sentence(self) -> list[str]:
        out: list[str] = []
        if self.maybe(0.3):
            out += self.pick(OPENER).split()
        if self.maybe(0.12):
            out += self.pick(TIME).split() + [","]
        out += self.clause()
        for _ in range(3):
            if not self.maybe(CLAUSE_P):
                break
            conj = self.pick(CONJ)
            out += ([","] if self.maybe(0.5) else []) + [conj] + self.clause()
        if self.maybe(0.08):
            out += [","] + self.pick(("right", "you know", "actually", "too")).split()
        out.append("?" if self.maybe(0.1) else self.pick((".",) * 12 + ("!", "...")))
        if out[0][0].isalpha():
            out[0] = out[0][0].upper() + out[0][1:]
        return out


def _chars(tokens) -> int:
    return sum(len(t) for t in tokens) + max(0, len(tokens) - 1)


def _split_lines(tokens: list[str], rng: random.Random) -> list[int]:
    """Line end positions (exclusive indices into ``tokens``)."""
    ends = []
    start = 0
    n = len(tokens)
    while start < n:
        if _chars(tokens[start:]) <= MAX_CHARS and (rng.random() < KEEP_REST or n - start <= 3):
            ends.append(n)
            break
        target = rng.randint(MIN_TARGET, MAX_CHARS)
        best = None
        end = start + 1
        while end <= n and _chars(tokens[start:end]) <= MAX_CHARS:
            width = _chars(tokens[start:end])
            if width <= target:
                best = end
            # prefer a break after punctuation when it is close to the target
            if tokens[end - 1] in {",", ".", "?", "!", ":"} and width >= target - 10:
                best = end
                break
            end += 1
        if best is None:
            best = start + 1
        ends.append(best)
        start = best
    return ends


def generate_sentence(rng: random.Random) -> SegmentedText:
    g = _Grammar(rng)
    while True:
        tokens = g.sentence()
        if 3 <= len(tokens) <= 60:
            break
    ends = _split_lines(tokens, rng)
    bounds: dict[int, BoundaryTag] = {}
    in_block = 0
    for i, end in enumerate(ends):
        in_block += 1
        last = i == len(ends) - 1
        if last:
            # a sentence can finish on the first line of a block
            tag = BoundaryTag.EOL if in_block == 1 and rng.random() < 0.15 else BoundaryTag.EOB
        elif in_block == 2 or rng.random() < 0.4:
            tag = BoundaryTag.EOB
        else:
            tag = BoundaryTag.EOL
        bounds[end] = tag
        if tag is BoundaryTag.EOB:
            in_block = 0
    return SegmentedText(tuple(tokens), bounds)


def generate_corpus(n: int = 545, seed: int = 2022, identifier: str = "synthetic-en") -> Corpus:
    rng = random.Random(seed)
    return Corpus(tuple(generate_sentence(rng) for _ in range(n)), identifier)
