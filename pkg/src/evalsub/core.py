"""Subtitle-tagged text: parsing, serialization and the derived views metrics consume.

A sentence is stored as its word tokens plus a mapping from inter-token gaps to
boundary tags.  Gap ``g`` is the position right after token ``g`` (1-based), so a
sentence of ``n`` tokens has gaps ``1..n``; gap 0 would mean a leading break and
is never allowed.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

logger = logging.getLogger(__name__)


class BoundaryTag(str, enum.Enum):
    EOL = "<eol>"
    EOB = "<eob>"

    @property
    def other(self) -> "BoundaryTag":
        return BoundaryTag.EOB if self is BoundaryTag.EOL else BoundaryTag.EOL

    def __str__(self) -> str:
        return self.value


TAG_LITERALS = frozenset(t.value for t in BoundaryTag)


class MassMode(str, enum.Enum):
    """Which boundary kinds delimit segments when converting to masses."""

    AGNOSTIC = "agnostic"
    BLOCK = "block"
    LINE = "line"

    def selects(self, tag: BoundaryTag) -> bool:
        if self is MassMode.AGNOSTIC:
            return True
        if self is MassMode.BLOCK:
            return tag is BoundaryTag.EOB
        return tag is BoundaryTag.EOL


class ParseError(ValueError):
    """Malformed subtitle line.  ``line_number`` is 1-based, ``position`` is the
    0-based index of the offending whitespace-delimited item."""

    def __init__(self, message: str, line_number: int | None = None,
                 position: int | None = None):
        self.line_number = line_number
        self.position = position
        where = []
        if line_number is not None:
            where.append(f"line {line_number}")
        if position is not None:
            where.append(f"item {position}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


@dataclass(frozen=True)
class BoundaryMap:
    entries: tuple[tuple[int, BoundaryTag], ...]
    total_tokens: int

    def __post_init__(self):
        prev = 0
        for gap, _ in self.entries:
            if gap <= prev or gap > self.total_tokens:
                raise ValueError(f"invalid boundary gap {gap} for {self.total_tokens} tokens")
            prev = gap

    @property
    def gaps(self) -> tuple[int, ...]:
        return tuple(g for g, _ in self.entries)

    def as_dict(self) -> dict[int, BoundaryTag]:
        return dict(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class SegmentedText:
    tokens: tuple[str, ...]
    boundaries: Mapping[int, BoundaryTag] = field(default_factory=dict)

    def __post_init__(self):
        tokens = tuple(self.tokens)
        for i, tok in enumerate(tokens):
            if not tok or any(c.isspace() for c in tok):
                raise ValueError(f"token {i} is empty or contains whitespace: {tok!r}")
            if tok in TAG_LITERALS:
                raise ValueError(f"token {i} is a boundary literal {tok!r}")
        bounds = {}
        for gap, tag in sorted(dict(self.boundaries).items()):
            if not 1 <= gap <= len(tokens):
                raise ValueError(f"boundary gap {gap} outside 1..{len(tokens)}")
            bounds[gap] = BoundaryTag(tag)
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "boundaries", MappingProxyType(bounds))

    def __len__(self) -> int:
        return len(self.tokens)

    def __hash__(self) -> int:
        return hash((self.tokens, tuple(self.boundaries.items())))

    def __reduce__(self):
        # mapping proxies do not pickle
        return (SegmentedText, (self.tokens, dict(self.boundaries)))

    def boundary_map(self) -> BoundaryMap:
        return BoundaryMap(tuple(self.boundaries.items()), len(self.tokens))

    def with_boundaries(self, boundaries: Mapping[int, BoundaryTag]) -> "SegmentedText":
        return SegmentedText(self.tokens, boundaries)

    def __str__(self) -> str:
        return serialize_sentence(self)


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[SegmentedText, ...]
    identifier: str = ""

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, i):
        return self.sentences[i]

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)

    @property
    def n_boundaries(self) -> int:
        return sum(len(s.boundaries) for s in self.sentences)

    def replace(self, sentences: Iterable[SegmentedText], identifier: str | None = None) -> "Corpus":
        return Corpus(tuple(sentences), self.identifier if identifier is None else identifier)


def check_comparable(a: Corpus, b: Corpus) -> None:
    if len(a) != len(b):
        raise ValueError(
            f"corpora differ in length: {a.identifier or 'a'} has {len(a)} sentences, "
            f"{b.identifier or 'b'} has {len(b)}")


def parse_sentence(line: str, line_number: int | None = None, lenient: bool = False) -> SegmentedText:
    """Parse one whitespace-tokenized line with standalone ``<eol>``/``<eob>`` items.

    In lenient mode a leading tag or the second of two adjacent tags is dropped
    (and logged) instead of raising.
    """
    items = line.split()
    if not items:
        raise ParseError("empty line", line_number)
    tokens: list[str] = []
    boundaries: dict[int, BoundaryTag] = {}
    for pos, item in enumerate(items):
        if item not in TAG_LITERALS:
            tokens.append(item)
            continue
        gap = len(tokens)
        if gap == 0:
            if not lenient:
                raise ParseError(f"line starts with boundary {item}", line_number, pos)
            logger.warning("line %s: dropping leading boundary %s", line_number, item)
            continue
        if gap in boundaries:
            if not lenient:
                raise ParseError(f"consecutive boundaries {boundaries[gap].value} {item}",
                                 line_number, pos)
            logger.warning("line %s: dropping consecutive boundary %s at item %d",
                           line_number, item, pos)
            continue
        boundaries[gap] = BoundaryTag(item)
    if not tokens:
        raise ParseError("line has no word tokens", line_number)
    return SegmentedText(tuple(tokens), boundaries)


def serialize_sentence(t: SegmentedText) -> str:
    out = []
    for i, tok in enumerate(t.tokens, start=1):
        out.append(tok)
        tag = t.boundaries.get(i)
        if tag is not None:
            out.append(tag.value)
    return " ".join(out)


def to_masses(t: SegmentedText, mode: MassMode | str = MassMode.AGNOSTIC) -> tuple[int, ...]:
    """Segment sizes between consecutive selected boundaries.

    A selected boundary at the final gap closes the last segment and does not
    open an empty one.
    """
    mode = MassMode(mode)
    masses = []
    start = 0
    for gap, tag in t.boundaries.items():
        if mode.selects(tag) and gap < len(t.tokens):
            masses.append(gap - start)
            start = gap
    masses.append(len(t.tokens) - start)
    return tuple(masses)


def select_boundaries(t: SegmentedText, mode: MassMode | str) -> SegmentedText:
    mode = MassMode(mode)
    return t.with_boundaries({g: tag for g, tag in t.boundaries.items() if mode.selects(tag)})


def strip_boundaries(t: SegmentedText) -> list[str]:
    return list(t.tokens)


def mask_tokens(t: SegmentedText, mask: str = "_") -> SegmentedText:
    if mask in TAG_LITERALS:
        raise ValueError(f"mask {mask!r} collides with a boundary literal")
    return SegmentedText((mask,) * len(t.tokens), t.boundaries)


def with_tags(t: SegmentedText) -> list[str]:
    """Tokens with boundary tags re-materialized as ordinary tokens."""
    return serialize_sentence(t).split(" ")


def lines(t: SegmentedText) -> list[tuple[str, ...]]:
    """Token runs between consecutive boundaries of any kind, plus trailing text."""
    out = []
    start = 0
    for gap in t.boundaries:
        out.append(t.tokens[start:gap])
        start = gap
    if start < len(t.tokens):
        out.append(t.tokens[start:])
    return out


def subtitles(t: SegmentedText, mode: MassMode | str = MassMode.AGNOSTIC
              ) -> list[tuple[tuple[str, ...], BoundaryTag | None]]:
    """Split at selected boundaries; each piece carries the tag that closes it.

    The final piece has tag ``None`` when the sentence does not end with a
    selected boundary.
    """
    mode = MassMode(mode)
    out = []
    start = 0
    for gap, tag in t.boundaries.items():
        if mode.selects(tag):
            out.append((t.tokens[start:gap], tag))
            start = gap
    if start < len(t.tokens):
        out.append((t.tokens[start:], None))
    return out


def read_corpus(path: str | Path, lenient: bool = False, identifier: str | None = None) -> Corpus:
    path = Path(path)
    raw = path.read_text(encoding="utf-8").split("\n")
    # a final newline is not an empty sentence
    if raw and raw[-1] == "":
        raw.pop()
    return parse_corpus(raw, identifier or path.name, lenient=lenient)


def parse_corpus(lines_: Sequence[str], identifier: str = "", lenient: bool = False) -> Corpus:
    return Corpus(tuple(parse_sentence(l, n, lenient) for n, l in enumerate(lines_, start=1)),
                  identifier)


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for s in corpus:
            fh.write(serialize_sentence(s) + "\n")
