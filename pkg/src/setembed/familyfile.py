"""Plain-text set-family files.

The format is line based::

    # three overlapping sets
    universe: A B C
    volume: A=0.5 B=2          # optional, default 1 per element
    set G1 [orange]: A B       # optional display color in brackets
    set G2: B C

``#`` starts a comment at the beginning of a line or after whitespace, so
colors such as ``[#ff8c00]`` are kept. ``universe`` and ``volume`` lines may
repeat; their contents accumulate.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .sets import GroundUniverse, SetFamily, SubsetRef

__all__ = [
    "FamilyParseError",
    "SetSpec",
    "FamilySpec",
    "parse_family",
    "format_family",
    "load_family",
    "fixture_names",
    "load_fixture",
]


class FamilyParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


@dataclass(frozen=True)
class SetSpec:
    name: str
    members: tuple[str, ...]
    color: str | None = None


@dataclass(frozen=True)
class FamilySpec:
    elements: tuple[str, ...]
    volumes: tuple[tuple[str, float], ...]
    sets: tuple[SetSpec, ...]

    def to_family(self) -> SetFamily:
        universe = GroundUniverse(self.elements, dict(self.volumes))
        return SetFamily(universe, tuple(SubsetRef(s.name, frozenset(s.members)) for s in self.sets))

    @property
    def colors(self) -> list[str | None]:
        return [s.color for s in self.sets]


_COMMENT = re.compile(r"(^|\s)#.*$")
_TOKEN = re.compile(r"\S+")
_SET_HEAD = re.compile(r"set\s+(?P<name>[^\s:\[\]]+)\s*(\[(?P<color>[^\]]*)\])?\s*:")
_NAME_OK = re.compile(r"^[^\s:\[\]#]+$")


def _tokens(text: str, offset: int):
    for m in _TOKEN.finditer(text):
        yield m.group(), offset + m.start() + 1


def parse_family(text: str) -> FamilySpec:
    elements: list[str] = []
    elem_pos: dict[str, tuple[int, int]] = {}
    volumes: dict[str, float] = {}
    vol_pos: dict[str, tuple[int, int]] = {}
    ref_pos: dict[str, tuple[int, int]] = {}
    sets: list[SetSpec] = []
    names: set[str] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _COMMENT.sub("", raw).rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        col0 = indent + 1
        if body.startswith("universe:"):
            start = indent + len("universe:")
            for tok, col in _tokens(line[start:], start):
                if tok in elem_pos:
                    raise FamilyParseError(f"duplicate element {tok!r}", lineno, col)
                if not _NAME_OK.match(tok):
                    raise FamilyParseError(f"invalid element identifier {tok!r}", lineno, col)
                elem_pos[tok] = (lineno, col)
                elements.append(tok)
        elif body.startswith("volume:"):
            start = indent + len("volume:")
            for tok, col in _tokens(line[start:], start):
                key, sep, val = tok.partition("=")
                if not sep:
                    raise FamilyParseError(f"expected element=value, got {tok!r}", lineno, col)
                try:
                    v = float(val)
                except ValueError:
                    raise FamilyParseError(f"bad volume {val!r}", lineno, col + len(key) + 1) from None
                if not v > 0 or v == float("inf"):
                    raise FamilyParseError(f"volume of {key!r} must be positive and finite", lineno, col)
                volumes[key] = v
                vol_pos[key] = (lineno, col)
        elif body.startswith("set"):
            m = _SET_HEAD.match(body)
            if not m:
                raise FamilyParseError("expected 'set <name> [color]: members...'", lineno, col0)
            name = m.group("name")
            if name in names:
                raise FamilyParseError(f"duplicate set name {name!r}", lineno, col0 + m.start("name"))
            names.add(name)
            color = m.group("color")
            color = color.strip() if color is not None else None
            start = indent + m.end()
            members = []
            for tok, col in _tokens(line[start:], start):
                if tok in members:
                    raise FamilyParseError(f"element {tok!r} listed twice in set {name!r}", lineno, col)
                members.append(tok)
                ref_pos.setdefault(tok, (lineno, col))
            sets.append(SetSpec(name, tuple(members), color or None))
        else:
            raise FamilyParseError(f"unknown directive {body.split()[0]!r}", lineno, col0)

    last = max(1, len(text.splitlines()))
    if not elements:
        raise FamilyParseError("empty universe", last, 1)
    if not sets:
        raise FamilyParseError("no sets defined", last, 1)
    known = set(elements)
    for key in volumes:
        if key not in known:
            raise FamilyParseError(f"volume for unknown element {key!r}", *vol_pos[key])
    for s in sets:
        for e in s.members:
            if e not in known:
                raise FamilyParseError(f"unknown element {e!r} in set {s.name!r}", *ref_pos[e])
    if not any(s.members for s in sets):
        raise FamilyParseError("all sets are empty", last, 1)
    vol = tuple((e, volumes[e]) for e in elements if e in volumes)
    return FamilySpec(tuple(elements), vol, tuple(sets))


def format_family(spec: FamilySpec) -> str:
    lines = ["universe: " + " ".join(spec.elements)]
    if spec.volumes:
        lines.append("volume: " + " ".join(f"{e}={v!r}" for e, v in spec.volumes))
    for s in spec.sets:
        color = f" [{s.color}]" if s.color else ""
        lines.append(f"set {s.name}{color}: " + " ".join(s.members))
    return "\n".join(lines) + "\n"


def load_family(path) -> FamilySpec:
    with open(path, encoding="utf-8") as fh:
        return parse_family(fh.read())


def fixture_names() -> list[str]:
    """Names of the bundled families, ``O1`` to ``O5``."""
    root = resources.files("setembed") / "fixtures"
    return sorted(p.name[: -len(".fam")] for p in root.iterdir() if p.name.endswith(".fam"))


def load_fixture(name: str) -> FamilySpec:
    path = resources.files("setembed") / "fixtures" / f"{name}.fam"
    if not path.is_file():
        raise KeyError(f"no bundled family {name!r}; choose from {fixture_names()}")
    return parse_family(path.read_text(encoding="utf-8"))
