"""Finite set families, their atomic partition and pairwise augmentation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "GroundUniverse",
    "SubsetRef",
    "SetFamily",
    "AtomicPartition",
    "ORIGINAL",
    "DERIVED",
    "compute_atoms",
    "augment",
    "atoms_equivalent",
    "set_volume",
    "parse_augment_mode",
]

ORIGINAL = "original"
DERIVED = "derived"


class UniverseMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class GroundUniverse:
    """Ordered element identifiers with a positive volume per element.

    Volumes default to 1.0 (counting measure).
    """

    elements: tuple[str, ...]
    volume: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        elements = tuple(str(e) for e in self.elements)
        if len(set(elements)) != len(elements):
            raise ValueError("duplicate element identifiers in universe")
        vol = {e: 1.0 for e in elements}
        for e, v in dict(self.volume).items():
            if e not in vol:
                raise ValueError(f"volume given for unknown element {e!r}")
            v = float(v)
            if not (v > 0 and np.isfinite(v)):
                raise ValueError(f"volume of {e!r} must be positive, got {v}")
            vol[e] = v
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "volume", vol)

    def __contains__(self, e) -> bool:
        return e in self.volume

    def __len__(self) -> int:
        return len(self.elements)

    def same_as(self, other: "GroundUniverse") -> bool:
        """Equality as a measured set, ignoring element order."""
        return dict(self.volume) == dict(other.volume)


@dataclass(frozen=True)
class SubsetRef:
    name: str
    members: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))


@dataclass(frozen=True)
class SetFamily:
    """Named subsets of one universe. ``provenance`` parallels ``sets``."""

    universe: GroundUniverse
    sets: tuple[SubsetRef, ...]
    provenance: tuple[str, ...] = ()

    def __post_init__(self):
        sets = tuple(self.sets)
        prov = tuple(self.provenance) or (ORIGINAL,) * len(sets)
        if len(prov) != len(sets):
            raise ValueError("provenance must have one flag per set")
        if any(p not in (ORIGINAL, DERIVED) for p in prov):
            raise ValueError(f"unknown provenance flag in {prov}")
        names = [s.name for s in sets]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise ValueError(f"duplicate set names: {sorted(dup)}")
        for s in sets:
            unknown = s.members.difference(self.universe.volume)
            if unknown:
                raise ValueError(f"set {s.name!r} has unknown elements {sorted(unknown)}")
        if not any(s.members for s in sets):
            raise ValueError("family needs at least one non-empty set")
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "provenance", prov)

    @classmethod
    def from_dict(
        cls,
        sets: Mapping[str, Iterable[str]],
        volume: Mapping[str, float] | None = None,
        elements: Sequence[str] | None = None,
    ) -> "SetFamily":
        """Build a family from ``{name: members}``; the universe defaults to the union."""
        if elements is None:
            elements = sorted(set().union(*map(set, sets.values())))
        universe = GroundUniverse(tuple(elements), volume or {})
        return cls(universe, tuple(SubsetRef(n, frozenset(m)) for n, m in sets.items()))

    def __len__(self) -> int:
        return len(self.sets)

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.sets]

    def volumes(self) -> np.ndarray:
        return np.array([set_volume(s, self.universe) for s in self.sets])

    def index_of(self, members: Iterable[str]) -> int:
        """Index of the set with exactly these members."""
        target = frozenset(members)
        for i, s in enumerate(self.sets):
            if s.members == target:
                return i
        raise KeyError(f"no set with members {sorted(target)}")


@dataclass(frozen=True, eq=False)
class AtomicPartition:
    """Disjoint non-empty atoms and the boolean ``membership[atom, set]`` matrix."""

    atoms: tuple[frozenset[str], ...]
    membership: np.ndarray

    def atom_set(self) -> frozenset[frozenset[str]]:
        return frozenset(self.atoms)

    def volumes(self, universe: GroundUniverse) -> np.ndarray:
        return np.array([sum(universe.volume[e] for e in a) for a in self.atoms])


def set_volume(s: SubsetRef, u: GroundUniverse) -> float:
    """Sum of member volumes; 0 for the empty set."""
    return float(sum(u.volume[e] for e in s.members))


def compute_atoms(family: SetFamily) -> AtomicPartition:
    """Group elements by their membership bit-vector across the family's sets.

    Each distinct non-zero signature is one atom. Atoms are ordered by their
    smallest element identifier, so the result does not depend on the order
    of elements or sets.
    """
    sets = family.sets
    groups: dict[tuple[bool, ...], set[str]] = {}
    for e in family.universe.elements:
        sig = tuple(e in s.members for s in sets)
        if any(sig):
            groups.setdefault(sig, set()).add(e)
    ordered = sorted(groups.items(), key=lambda kv: min(kv[1]))
    atoms = tuple(frozenset(g) for _, g in ordered)
    membership = np.array([sig for sig, _ in ordered], dtype=bool).reshape(len(atoms), len(sets))
    return AtomicPartition(atoms, membership)


def atoms_equivalent(f1: SetFamily, f2: SetFamily) -> bool:
    if not f1.universe.same_as(f2.universe):
        raise UniverseMismatchError("families are defined over different universes")
    return compute_atoms(f1).atom_set() == compute_atoms(f2).atom_set()


def parse_augment_mode(mode) -> tuple[str, int, int]:
    """Normalize ``"none"``, ``"full"``, ``"sample:<n>"`` or a
    ``("sample", n, seed)`` tuple to ``(kind, n, seed)``."""
    if isinstance(mode, str):
        if mode in ("none", "full"):
            return mode, 0, 0
        if mode.startswith("sample:"):
            return "sample", int(mode.split(":", 1)[1]), 0
        raise ValueError(f"unknown augment mode {mode!r}")
    kind, n, *rest = mode
    if kind != "sample":
        raise ValueError(f"unknown augment mode {mode!r}")
    return "sample", int(n), int(rest[0]) if rest else 0


def _candidates(family: SetFamily) -> list[SubsetRef]:
    seen = {s.members for s in family.sets}
    out = []
    originals = [s for s, p in zip(family.sets, family.provenance) if p == ORIGINAL]
    for s1, s2 in itertools.combinations(originals, 2):
        a, b = s1.members, s2.members
        n1, n2 = s1.name, s2.name
        for label, members in (
            (f"({n1}&{n2})", a & b),
            (f"({n1}|{n2})", a | b),
            (f"({n1}-{n2})", a - b),
            (f"({n2}-{n1})", b - a),
        ):
            if not members or members in seen:
                continue
            seen.add(members)
            out.append(SubsetRef(label, members))
    return out


def augment(family: SetFamily, mode="full") -> SetFamily:
    """Append pairwise intersections, unions and differences of the original sets.

    One round only, over pairs of ``original`` sets. ``mode`` is ``"none"``,
    ``"full"``, or ``("sample", n, seed)`` to add ``n`` candidates drawn
    uniformly without replacement. Empty results and member-sets already in
    the family are skipped.
    """
    kind, n, seed = parse_augment_mode(mode)
    if kind == "none":
        return family
    pool = _candidates(family)
    if kind == "sample" and n < len(pool):
        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(len(pool), size=n, replace=False))
        pool = [pool[i] for i in keep]
    names = set(family.names)
    extra = []
    for s in pool:
        name = s.name
        k = 1
        while name in names:
            k += 1
            name = f"{s.name}#{k}"
        names.add(name)
        extra.append(SubsetRef(name, s.members))
    return SetFamily(
        family.universe,
        family.sets + tuple(extra),
        family.provenance + (DERIVED,) * len(extra),
    )
