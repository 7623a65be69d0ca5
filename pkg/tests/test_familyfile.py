import pytest

from setembed.familyfile import (
    FamilyParseError,
    fixture_names,
    format_family,
    load_fixture,
    parse_family,
)

BUNDLED = {
    "O1": ["A", "B", "C", "AB", "BC", "CA", "ABC"],
    "O2": ["AB", "BC", "A", "B", "C"],
    "O3": ["ABCDEF", "BCD", "CDE", "A"],
    "O4": ["ABCDEFG", "ABCDE", "ABC", "A"],
    "O5": ["ABC", "BCD", "CDE", "DEA", "EAB"],
}


def test_fixture_names():
    assert fixture_names() == ["O1", "O2", "O3", "O4", "O5"]


@pytest.mark.parametrize("name", sorted(BUNDLED))
def test_fixture_members(name):
    spec = load_fixture(name)
    assert [frozenset(s.members) for s in spec.sets] == [frozenset(m) for m in BUNDLED[name]]
    assert all(s.color for s in spec.sets)


def test_first_fixture():
    spec = load_fixture("O1")
    assert spec.elements == ("A", "B", "C")
    assert len(spec.sets) == 7
    assert spec.sets[0].color == "orange"
    assert spec.sets[6].color == "tomato"


@pytest.mark.parametrize("name", sorted(BUNDLED))
def test_round_trip_fixtures(name):
    spec = load_fixture(name)
    assert parse_family(format_family(spec)) == spec


def test_round_trip_with_volumes_and_colors():
    text = "universe: a b c\nvolume: a=0.5 c=2.25\nset x [#ff8c00]: a b  # tail comment\nset y: c\n"
    spec = parse_family(text)
    assert spec.volumes == (("a", 0.5), ("c", 2.25))
    assert spec.sets[0].color == "#ff8c00"
    assert spec.sets[0].members == ("a", "b")
    assert parse_family(format_family(spec)) == spec
    fam = spec.to_family()
    assert fam.universe.volume["c"] == 2.25
    assert fam.universe.volume["b"] == 1.0


def test_comments_and_blank_lines():
    spec = parse_family("# header\n\nuniverse: A B\n   # indented comment\nset s: A\n")
    assert spec.sets[0].members == ("A",)


def test_empty_sets_list():
    with pytest.raises(FamilyParseError, match="no sets"):
        parse_family("universe: A B\n")


def test_unknown_element_named():
    with pytest.raises(FamilyParseError) as err:
        parse_family("universe: A B\nset s: A Z\n")
    assert "'Z'" in str(err.value)
    assert (err.value.line, err.value.column) == (2, 10)


def test_duplicate_set_name():
    with pytest.raises(FamilyParseError, match="duplicate set name") as err:
        parse_family("universe: A\nset s: A\nset s: A\n")
    assert err.value.line == 3


def test_empty_universe():
    with pytest.raises(FamilyParseError, match="empty universe"):
        parse_family("set s:\n")


@pytest.mark.parametrize(
    "text, message",
    [
        ("universe: A A\nset s: A\n", "duplicate element"),
        ("universe: A\nvolume: A\nset s: A\n", "element=value"),
        ("universe: A\nvolume: A=x\nset s: A\n", "bad volume"),
        ("universe: A\nvolume: A=-1\nset s: A\n", "positive"),
        ("universe: A\nvolume: Q=1\nset s: A\n", "unknown element"),
        ("universe: A\nset s A\n", "expected 'set"),
        ("universe: A\nfoo: bar\n", "unknown directive"),
        ("universe: A\nset s: A A\n", "listed twice"),
        ("universe: A B\nset s:\n", "all sets are empty"),
    ],
)
def test_errors(text, message):
    with pytest.raises(FamilyParseError, match=message):
        parse_family(text)


def test_missing_fixture():
    with pytest.raises(KeyError):
        load_fixture("O9")
