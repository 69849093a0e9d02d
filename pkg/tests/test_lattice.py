import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ucurve.lattice import (
    LOWER,
    UPPER,
    RestrictionSet,
    adjacent_elements,
    full_set,
    in_current_space,
    maximal_element,
    minimal_element,
    parse_element,
    render_element,
)


def lower_set(n, members, accelerate=None):
    return RestrictionSet(LOWER, n, members, accelerate=accelerate)


def upper_set(n, members, accelerate=None):
    return RestrictionSet(UPPER, n, members, accelerate=accelerate)


def brute_covers(orientation, members, x):
    if orientation == LOWER:
        return any(x & ~r == 0 for r in members)
    return any(r & ~x == 0 for r in members)


class TestTextForm:
    def test_render_leftmost_is_feature_zero(self):
        assert render_element(0b0111, 4) == "1110"
        assert render_element(0b0110, 4) == "0110"

    def test_parse_examples(self):
        assert parse_element("1110") == 0b0111
        assert parse_element("0001") == 0b1000

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_element("01x1")
        with pytest.raises(ValueError):
            parse_element("")
        with pytest.raises(ValueError):
            parse_element("011", n=4)

    @given(st.integers(min_value=1, max_value=16), st.data())
    def test_round_trip(self, n, data):
        x = data.draw(st.integers(min_value=0, max_value=full_set(n)))
        assert parse_element(render_element(x, n), n) == x


class TestCovers:
    def test_lower_examples(self):
        r = lower_set(4, [parse_element("1110")])
        assert r.covers(parse_element("0110")) is True
        assert r.covers(parse_element("0001")) is False

    def test_upper_example(self):
        r = upper_set(5, [parse_element("01000")])
        assert r.covers(parse_element("01100")) is True

    def test_width_mismatch_rejected(self):
        r = lower_set(4, [0b0110])
        with pytest.raises(ValueError):
            r.covers(1 << 10)

    @given(
        st.integers(min_value=1, max_value=10),
        st.sampled_from([LOWER, UPPER]),
        st.data(),
    )
    @settings(max_examples=200)
    def test_matches_brute_force_with_and_without_bitmap(self, n, orientation, data):
        full = full_set(n)
        members = data.draw(st.lists(st.integers(0, full), max_size=6))
        fast = RestrictionSet(orientation, n, members, accelerate=True)
        slow = RestrictionSet(orientation, n, members, accelerate=False)
        assert fast.members == slow.members
        for x in range(full + 1):
            expected = brute_covers(orientation, fast.members, x)
            assert fast.covers(x) == expected
            assert slow.covers(x) == expected

    @given(st.integers(min_value=1, max_value=8), st.data())
    def test_lower_covering_is_downward_closed(self, n, data):
        full = full_set(n)
        r = lower_set(n, data.draw(st.lists(st.integers(0, full), min_size=1, max_size=4)))
        x = data.draw(st.integers(0, full))
        if r.covers(x):
            sub = data.draw(st.integers(0, full)) & x
            assert r.covers(sub)

    @given(st.integers(min_value=1, max_value=8), st.data())
    def test_upper_covering_is_upward_closed(self, n, data):
        full = full_set(n)
        r = upper_set(n, data.draw(st.lists(st.integers(0, full), min_size=1, max_size=4)))
        x = data.draw(st.integers(0, full))
        if r.covers(x):
            sup = x | data.draw(st.integers(0, full))
            assert r.covers(sup)


class TestUpdate:
    def test_absorbs_proper_subset(self):
        r = lower_set(4, [parse_element("0110")])
        r.update(parse_element("0111"))
        assert [render_element(m, 4) for m in r.members] == ["0111"]

    def test_covered_element_ignored(self):
        r = lower_set(4, [parse_element("1110")])
        r.update(parse_element("0110"))
        assert [render_element(m, 4) for m in r.members] == ["1110"]

    def test_incomparable_element_added(self):
        r = lower_set(4, [parse_element("1000"), parse_element("0100")])
        r.update(parse_element("0011"))
        got = sorted(render_element(m, 4) for m in r.members)
        assert got == ["0011", "0100", "1000"]

    def test_idempotent(self):
        r = lower_set(4, [parse_element("1000")])
        r.update(parse_element("0011"))
        once = list(r.members)
        r.update(parse_element("0011"))
        assert list(r.members) == once

    @given(
        st.integers(min_value=1, max_value=8),
        st.sampled_from([LOWER, UPPER]),
        st.lists(st.integers(min_value=0, max_value=255), max_size=20),
    )
    @settings(max_examples=200)
    def test_members_stay_an_antichain(self, n, orientation, updates):
        full = full_set(n)
        r = RestrictionSet(orientation, n)
        for x in updates:
            r.update(x & full)
        for i, p in enumerate(r.members):
            for j, q in enumerate(r.members):
                if i != j:
                    assert p & ~q, f"{p:b} contained in {q:b}"

    @given(
        st.integers(min_value=1, max_value=8),
        st.sampled_from([LOWER, UPPER]),
        st.lists(st.integers(min_value=0, max_value=255), max_size=15),
        st.integers(min_value=0, max_value=255),
    )
    @settings(max_examples=200)
    def test_update_preserves_coverage_semantics(self, n, orientation, updates, probe):
        full = full_set(n)
        r = RestrictionSet(orientation, n)
        covered_once = set()
        for x in updates:
            r.update(x & full)
        for x in range(full + 1):
            covered_once.add(x) if r.covers(x) else None
        # coverage equals the union of all updated intervals
        applied = [x & full for x in updates]
        for x in range(full + 1):
            assert r.covers(x) == brute_covers(orientation, applied, x)


class TestMinMaxElements:
    def test_minimal_examples(self):
        assert minimal_element(2, lower_set(2, [])) == 0
        assert minimal_element(2, lower_set(2, [parse_element("11")])) is None
        assert minimal_element(2, lower_set(2, [parse_element("10"), parse_element("01")])) == 0b11

    def test_maximal_examples(self):
        assert maximal_element(2, upper_set(2, [])) == 0b11
        assert maximal_element(2, upper_set(2, [parse_element("00")])) is None
        assert maximal_element(2, upper_set(2, [parse_element("10"), parse_element("01")])) == 0

    def test_orientation_checked(self):
        with pytest.raises(ValueError):
            minimal_element(2, upper_set(2, []))
        with pytest.raises(ValueError):
            maximal_element(2, lower_set(2, []))

    @given(st.integers(min_value=1, max_value=10), st.data())
    @settings(max_examples=200)
    def test_minimal_is_sound_against_enumeration(self, n, data):
        full = full_set(n)
        members = data.draw(st.lists(st.integers(0, full), max_size=5))
        r = lower_set(n, members)
        survivors = [x for x in range(full + 1) if not brute_covers(LOWER, r.members, x)]
        got = minimal_element(n, r)
        if not survivors:
            assert got is None
        else:
            assert got in survivors
            for b in range(n):
                if got >> b & 1:
                    assert (got ^ (1 << b)) not in survivors, "a proper subset survives"

    @given(st.integers(min_value=1, max_value=10), st.data())
    @settings(max_examples=200)
    def test_maximal_is_sound_against_enumeration(self, n, data):
        full = full_set(n)
        members = data.draw(st.lists(st.integers(0, full), max_size=5))
        r = upper_set(n, members)
        survivors = [x for x in range(full + 1) if not brute_covers(UPPER, r.members, x)]
        got = maximal_element(n, r)
        if not survivors:
            assert got is None
        else:
            assert got in survivors
            for b in range(n):
                if not got >> b & 1:
                    assert (got | (1 << b)) not in survivors, "a proper superset survives"


class TestSpaceAndAdjacency:
    def test_in_current_space_examples(self):
        r_l = lower_set(2, [parse_element("10")])
        r_u = upper_set(2, [parse_element("01")])
        assert in_current_space(r_l, r_u, parse_element("11")) is False
        assert in_current_space(r_l, upper_set(2, []), parse_element("01")) is True
        assert in_current_space(r_l, r_u, parse_element("00")) is False

    def test_adjacent_examples(self):
        assert [render_element(x, 2) for x in adjacent_elements(0, 2)] == ["10", "01"]
        assert [render_element(x, 3) for x in adjacent_elements(0b111, 3)] == ["011", "101", "110"]

    @given(st.integers(min_value=1, max_value=16), st.data())
    def test_adjacency_properties(self, n, data):
        x = data.draw(st.integers(0, full_set(n)))
        neighbours = adjacent_elements(x, n)
        assert len(neighbours) == n
        assert len(set(neighbours)) == n
        for y in neighbours:
            assert bin(x ^ y).count("1") == 1
