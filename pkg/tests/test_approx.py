"""
Tests for approx module.
"""

import pytest
import sys
from fractions import Fraction
from pathlib import Path

# Add parent to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from modules.approx import (
    ModelShape, SearchBounds, ShapeError, build_layout, chain_shape,
    encode_approx, enumerate_shapes, format_shape, parse_shape, predicted_stats
)
from modules.cnf import new_formula
from modules.encoders import counter_literal_count


HALF_OF_16 = "2x2,2x2;m=2;k=2;ff=0;ft=0"
FIVE_OF_TEN = "2x3;m=2;k=3;ff=1;ft=1"


class TestShapeString:
    """Tests for shape parsing and printing."""

    def test_parse(self):
        """Test field extraction."""
        shape = parse_shape(HALF_OF_16)
        assert shape == ModelShape(levels=((2, 2), (2, 2)), leaf_m=2, top_k=2)

    def test_print_parse_round_trip(self):
        """Test that printing a parsed shape gives the canonical text."""
        assert format_shape(parse_shape(FIVE_OF_TEN)) == FIVE_OF_TEN
        assert str(parse_shape(HALF_OF_16)) == HALF_OF_16

    def test_fixes_optional(self):
        """Test that ff and ft default to zero."""
        assert str(parse_shape("2x2;m=2;k=2")) == "2x2;m=2;k=2;ff=0;ft=0"

    @pytest.mark.parametrize("text", [
        "",
        "2x;m=2;k=2",
        "2x2;m=2",
        "2x2;m=2;k=2;zz=1",
        "2x2;m=two;k=2",
        "2x2;m=2;k=2;k=1",
    ])
    def test_syntax_errors(self, text):
        """Test malformed shape strings."""
        with pytest.raises(ShapeError, match="syntax"):
            parse_shape(text)


class TestShapeValidation:
    """Tests for shape invariants."""

    @pytest.mark.parametrize("text,invariant", [
        ("2x2,3x1;m=2;k=2", "divisibility"),
        ("2x2;m=2;k=5", "top_k"),
        ("2x2;m=0;k=2", "leaf_m"),
        ("0x2;m=2;k=1", "levels"),
        ("2x2;m=2;k=2;ff=5;ft=4", "fixes"),
        ("2x2;m=2;k=1;ft=3", "derived_k"),
    ])
    def test_invariant_named(self, text, invariant):
        """Test that the error message names the violated invariant."""
        with pytest.raises(ShapeError, match=invariant):
            parse_shape(text)

    def test_unvalidated_parse(self):
        """Test that validation can be deferred."""
        shape = parse_shape("2x2;m=2;k=5", validate=False)
        with pytest.raises(ShapeError, match="top_k"):
            shape.derived_params()


class TestDerivedParams:
    """Tests for derived (k, n)."""

    def test_half_of_sixteen(self):
        """Test the unpinned 1/2-of-16 model."""
        shape = parse_shape(HALF_OF_16)
        assert shape.bottom_count == 16
        assert shape.raw_k == 8
        assert shape.derived_params() == (8, 16)

    def test_pinned(self):
        """Test that true pins consume bound and every pin removes a target."""
        shape = parse_shape(FIVE_OF_TEN)
        assert shape.bottom_count == 12
        assert shape.raw_k == Fraction(6)
        assert shape.derived_params() == (5, 10)

    def test_geometry(self):
        """Test per-level sizes of a two-level model."""
        top, bottom = parse_shape(HALF_OF_16).geometry()
        assert (top.nodes, top.child_size, top.factor, top.span) == (1, 4, 2, 16)
        assert (bottom.nodes, bottom.child_size, bottom.factor, bottom.span) == (2, 4, 2, 8)

    def test_describe(self):
        """Test fractional notation."""
        text = parse_shape(HALF_OF_16).describe()
        assert text.startswith("approximate-at-most-1/2-of-16")


class TestChainShape:
    """Tests for 2x2 chain models."""

    def test_chain_16(self):
        """Test that the 16-variable chain is the two-level model."""
        assert str(chain_shape(16)) == HALF_OF_16

    @pytest.mark.parametrize("n", [8, 16, 32, 64, 128])
    def test_chain_literals(self, n):
        """Test literals 12 + 26*(2^d - 2) for n = 2^(d+1)."""
        d = n.bit_length() - 2
        assert predicted_stats(chain_shape(n)).literals == 12 + 26 * (2 ** d - 2)
        assert chain_shape(n).derived_params() == (n // 2, n)

    @pytest.mark.parametrize("n", [4, 12, 0])
    def test_chain_rejects(self, n):
        """Test sizes that are not powers of two from 8."""
        with pytest.raises(ShapeError, match="chain"):
            chain_shape(n)


class TestLayout:
    """Tests for variable allocation and wiring."""

    def test_bottom_first_then_top_down(self):
        """Test allocation order of a two-level model."""
        layout = build_layout(parse_shape(HALF_OF_16), new_formula())
        assert layout.bottom_vars == list(range(1, 17))
        assert layout.top.columns == [(17, 18), (19, 20)]
        assert layout.levels[1][0].columns == [(21, 22), (23, 24)]
        assert layout.levels[1][1].columns == [(25, 26), (27, 28)]

    def test_links(self):
        """Test that column c of node p feeds child p*w + c."""
        layout = build_layout(parse_shape(HALF_OF_16), new_formula())
        assert layout.links[0].child_vars == layout.levels[1][0].variables
        assert layout.links[1].child_vars == layout.levels[1][1].variables
        assert layout.links[2].child_vars == (1, 2, 3, 4)
        assert layout.links[5].child_vars == (13, 14, 15, 16)

    def test_pins_at_end(self):
        """Test that ft trailing bottom vars are true and ff before them false."""
        layout = build_layout(parse_shape("2x3;m=2;k=3;ff=2;ft=1"), new_formula())
        assert layout.pinned == {10: False, 11: False, 12: True}
        assert layout.target_vars == list(range(1, 10))

    def test_link_bounds(self):
        """Test that row j of a column allows factor*(j-1) child trues."""
        layout = build_layout(parse_shape(HALF_OF_16), new_formula())
        constraints = list(layout.links[0].constraints())
        assert [c.bound for c in constraints] == [0, 2]
        assert [c.guard for c in constraints] == [17, 18]


class TestEncodeApprox:
    """Tests for encode_approx."""

    def test_half_of_sixteen_statistics(self):
        """Test 12 auxiliaries, 58 clauses and 168 literals."""
        result = encode_approx(parse_shape(HALF_OF_16))
        stats = result.stats
        assert stats.aux_variables == 12
        assert stats.clauses == 58
        assert stats.literals == 168
        assert stats.variables == 28
        assert (result.derived_k, result.derived_n) == (8, 16)

    def test_half_of_thirty_two(self):
        """Test 376 literals and a 15.4% literal rate."""
        result = encode_approx(chain_shape(32))
        assert result.stats.literals == 376
        rate = Fraction(376, counter_literal_count(32, 16))
        assert round(float(rate) * 100, 1) == 15.4

    def test_five_of_ten(self):
        """Test the pinned 5-of-10 model."""
        result = encode_approx(parse_shape(FIVE_OF_TEN))
        assert result.stats.literals == 140
        assert result.target_vars == list(range(1, 11))
        assert result.cnf.clauses[-2:] == [(-11,), (12,)]

    def test_emission_order(self):
        """Test top at-most, then column orders, then guarded links."""
        clauses = encode_approx(parse_shape(HALF_OF_16)).cnf.clauses
        assert clauses[0] == (-17, -18, -19)
        assert clauses[4] == (-18, 17)
        # first link: not 17 -> at-most-0 of node (21..24)
        assert clauses[10] == (17, -21)

    @pytest.mark.parametrize("text", [
        HALF_OF_16,
        FIVE_OF_TEN,
        "1x2;m=5;k=1",
        "2x2;m=3;k=1;ff=1",
        "2x4,2x2;m=2;k=5;ff=0;ft=2",
        "4x1,2x2;m=1;k=3",
        "2x2,2x2,2x2;m=2;k=2",
    ])
    def test_predicted_stats_match(self, text):
        """Test that the closed form equals the built formula."""
        shape = parse_shape(text)
        assert predicted_stats(shape) == encode_approx(shape).stats

    @pytest.mark.parametrize("text", [
        HALF_OF_16,
        FIVE_OF_TEN,
        "1x2;m=5;k=1",
        "2x4,1x4;m=2;k=6;ff=2;ft=0",
        "4x1,2x2;m=1;k=3",
        "2x2,2x2,2x2;m=2;k=2",
    ])
    def test_internal_true_satisfies_links_and_orders(self, text):
        """Test that all internal variables true leaves only the top at-most and pins."""
        result = encode_approx(parse_shape(text))
        internal = set(result.cnf.aux_vars)
        top = set(result.layout.top.variables)
        for clause in result.cnf.clauses:
            variables = {abs(lit) for lit in clause}
            if variables <= top and all(lit < 0 for lit in clause):
                continue
            if len(clause) == 1 and abs(clause[0]) in result.layout.pinned:
                continue
            assert any(lit > 0 and lit in internal for lit in clause), clause

    def test_deterministic(self):
        """Test that encoding twice gives identical clauses."""
        shape = parse_shape(FIVE_OF_TEN)
        assert encode_approx(shape).cnf.clauses == encode_approx(shape).cnf.clauses


class TestEnumerateShapes:
    """Tests for shape enumeration."""

    def test_includes_known_models(self):
        """Test that default bounds reach the 1/2-of-16 and 5-of-10 models."""
        assert parse_shape(HALF_OF_16) in enumerate_shapes(8, 16)
        assert parse_shape(FIVE_OF_TEN) in enumerate_shapes(5, 10)

    def test_every_shape_realizes_target(self):
        """Test that every enumerated shape derives the requested (k, n)."""
        shapes = enumerate_shapes(1, 2)
        assert shapes
        assert all(s.derived_params() == (1, 2) for s in shapes)

    def test_sorted_and_unique(self):
        """Test deterministic ordering."""
        shapes = enumerate_shapes(3, 7)
        assert shapes == sorted(set(shapes), key=lambda s: s.sort_key)

    def test_bounds_respected(self):
        """Test that no shape exceeds the given bounds."""
        bounds = SearchBounds(max_levels=1, max_h=2, max_w=3, max_leaf_m=3)
        for shape in enumerate_shapes(4, 9, bounds):
            assert len(shape.levels) == 1
            h, w = shape.levels[0]
            assert h <= 2 and w <= 3 and shape.leaf_m <= 3

    def test_empty_when_too_small(self):
        """Test that tiny bounds can leave nothing."""
        bounds = SearchBounds(max_levels=1, max_h=1, max_w=1, max_leaf_m=1)
        assert enumerate_shapes(5, 10, bounds) == []

    @pytest.mark.parametrize("k,n", [(0, 5), (5, 5), (6, 5)])
    def test_domain(self, k, n):
        """Test that 0 < k < n is required."""
        with pytest.raises(ShapeError):
            enumerate_shapes(k, n)

    def test_bounds_from_config_overrides(self):
        """Test that explicit bounds override the config and None is ignored."""
        bounds = SearchBounds.from_config(max_h=3, max_w=None)
        assert bounds.max_h == 3
        assert bounds.max_w == SearchBounds.from_config().max_w


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
