"""
Approximate At-Most-k Toolkit - Approx Module
=============================================

Tree models of approximate-at-most-k.

A model is a tree of variable matrices. The top node (h_1 x w_1) carries a
plain at-most-k. Every column of a node is order encoded; a column of
height h holding c trues allows at most a*c trues in its child, where the
child is either the next level's node (h' x w') or a leaf group of h*m
bottom variables and a = child size / h. Bottom variables are the targets.
Pinning the last bottom variables to true/false adjusts the derived
(k, n) of a model.

Shape string syntax: "2x2,2x2;m=2;k=2;ff=0;ft=0".
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb, prod
from typing import Dict, Iterator, List, Optional, Tuple

from .cnf import Cnf, CnfStats, Var, ROLE_TARGET, new_formula
from .encoders import GuardedAtMost, at_most_binomial, order_column
from .logger import get_logger
from .config_manager import config

# Module logger
logger = get_logger(__name__)


class ShapeError(ValueError):
    """Shape violates a model invariant or cannot be parsed."""
    pass


# =============================================================================
# SHAPES
# =============================================================================

@dataclass(frozen=True)
class LevelGeometry:
    """Derived sizes of one internal level of a model."""

    h: int
    w: int
    nodes: int           # nodes on this level
    child_size: int      # variables under one column (next node or leaf group)
    factor: int          # child_size / h
    span: int            # bottom variables below one node


@dataclass(frozen=True)
class ModelShape:
    """Full description of one approximate-at-most-k tree model."""

    levels: Tuple[Tuple[int, int], ...]
    leaf_m: int
    top_k: int
    fix_false: int = 0
    fix_true: int = 0

    def __post_init__(self):
        # Normalize lists coming from parsers or callers
        object.__setattr__(self, 'levels', tuple(tuple(level) for level in self.levels))

    # -- sizes ---------------------------------------------------------------

    @property
    def top_size(self) -> int:
        h, w = self.levels[0]
        return h * w

    @property
    def leaf_size(self) -> int:
        return self.levels[-1][0] * self.leaf_m

    @property
    def bottom_count(self) -> int:
        return prod(w for _, w in self.levels) * self.leaf_size

    @property
    def raw_k(self) -> Fraction:
        """Bound induced at the bottom before pinning; integral for valid shapes."""
        return Fraction(self.top_k * self.bottom_count, self.top_size)

    @property
    def pinned_count(self) -> int:
        return self.fix_false + self.fix_true

    def geometry(self) -> List[LevelGeometry]:
        """Per-level node counts, child sizes and expansion factors."""
        result = []
        nodes = 1
        span = self.bottom_count
        for i, (h, w) in enumerate(self.levels):
            if i + 1 < len(self.levels):
                nh, nw = self.levels[i + 1]
                child_size = nh * nw
            else:
                child_size = self.leaf_size
            result.append(LevelGeometry(
                h=h, w=w, nodes=nodes, child_size=child_size,
                factor=child_size // h, span=span
            ))
            nodes *= w
            span //= w
        return result

    # -- validation ----------------------------------------------------------

    def validate(self, check_fixes: bool = True) -> None:
        """
        Check every shape invariant.

        Raises:
            ShapeError: message names the violated invariant
        """
        if not self.levels:
            raise ShapeError("levels: a model needs at least one level")
        for i, level in enumerate(self.levels, 1):
            if len(level) != 2 or any(not isinstance(x, int) or x < 1 for x in level):
                raise ShapeError(f"levels: level {i} must be positive (h, w), got {level}")
        if self.leaf_m < 1:
            raise ShapeError(f"leaf_m: must be >= 1, got {self.leaf_m}")

        for i in range(1, len(self.levels)):
            parent_h = self.levels[i - 1][0]
            h, w = self.levels[i]
            if (h * w) % parent_h != 0:
                raise ShapeError(
                    f"divisibility: level {i + 1} size {h}x{w}={h * w} is not a "
                    f"multiple of parent column height {parent_h}"
                )

        if not 0 <= self.top_k <= self.top_size:
            raise ShapeError(
                f"top_k: must lie in 0..{self.top_size}, got {self.top_k}"
            )

        if not check_fixes:
            return

        if self.fix_false < 0 or self.fix_true < 0:
            raise ShapeError("fixes: fix counts must be non-negative")
        if self.pinned_count > self.bottom_count:
            raise ShapeError(
                f"fixes: {self.pinned_count} pinned variables exceed "
                f"bottom count {self.bottom_count}"
            )
        if self.raw_k.denominator != 1:
            raise ShapeError(
                f"raw_k: top_k*bottom/(h1*w1) = {self.top_k}*{self.bottom_count}/"
                f"{self.top_size} is not an integer"
            )
        if self.fix_true > self.raw_k:
            raise ShapeError(
                f"derived_k: {self.fix_true} true fixes exceed raw bound {int(self.raw_k)}"
            )

    def derived_params(self) -> Tuple[int, int]:
        """
        (k, n) of the approximate-at-most-k realized by this shape.

        Pinning to false removes targets; pinning to true removes targets and
        consumes bound.
        """
        self.validate()
        n = self.bottom_count - self.pinned_count
        k = int(self.raw_k) - self.fix_true
        return k, n

    # -- ordering and rendering ----------------------------------------------

    @property
    def sort_key(self) -> tuple:
        return (len(self.levels), self.levels, self.leaf_m,
                self.top_k, self.fix_false, self.fix_true)

    def __str__(self) -> str:
        return format_shape(self)

    def describe(self) -> str:
        """Fractional notation, e.g. 'approximate-at-most-1/2-of-16'."""
        frac = Fraction(self.top_k, self.top_size)
        label = f"{frac.numerator}/{frac.denominator}" if frac.denominator != 1 else str(frac)
        k, n = self.derived_params()
        return f"approximate-at-most-{label}-of-{self.bottom_count} (k={k}, n={n})"


_LEVEL_RE = re.compile(r'^(\d+)x(\d+)$')


def format_shape(shape: ModelShape) -> str:
    """Render a shape in the canonical string syntax."""
    levels = ",".join(f"{h}x{w}" for h, w in shape.levels)
    return (f"{levels};m={shape.leaf_m};k={shape.top_k};"
            f"ff={shape.fix_false};ft={shape.fix_true}")


def parse_shape(text: str, validate: bool = True) -> ModelShape:
    """
    Parse 'LEVELS;m=<m>;k=<k>[;ff=<n>][;ft=<n>]'.

    Raises:
        ShapeError: malformed text or invalid shape
    """
    parts = [p.strip() for p in text.strip().split(';')]
    if not parts or not parts[0]:
        raise ShapeError(f"syntax: missing levels in {text!r}")

    levels = []
    for item in parts[0].split(','):
        match = _LEVEL_RE.match(item.strip())
        if not match:
            raise ShapeError(f"syntax: level {item!r} is not '<h>x<w>'")
        levels.append((int(match.group(1)), int(match.group(2))))

    fields: Dict[str, int] = {}
    for part in parts[1:]:
        if not part:
            continue
        key, sep, value = part.partition('=')
        key = key.strip()
        if not sep or key not in ('m', 'k', 'ff', 'ft'):
            raise ShapeError(f"syntax: unknown field {part!r}")
        if key in fields:
            raise ShapeError(f"syntax: field {key!r} given twice")
        try:
            fields[key] = int(value)
        except ValueError:
            raise ShapeError(f"syntax: field {key!r} needs an integer, got {value!r}")

    for required in ('m', 'k'):
        if required not in fields:
            raise ShapeError(f"syntax: missing field {required!r} in {text!r}")

    shape = ModelShape(
        levels=tuple(levels),
        leaf_m=fields['m'],
        top_k=fields['k'],
        fix_false=fields.get('ff', 0),
        fix_true=fields.get('ft', 0)
    )
    if validate:
        shape.validate()
    return shape


def bottom_count(shape: ModelShape) -> int:
    return shape.bottom_count


def derived_params(shape: ModelShape) -> Tuple[int, int]:
    return shape.derived_params()


def chain_shape(n: int) -> ModelShape:
    """
    2x2 chain realizing approximate-at-most-1/2-of-n.

    n must be a power of two >= 8; the chain has log2(n) - 2 levels of 2x2
    nodes above leaf groups of four.
    """
    if n < 8 or n & (n - 1):
        raise ShapeError(f"chain: n must be a power of two >= 8, got {n}")
    depth = n.bit_length() - 2
    return ModelShape(levels=((2, 2),) * (depth - 1), leaf_m=2, top_k=2)


# =============================================================================
# LAYOUT
# =============================================================================

@dataclass
class TreeNode:
    """One internal node: a matrix stored column by column."""

    level: int
    index: int
    columns: List[Tuple[Var, ...]]

    @property
    def variables(self) -> Tuple[Var, ...]:
        return tuple(v for column in self.columns for v in column)


@dataclass
class Link:
    """A parent column bounding the true-count of its child group."""

    column: Tuple[Var, ...]
    child_vars: Tuple[Var, ...]
    factor: int

    def constraints(self) -> Iterator[GuardedAtMost]:
        """not v_j -> at-most-(factor*(j-1)); vacuous bounds are skipped."""
        for j, guard in enumerate(self.column):
            bound = self.factor * j
            if bound >= len(self.child_vars):
                continue
            yield GuardedAtMost(vars=self.child_vars, bound=bound, guard=guard)


@dataclass
class TreeLayout:
    """Variables of a built model and how they are wired."""

    shape: ModelShape
    levels: List[List[TreeNode]]
    leaf_groups: List[Tuple[Var, ...]]
    links: List[Link]
    bottom_vars: List[Var]
    pinned: Dict[Var, bool] = field(default_factory=dict)

    @property
    def top(self) -> TreeNode:
        return self.levels[0][0]

    @property
    def target_vars(self) -> List[Var]:
        return [v for v in self.bottom_vars if v not in self.pinned]

    def internal_nodes(self) -> Iterator[TreeNode]:
        for level in self.levels:
            yield from level


def build_layout(shape: ModelShape, cnf: Cnf) -> TreeLayout:
    """
    Allocate and wire the variables of a model.

    Bottom variables are allocated first as targets, left to right; the
    last fix_true of them are pinned true and the fix_false before those
    pinned false. Internal matrices follow as auxiliaries, top-down and
    left to right, column by column.
    """
    shape.validate()
    geometry = shape.geometry()

    bottom = cnf.alloc_vars(shape.bottom_count, ROLE_TARGET)
    pinned: Dict[Var, bool] = {}
    true_start = len(bottom) - shape.fix_true
    false_start = true_start - shape.fix_false
    for var in bottom[false_start:true_start]:
        pinned[var] = False
    for var in bottom[true_start:]:
        pinned[var] = True

    levels: List[List[TreeNode]] = []
    for depth, geo in enumerate(geometry, 1):
        nodes = []
        for index in range(geo.nodes):
            columns = [tuple(cnf.alloc_vars(geo.h)) for _ in range(geo.w)]
            nodes.append(TreeNode(level=depth, index=index, columns=columns))
        levels.append(nodes)

    size = shape.leaf_size
    leaf_groups = [tuple(bottom[g:g + size]) for g in range(0, len(bottom), size)]

    links: List[Link] = []
    for depth, geo in enumerate(geometry):
        for node in levels[depth]:
            for c, column in enumerate(node.columns):
                child_index = node.index * geo.w + c
                if depth + 1 < len(levels):
                    child_vars = levels[depth + 1][child_index].variables
                else:
                    child_vars = leaf_groups[child_index]
                links.append(Link(column=column, child_vars=child_vars, factor=geo.factor))

    return TreeLayout(shape=shape, levels=levels, leaf_groups=leaf_groups,
                      links=links, bottom_vars=bottom, pinned=pinned)


# =============================================================================
# ENCODING
# =============================================================================

@dataclass
class EncodingResult:
    """A built model: formula, unpinned targets and the derived (k, n)."""

    cnf: Cnf
    target_vars: List[Var]
    derived_k: int
    derived_n: int
    shape: ModelShape
    layout: Optional[TreeLayout] = None

    @property
    def stats(self) -> CnfStats:
        return self.cnf.stats()


def encode_approx(shape: ModelShape) -> EncodingResult:
    """
    Emit the CNF of a model on a fresh formula.

    Order: top at-most, column order encodings, guarded link constraints,
    unit clauses of pinned bottom variables.
    """
    k, n = shape.derived_params()
    cnf = new_formula()
    layout = build_layout(shape, cnf)

    at_most_binomial(cnf, layout.top.variables, shape.top_k)

    for node in layout.internal_nodes():
        for column in node.columns:
            order_column(cnf, column)

    for link in layout.links:
        for constraint in link.constraints():
            constraint.emit(cnf)

    for var in sorted(layout.pinned):
        cnf.add_clause((var if layout.pinned[var] else -var,))

    logger.debug(f"encoded {format_shape(shape)}: {cnf.stats().summary()}")
    return EncodingResult(cnf=cnf, target_vars=layout.target_vars,
                          derived_k=k, derived_n=n, shape=shape, layout=layout)


def predicted_stats(shape: ModelShape) -> CnfStats:
    """Closed-form size of encode_approx(shape) without building it."""
    shape.validate()
    aux = 0
    clauses = 0
    literals = 0

    top_clauses = comb(shape.top_size, shape.top_k + 1)
    clauses += top_clauses
    literals += top_clauses * (shape.top_k + 1)

    for geo in shape.geometry():
        columns = geo.nodes * geo.w
        aux += columns * geo.h
        clauses += columns * (geo.h - 1)
        literals += columns * (geo.h - 1) * 2

        per_column_clauses = 0
        per_column_literals = 0
        for j in range(geo.h):
            bound = geo.factor * j
            if bound >= geo.child_size:
                continue
            count = comb(geo.child_size, bound + 1)
            per_column_clauses += count
            per_column_literals += count * (bound + 2)
        clauses += columns * per_column_clauses
        literals += columns * per_column_literals

    clauses += shape.pinned_count
    literals += shape.pinned_count

    return CnfStats(variables=shape.bottom_count + aux, aux_variables=aux,
                    clauses=clauses, literals=literals)


# =============================================================================
# SHAPE ENUMERATION
# =============================================================================

@dataclass(frozen=True)
class SearchBounds:
    """Limits of the shape search space."""

    max_levels: int = 2
    max_h: int = 4
    max_w: int = 4
    max_leaf_m: int = 6

    @classmethod
    def from_config(cls, **overrides) -> 'SearchBounds':
        """Bounds from the 'search' config section; None overrides are ignored."""
        section = config.search
        values = {
            'max_levels': section.get('max_levels', cls.max_levels),
            'max_h': section.get('max_h', cls.max_h),
            'max_w': section.get('max_w', cls.max_w),
            'max_leaf_m': section.get('max_leaf_m', cls.max_leaf_m),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def _level_sequences(bounds: SearchBounds) -> Iterator[Tuple[Tuple[int, int], ...]]:
    cells = [(h, w) for h in range(1, bounds.max_h + 1) for w in range(1, bounds.max_w + 1)]
    for depth in range(1, bounds.max_levels + 1):
        for levels in product(cells, repeat=depth):
            if all((levels[i][0] * levels[i][1]) % levels[i - 1][0] == 0
                   for i in range(1, depth)):
                yield levels


def enumerate_shapes(k: int, n: int, bounds: Optional[SearchBounds] = None) -> List[ModelShape]:
    """
    Every shape within bounds realizing approximate-at-most-k of n.

    For a fixed (levels, leaf_m, top_k) the fixes are determined:
    fix_true = raw_k - k, fix_false = bottom - n - fix_true.

    Returns:
        Shapes ordered by fewest levels, then lexicographically
    """
    if not 0 < k < n:
        raise ShapeError(f"search: need 0 < k < n, got k={k}, n={n}")
    bounds = bounds or SearchBounds.from_config()

    shapes = set()
    for levels in _level_sequences(bounds):
        top_size = levels[0][0] * levels[0][1]
        width_product = prod(w for _, w in levels)
        for leaf_m in range(1, bounds.max_leaf_m + 1):
            bottom = width_product * levels[-1][0] * leaf_m
            if bottom < n:
                continue
            for top_k in range(top_size + 1):
                if (top_k * bottom) % top_size:
                    continue
                fix_true = top_k * bottom // top_size - k
                fix_false = bottom - n - fix_true
                if fix_true < 0 or fix_false < 0:
                    continue
                shapes.add(ModelShape(levels=levels, leaf_m=leaf_m, top_k=top_k,
                                      fix_false=fix_false, fix_true=fix_true))

    result = sorted(shapes, key=lambda s: s.sort_key)
    logger.info(f"enumerated {len(result)} shapes for k={k}, n={n} within {bounds}")
    return result
