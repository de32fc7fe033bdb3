"""Marked trivalent trees and their balanced subfamily.

A tree of genus g is stored as a rooted full binary tree whose leaves carry
the labels 1..g-1 exactly once (the marked root leaf g of the trivalent
picture is erased; the vertex next to it becomes the binary root).  Trees are
kept in canonical form: at every internal node the children are ordered by
descendant leaf set, larger set first, ties broken lexicographically on the
sorted element lists.  The same key orders the internal nodes themselves;
position 1 of the canonical node ordering is always the root.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .errors import TreeError

# A node is either a leaf label or a pair of child nodes.
Node = Union[int, tuple]


def _leaf_labels(node: Node) -> frozenset[int]:
    if isinstance(node, int):
        return frozenset((node,))
    return _leaf_labels(node[0]) | _leaf_labels(node[1])


def _set_sort_key(s: Iterable[int]) -> tuple[int, tuple[int, ...]]:
    elems = tuple(sorted(s))
    return (-len(elems), elems)


def _canonicalize(node: Node) -> tuple[Node, tuple[int, ...]]:
    """Return (canonical node, sorted leaf labels)."""
    if isinstance(node, int):
        return node, (node,)
    a, la = _canonicalize(node[0])
    b, lb = _canonicalize(node[1])
    if _set_sort_key(la) > _set_sort_key(lb):
        a, b = b, a
    return (a, b), tuple(sorted(la + lb))


def _render(node: Node) -> str:
    if isinstance(node, int):
        return str(node)
    return f"({_render(node[0])},{_render(node[1])})"


@dataclass(frozen=True)
class Tree:
    """Canonical rooted full binary tree with leaves labeled 1..genus-1."""

    root: Node
    genus: int

    def __post_init__(self) -> None:
        labels = _validate_node(self.root)
        n = len(labels)
        if n < 2:
            raise TreeError("a tree needs at least 2 leaves (genus >= 3)")
        if labels != set(range(1, n + 1)):
            raise TreeError(f"leaf labels must be exactly 1..{n}, got {sorted(labels)}")
        if self.genus != n + 1:
            raise TreeError(f"genus {self.genus} does not match {n} leaves (expected {n + 1})")

    @classmethod
    def from_node(cls, node: Node) -> Tree:
        """Build a canonical Tree from a nested node structure."""
        canonical, labels = _canonicalize(node)
        return cls(root=canonical, genus=len(labels) + 1)

    @classmethod
    def from_string(cls, text: str) -> Tree:
        return parse_tree(text)

    def render(self) -> str:
        return _render(self.root)

    def descendant_sets(self) -> tuple[frozenset[int], ...]:
        return descendant_sets(self)

    def is_balanced(self) -> bool:
        return is_balanced(self)

    def to_json(self) -> dict:
        return tree_to_json(self)

    def __str__(self) -> str:
        return self.render()


def _validate_node(node: Node) -> set[int]:
    """Check structure and canonical child order; return the leaf label set."""
    if isinstance(node, int):
        if node < 1:
            raise TreeError(f"leaf labels must be positive, got {node}")
        return {node}
    if not (isinstance(node, tuple) and len(node) == 2):
        raise TreeError("internal nodes must have exactly two children")
    left = _validate_node(node[0])
    right = _validate_node(node[1])
    if left & right:
        raise TreeError(f"duplicate leaf label {sorted(left & right)[0]}")
    if _set_sort_key(left) > _set_sort_key(right):
        raise TreeError("children are not in canonical order")
    return left | right


def parse_tree(text: str) -> Tree:
    """Parse `TREE := LEAF | "(" TREE "," TREE ")"` into a canonical Tree.

    Whitespace is ignored and the child order of the input is irrelevant.
    Raises TreeError on malformed syntax, duplicate labels, labels that are
    not exactly 1..n, or fewer than two leaves.
    """
    s = "".join(text.split())
    pos = 0

    def parse_node() -> Node:
        nonlocal pos
        if pos >= len(s):
            raise TreeError("unexpected end of input")
        if s[pos] == "(":
            pos += 1
            a = parse_node()
            if pos >= len(s) or s[pos] != ",":
                raise TreeError(f"expected ',' at position {pos}")
            pos += 1
            b = parse_node()
            if pos >= len(s) or s[pos] != ")":
                raise TreeError(f"expected ')' at position {pos}")
            pos += 1
            return (a, b)
        start = pos
        while pos < len(s) and s[pos].isdigit():
            pos += 1
        if pos == start:
            raise TreeError(f"expected a leaf label at position {pos}")
        return int(s[start:pos])

    node = parse_node()
    if pos != len(s):
        raise TreeError(f"trailing input at position {pos}")
    if isinstance(node, int):
        raise TreeError("a tree needs at least 2 leaves (genus >= 3)")
    # duplicate labels surface with a clearer message than the range check
    seen: set[int] = set()
    for lab in _iter_leaves(node):
        if lab in seen:
            raise TreeError(f"duplicate leaf label {lab}")
        seen.add(lab)
    return Tree.from_node(node)


def _iter_leaves(node: Node) -> Iterator[int]:
    if isinstance(node, int):
        yield node
    else:
        yield from _iter_leaves(node[0])
        yield from _iter_leaves(node[1])


def render_tree(t: Tree) -> str:
    """Canonical text form; parse_tree(render_tree(t)) == t."""
    return t.render()


@functools.lru_cache(maxsize=None)
def descendant_sets(t: Tree) -> tuple[frozenset[int], ...]:
    """Descendant leaf sets of the internal nodes, in canonical ordering.

    Ordering: size descending, ties broken lexicographically on the sorted
    element lists.  The first entry is always the full set {1..g-1}.
    """
    sets: list[frozenset[int]] = []

    def walk(node: Node) -> frozenset[int]:
        if isinstance(node, int):
            return frozenset((node,))
        leaves = walk(node[0]) | walk(node[1])
        sets.append(leaves)
        return leaves

    walk(t.root)
    sets.sort(key=_set_sort_key)
    return tuple(sets)


@functools.lru_cache(maxsize=None)
def node_depths(t: Tree) -> tuple[int, ...]:
    """Depth (edge distance from the root) per canonical node position."""
    depth_of: dict[frozenset[int], int] = {}

    def walk(node: Node, depth: int) -> frozenset[int]:
        if isinstance(node, int):
            return frozenset((node,))
        leaves = walk(node[0], depth + 1) | walk(node[1], depth + 1)
        depth_of[leaves] = depth
        return leaves

    walk(t.root, 0)
    return tuple(depth_of[s] for s in descendant_sets(t))


@functools.lru_cache(maxsize=None)
def balance_report(t: Tree) -> tuple[bool, ...]:
    """Per-node balance flags, indexed by canonical node position.

    A node is balanced when its two smallest descendant leaf labels lie in
    different child subtrees.
    """
    flag_of: dict[frozenset[int], bool] = {}

    def walk(node: Node) -> frozenset[int]:
        if isinstance(node, int):
            return frozenset((node,))
        left = walk(node[0])
        right = walk(node[1])
        leaves = left | right
        lo, second = sorted(leaves)[:2]
        flag_of[leaves] = (lo in left) != (second in left)
        return leaves

    walk(t.root)
    return tuple(flag_of[s] for s in descendant_sets(t))


def is_balanced(t: Tree) -> bool:
    """True iff every internal node separates its two smallest descendants."""
    return all(balance_report(t))


def enumerate_trees(g: int) -> list[Tree]:
    """All genus-g trees, in lexicographic order of their canonical strings.

    There are (2g-5)!! of them.  Built by leaf insertion: every tree on
    leaves 1..m arises uniquely by attaching leaf m at one of the 2m-3 nodes
    of a tree on leaves 1..m-1.
    """
    if g < 3:
        raise TreeError(f"genus must be at least 3, got {g}")
    n = g - 1
    shapes: list[Node] = [(1, 2)]
    for m in range(3, n + 1):
        grown: list[Node] = []
        for shape in shapes:
            for pos in range(_node_count(shape)):
                grown.append(_canonicalize(_insert_leaf(shape, pos, m)[0])[0])
        shapes = grown
    trees = [Tree.from_node(shape) for shape in shapes]
    trees.sort(key=Tree.render)
    return trees


def _node_count(node: Node) -> int:
    if isinstance(node, int):
        return 1
    return 1 + _node_count(node[0]) + _node_count(node[1])


def _insert_leaf(node: Node, pos: int, label: int) -> tuple[Node, int]:
    """Attach `label` at preorder node `pos` (pairing it with that subtree)."""
    if pos == 0:
        return (node, label), -1
    if isinstance(node, int):
        return node, pos - 1
    left, pos = _insert_leaf(node[0], pos - 1, label)
    if pos < 0:
        return (left, node[1]), -1
    right, pos = _insert_leaf(node[1], pos, label)
    if pos < 0:
        return (node[0], right), -1
    return node, pos


def enumerate_balanced(g: int) -> list[Tree]:
    """The (g-2)! balanced trees of genus g, same order as enumerate_trees."""
    return [t for t in enumerate_trees(g) if is_balanced(t)]


def tree_from_sets(sets: Iterable[frozenset[int]]) -> Tree:
    """Reconstruct the tree whose internal descendant sets are `sets`.

    Inverse of descendant_sets: the family must be laminar, contain the full
    set {1..g-1}, and describe a full binary tree (g-2 sets, all of size >= 2).
    """
    family = [frozenset(s) for s in sets]
    if not family:
        raise TreeError("empty set family")
    family.sort(key=_set_sort_key)
    full = family[0]
    if len(set(family)) != len(family):
        raise TreeError("descendant sets must be pairwise distinct")
    if full != frozenset(range(1, len(full) + 1)):
        raise TreeError("the largest set must be {1..g-1}")
    if len(family) != len(full) - 1:
        raise TreeError(f"expected {len(full) - 1} sets for {len(full)} leaves")

    def build(current: frozenset[int], rest: list[frozenset[int]]) -> Node:
        if len(current) == 1:
            return next(iter(current))
        children = [s for s in rest if s < current]
        maximal = [s for s in children if not any(s < o for o in children)]
        if any(s & o for s in maximal for o in maximal if s is not o):
            raise TreeError("set family is not laminar")
        covered = frozenset().union(*maximal) if maximal else frozenset()
        parts = maximal + [frozenset((x,)) for x in current - covered]
        if len(parts) != 2:
            raise TreeError("set family does not describe a full binary tree")
        return (build(parts[0], children), build(parts[1], children))

    return Tree.from_node(build(full, family[1:]))


def tree_to_json(t: Tree) -> dict:
    """JSON form: genus, canonical string, and canonical-ordered node sets."""
    return {
        "g": t.genus,
        "newick": t.render(),
        "nodes": [sorted(s) for s in descendant_sets(t)],
    }
