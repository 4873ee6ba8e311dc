"""
Bit-string addressing on a finite binary tree.

A node is the path from the root as a string over {"0", "1"}; the root Λ is "".
"""

from __future__ import annotations

from typing import Iterator, List, Tuple

from flowgame.errors import OutOfTree

NodeId = str
ROOT: NodeId = ""


def is_node(text: str) -> bool:
    return all(ch in "01" for ch in text)


def check_node(node: NodeId, height: int) -> NodeId:
    if not isinstance(node, str) or not is_node(node):
        raise OutOfTree(str(node), "not a bit string")
    if len(node) > height:
        raise OutOfTree(node, f"depth {len(node)} exceeds tree height {height}")
    return node


def depth(node: NodeId) -> int:
    return len(node)


def children(node: NodeId) -> Tuple[NodeId, NodeId]:
    return node + "0", node + "1"


def parent(node: NodeId) -> NodeId:
    if not node:
        raise OutOfTree(node, "the root has no parent")
    return node[:-1]


def sibling(node: NodeId) -> NodeId:
    if not node:
        raise OutOfTree(node, "the root has no sibling")
    return node[:-1] + ("1" if node[-1] == "0" else "0")


def prefixes(node: NodeId) -> List[NodeId]:
    """Λ, then every proper prefix, then the node itself."""
    return [node[:i] for i in range(len(node) + 1)]


def is_prefix(x: NodeId, y: NodeId) -> bool:
    return y.startswith(x)


def leftmost_leaf(node: NodeId, height: int) -> NodeId:
    return node + "0" * (height - len(node))


def iter_nodes(height: int) -> Iterator[NodeId]:
    """All nodes breadth-first; only sensible for small heights."""
    level = [ROOT]
    for _ in range(height + 1):
        yield from level
        level = [child for node in level for child in children(node)]


def iter_leaves(height: int) -> Iterator[NodeId]:
    for bits in range(1 << height):
        yield format(bits, f"0{height}b") if height else ROOT
