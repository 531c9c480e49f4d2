from collections import defaultdict

from typing import Dict, Any

Tree = Dict[str, 'Tree'] | Any


def tree() -> Tree:
    return defaultdict(tree)


def to_plain(a_tree: Tree) -> Any:
    """Converts a :func:`tree` (and anything nested in it) back into plain dicts, so it can be
    compared or handed to a JSON encoder."""
    if isinstance(a_tree, dict):
        return {key: to_plain(value) for key, value in a_tree.items()}
    return a_tree
