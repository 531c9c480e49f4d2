import argparse
import json
from typing import Any, Dict, Tuple

from careerconcerns.errors import DomainError


def kv_pair(raw: str) -> Tuple[str, str]:
    """
    Parse a string of the form 'key=value' and return a tuple (key, value).
    """
    if '=' not in raw:
        msg = f'{raw} is not a valid key=value pair'
        raise argparse.ArgumentTypeError(msg)

    key, value = raw.split("=", 1)
    return key, value


def decode_value(raw: str) -> Any:
    """JSON-decodes an override value, falling back to the raw string (so ``regime=naive`` works unquoted)."""
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def set_dotted(document: Dict[str, Any], key: str, value: Any):
    """Sets ``document[a][b][c] = value`` for key 'a.b.c', creating intermediate sections."""
    *sections, leaf = key.split('.')
    node = document
    for section in sections:
        child = node.setdefault(section, {})
        if not isinstance(child, dict):
            raise DomainError(f'Cannot set {key}: {section} is not a section')
        node = child
    node[leaf] = value
