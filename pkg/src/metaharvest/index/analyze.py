"""Text analysis for indexing and querying.

One analyzer for everything: Unicode-aware lowercasing, then splitting on any
non-alphanumeric character. Digits survive, underscores do not, and there is
no stemming or stopword removal, so index-side and query-side token streams
always agree.
"""

from __future__ import annotations

import re

# \w minus underscore == Unicode alphanumerics
_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    if not text:
        return []
    return _TOKEN.findall(text.lower())
