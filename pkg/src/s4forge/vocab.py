"""Pluggable token vocabulary for the attribute-value filter.

File format: sentencepiece-style text, one piece per line, optionally
followed by a tab and a score (which is ignored). A string is considered
representable when it can be segmented entirely into known pieces — the
stand-in for "does not map to the unknown token" that avoids depending on
any specific tokenizer ecosystem.
"""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

WORD_BOUNDARY = "▁"  # sentencepiece '▁'

_CONTROL_PIECES = {"<unk>", "<s>", "</s>", "<pad>"}


class Vocabulary:
    def __init__(self, pieces: set[str]):
        pieces = {p for p in pieces if p and p not in _CONTROL_PIECES}
        if not pieces:
            raise ValueError("vocabulary has no usable pieces")
        self._pieces = frozenset(pieces)
        self._max_len = max(len(p) for p in pieces)

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        pieces = set()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line:
                continue
            pieces.add(line.split("\t", 1)[0])
        return cls(pieces)

    def __len__(self) -> int:
        return len(self._pieces)

    def __contains__(self, piece: str) -> bool:
        return piece in self._pieces

    def _segmentable(self, text: str) -> bool:
        # DP over cut points; True when text splits fully into pieces.
        n = len(text)
        ok = [False] * (n + 1)
        ok[0] = True
        for i in range(1, n + 1):
            for j in range(max(0, i - self._max_len), i):
                if ok[j] and text[j:i] in self._pieces:
                    ok[i] = True
                    break
        return ok[n]

    @lru_cache(maxsize=4096)
    def is_representable(self, token: str) -> bool:
        """True when *token* can be encoded without the unknown token."""
        if not token:
            return False
        return self._segmentable(WORD_BOUNDARY + token) or self._segmentable(token)
