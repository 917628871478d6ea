"""Words over N non-commuting generators.

A word is a finite tuple of letters from {1, ..., N}; the empty word is the
unit. Words are ordered graded-lexicographically: first by length, then
letter-by-letter. The involution reverses a word.

Serialized form: letters joined by dots ("1.2.1"); the empty word is "e".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import ValidationError


@dataclass(frozen=True)
class Word:
    letters: tuple[int, ...] = field(default=())

    def __post_init__(self):
        letters = tuple(int(l) for l in self.letters)
        if any(l < 1 for l in letters):
            raise ValidationError(f"letters must be >= 1, got {letters}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def of(cls, *letters: int) -> "Word":
        return cls(tuple(letters))

    @classmethod
    def parse(cls, text: str, n_generators: int | None = None) -> "Word":
        """Parse the dotted serialization; "e" is the empty word."""
        text = text.strip()
        if text == "e":
            return cls()
        try:
            letters = tuple(int(part) for part in text.split("."))
        except ValueError:
            raise ValidationError(f"cannot parse word {text!r}") from None
        w = cls(letters)
        if n_generators is not None and any(l > n_generators for l in letters):
            raise ValidationError(f"word {text!r} uses letters beyond {n_generators} generators")
        return w

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        return ".".join(str(l) for l in self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    # graded-lex order: by length, then lexicographically
    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return (len(self.letters), self.letters)

    def __lt__(self, other: "Word") -> bool:
        return self.sort_key() < other.sort_key()

    def __le__(self, other: "Word") -> bool:
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other: "Word") -> bool:
        return self.sort_key() > other.sort_key()

    def __ge__(self, other: "Word") -> bool:
        return self.sort_key() >= other.sort_key()


EMPTY = Word()


def involution(w: Word) -> Word:
    """Reverse a word: the anti-automorphism fixing the generators."""
    return Word(w.letters[::-1])


def concat(u: Word, v: Word) -> Word:
    return Word(u.letters + v.letters)


def successor(w: Word, n_generators: int) -> Word:
    """Next word in graded-lex order over n_generators letters."""
    if n_generators < 1:
        raise ValueError("n_generators must be >= 1")
    letters = list(w.letters)
    for i in range(len(letters) - 1, -1, -1):
        if letters[i] < n_generators:
            letters[i] += 1
            return Word(tuple(letters[: i + 1]) + (1,) * (len(letters) - i - 1))
    return Word((1,) * (len(letters) + 1))


def predecessor(w: Word, n_generators: int) -> Word:
    """Previous word in graded-lex order; the empty word has none."""
    if n_generators < 1:
        raise ValueError("n_generators must be >= 1")
    if not w.letters:
        raise ValueError("the empty word has no predecessor")
    letters = list(w.letters)
    for i in range(len(letters) - 1, -1, -1):
        if letters[i] > 1:
            letters[i] -= 1
            return Word(tuple(letters[: i + 1]) + (n_generators,) * (len(letters) - i - 1))
    return Word((n_generators,) * (len(letters) - 1))


def enumerate_level(n: int, n_generators: int) -> list[Word]:
    """All words of length n, lexicographically."""
    if n < 0:
        raise ValueError("level must be >= 0")
    return [Word(p) for p in itertools.product(range(1, n_generators + 1), repeat=n)]


def words_up_to(level: int, n_generators: int) -> list[Word]:
    """All words of length <= level in graded-lex order."""
    out: list[Word] = []
    for n in range(level + 1):
        out.extend(enumerate_level(n, n_generators))
    return out


def word_index(w: Word, n_generators: int) -> int:
    """Rank of w within its own level, 0-based."""
    idx = 0
    for l in w.letters:
        if l > n_generators:
            raise ValueError(f"letter {l} exceeds {n_generators} generators")
        idx = idx * n_generators + (l - 1)
    return idx


def word_at(n: int, rank: int, n_generators: int) -> Word:
    """Inverse of word_index: the rank-th word of length n."""
    if not 0 <= rank < n_generators**n:
        raise ValueError(f"rank {rank} out of range for level {n}")
    letters = []
    for _ in range(n):
        rank, r = divmod(rank, n_generators)
        letters.append(r + 1)
    return Word(tuple(reversed(letters)))


def global_index(w: Word, n_generators: int) -> int:
    """Position of w in the graded-lex enumeration of all words."""
    offset = sum(n_generators**m for m in range(len(w.letters)))
    return offset + word_index(w, n_generators)
