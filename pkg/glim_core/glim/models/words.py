"""Reduced words of the free group F_d.

A letter is a signed generator index: ``i`` stands for g_i and ``-i`` for
g_i⁻¹ (1 <= i <= d). Words are tuples, so they hash and sort like tuples.
"""
from typing import Iterable, Iterator, List, Sequence


class Word(tuple):
    """Reduced word: no letter is followed by its inverse."""

    def __new__(cls, letters: Iterable[int] = ()):
        return super().__new__(cls, reduce_letters(letters))

    @classmethod
    def _trusted(cls, letters: Sequence[int]) -> "Word":
        return super().__new__(cls, letters)

    @classmethod
    def identity(cls) -> "Word":
        return IDENTITY

    @classmethod
    def generator(cls, i: int) -> "Word":
        if i == 0:
            raise ValueError("Invalid letter 0")
        return cls._trusted((i,))

    @property
    def length(self) -> int:
        return len(self)

    def is_identity(self) -> bool:
        return len(self) == 0

    def inverse(self) -> "Word":
        return Word._trusted(tuple(-letter for letter in reversed(self)))

    def rank(self) -> int:
        """Largest generator index appearing in the word."""
        return max((abs(letter) for letter in self), default=0)

    def __mul__(self, other):
        if isinstance(other, Word):
            return word_concat(self, other)
        return NotImplemented

    def __repr__(self):
        if not self:
            return "e"
        return "".join(
            f"g{letter}" if letter > 0 else f"g{-letter}^-1" for letter in self
        )

    def token(self) -> str:
        """Compact signed-integer form, e.g. '1.-2'."""
        return ".".join(str(letter) for letter in self)

    def to_list(self) -> List[int]:
        return list(self)


def reduce_letters(letters: Iterable[int]) -> tuple:
    stack: List[int] = []
    for letter in letters:
        letter = int(letter)
        if letter == 0:
            raise ValueError("Invalid letter 0")
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


IDENTITY = Word._trusted(())


def word_concat(u: Word, w: Word) -> Word:
    """Reduced form of the concatenation ``u w``.

    Only the junction can cancel since both inputs are reduced.
    """
    i = 0
    limit = min(len(u), len(w))
    while i < limit and u[len(u) - 1 - i] == -w[i]:
        i += 1
    return Word._trusted(u[: len(u) - i] + w[i:])


def free_generators(d: int) -> List[Word]:
    """S = {g_1, ..., g_d, g_1⁻¹, ..., g_d⁻¹} in this order."""
    return [Word.generator(i) for i in range(1, d + 1)] + [
        Word.generator(-i) for i in range(1, d + 1)
    ]


def enumerate_reduced_words(
    d: int, max_length: int, min_length: int = 0
) -> Iterator[Word]:
    """All reduced words with min_length <= |w| <= max_length, by length."""
    letters = [i for i in range(1, d + 1)] + [-i for i in range(1, d + 1)]
    layer = [IDENTITY]
    for length in range(max_length + 1):
        if length >= min_length:
            yield from layer
        layer = [
            Word._trusted(w + (letter,))
            for w in layer
            for letter in letters
            if not w or w[-1] != -letter
        ]


def count_reduced_words(d: int, length: int) -> int:
    if length == 0:
        return 1
    return 2 * d * (2 * d - 1) ** (length - 1)


def parse_word(text) -> Word:
    """Accepts a list of ints, a token like '1.-2', or 'e'."""
    if isinstance(text, Word):
        return text
    if isinstance(text, (list, tuple)):
        return Word(text)
    text = str(text).strip()
    if text in ("", "e"):
        return IDENTITY
    try:
        return Word(int(part) for part in text.split("."))
    except ValueError as err:
        raise ValueError(f"Invalid word {text!r}") from err
