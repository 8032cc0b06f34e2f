"""Reduced words over {1, 2, 3} and the tree order.

A word is a tuple of 1-based letters with no equal adjacent letters.
``word_product`` implements the append-or-cancel product w[l].
"""

from __future__ import annotations

from .errors import DomainError

Word = tuple

LETTERS = (1, 2, 3)


def is_reduced(word) -> bool:
    word = tuple(word)
    return all(l in LETTERS for l in word) and all(
        word[i] != word[i + 1] for i in range(len(word) - 1)
    )


def check_reduced(word) -> tuple:
    word = tuple(word)
    if not is_reduced(word):
        raise DomainError(f"{word} is not a reduced word over 1,2,3")
    return word


def word_product(word, letters) -> tuple:
    """w[l1,...,lm]: append each letter, cancelling against an equal tail."""
    out = list(check_reduced(word))
    for l in letters:
        if l not in LETTERS:
            raise DomainError(f"letter must be 1, 2 or 3, got {l}")
        if out and out[-1] == l:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


def is_prefix(shorter, longer) -> bool:
    """The tree partial order: w <= u iff w is a prefix of u."""
    shorter, longer = tuple(shorter), tuple(longer)
    return len(shorter) <= len(longer) and longer[: len(shorter)] == shorter


def extensions(word):
    """Letters l with |w[l]| > |w|, i.e. the children of w in the tree."""
    word = tuple(word)
    if not word:
        return LETTERS
    return tuple(l for l in LETTERS if l != word[-1])
