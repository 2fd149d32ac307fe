"""Exact word algebra for a free group of rank N.

Words are tuples of nonzero signed integers: letter ``+i`` is the i-th
generator (1-based), ``-i`` its inverse.  Everything downstream (marked
graphs, currents, walks) rests on the free/cyclic reduction implemented
here, so the hot paths are written to run at memcpy speed: reduced blocks
are stitched with ``list.extend`` and only the interface letters are
inspected for cancellation.

Words can reach millions of letters along a random walk, so all word
operations are linear-time (least cyclic rotation uses Booth's algorithm,
periods use the KMP failure function).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import InputError, InternalError, ResourceError

Letters = tuple  # tuple[int, ...]; kept untyped inside for speed

_DEFAULT_NAMES = ("x", "y", "z")


@dataclass(frozen=True)
class Basis:
    """A fixed ordered basis of the free group F_N, N >= 2."""

    rank: int
    names: tuple = ()

    def __post_init__(self):
        if self.rank < 2:
            raise InputError(f"rank must be >= 2, got {self.rank}")
        if not self.names:
            if self.rank <= len(_DEFAULT_NAMES):
                names = _DEFAULT_NAMES[: self.rank]
            else:
                names = tuple(f"x{i}" for i in range(1, self.rank + 1))
            object.__setattr__(self, "names", names)
        if len(self.names) != self.rank:
            raise InputError(
                f"{len(self.names)} generator names for rank {self.rank}"
            )
        if len(set(self.names)) != self.rank:
            raise InputError(f"generator names not distinct: {self.names}")

    def check_letters(self, letters: Iterable[int]) -> None:
        for t in letters:
            if not isinstance(t, int) or t == 0 or abs(t) > self.rank:
                raise InputError(f"letter {t!r} not valid for rank {self.rank}")


# ---------------------------------------------------------------------------
# raw letter-sequence operations


def push_block(out: list, seq: Sequence) -> None:
    """Append a freely reduced block to a freely reduced list, cancelling
    only at the interface.  The interior of ``seq`` is copied in bulk."""
    i = 0
    n = len(seq)
    while i < n and out and out[-1] == -seq[i]:
        out.pop()
        i += 1
    if i:
        out.extend(seq[i:])
    else:
        out.extend(seq)


def reduce_word(raw: Iterable[int]) -> Letters:
    """Freely reduce a letter sequence.

    >>> reduce_word((1, 2, -2))
    (1,)
    >>> reduce_word(())
    ()
    >>> reduce_word((-1, 1, 2))
    (2,)
    """
    out = []
    for t in raw:
        if out and out[-1] == -t:
            out.pop()
        else:
            out.append(t)
    return tuple(out)


def inverse_word(w: Sequence) -> Letters:
    return tuple(-t for t in reversed(w))


def concat(*words: Sequence) -> Letters:
    out: list = []
    for w in words:
        push_block(out, w)
    return tuple(out)


def cyclic_reduce_letters(w: Sequence) -> tuple:
    """Split a reduced word as conjugator * core * conjugator^-1.

    Returns ``(core, conjugator)`` with the core cyclically reduced.
    """
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return tuple(w[i:j]), tuple(w[:i])


def _letter_key(t: int) -> int:
    # order: by generator index, then + before -
    return 2 * abs(t) - (t > 0)


def _least_rotation(keys: Sequence[int]) -> int:
    """Index of the lexicographically least rotation (Booth's algorithm)."""
    n = len(keys)
    if n == 0:
        return 0
    s = list(keys) + list(keys)
    f = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k


def _canonical_rotation_of(w: Sequence) -> Letters:
    k = _least_rotation([_letter_key(t) for t in w])
    return tuple(w[k:]) + tuple(w[:k])


def canonical_cyclic(w: Sequence) -> Letters:
    """Least representative over all rotations of w and of w^-1, letters
    ordered by generator index with + before -.  Linear time."""
    if not w:
        return ()
    a = _canonical_rotation_of(w)
    b = _canonical_rotation_of(inverse_word(w))
    ka = [_letter_key(t) for t in a]
    kb = [_letter_key(t) for t in b]
    return a if ka <= kb else b


def cyclic_period(w: Sequence) -> tuple:
    """Smallest period of a cyclic word: returns ``(root, k)`` with
    ``w = root^k`` as a cyclic word and k maximal."""
    n = len(w)
    if n == 0:
        return (), 1
    fail = [0] * n
    j = 0
    for i in range(1, n):
        while j and w[i] != w[j]:
            j = fail[j - 1]
        if w[i] == w[j]:
            j += 1
        fail[i] = j
    p = n - fail[-1]
    if n % p == 0 and p < n:
        return tuple(w[:p]), n // p
    return tuple(w), 1


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class Word:
    """A freely reduced word over a basis."""

    basis: Basis
    letters: Letters

    def __post_init__(self):
        self.basis.check_letters(self.letters)
        for a, b in zip(self.letters, self.letters[1:]):
            if a == -b:
                raise InputError(f"word not freely reduced at {a}, {b}")

    @classmethod
    def make(cls, basis: Basis, raw: Iterable[int]) -> "Word":
        basis.check_letters(raw)
        return cls(basis, reduce_word(raw))

    def __len__(self):
        return len(self.letters)

    def inverse(self) -> "Word":
        return Word(self.basis, inverse_word(self.letters))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.basis, concat(self.letters, other.letters))

    def __str__(self):
        return format_letters(self.basis, self.letters)


@dataclass(frozen=True)
class ConjClass:
    """A conjugacy class, held as a cyclically reduced cyclic word.

    When ``canonical`` is set the cyclic word is the least among all
    rotations of itself and of its inverse, so it is a stable dictionary key.
    """

    basis: Basis
    cyclic_word: Letters
    canonical: bool = False

    def __post_init__(self):
        self.basis.check_letters(self.cyclic_word)
        w = self.cyclic_word
        for a, b in zip(w, w[1:]):
            if a == -b:
                raise InputError("cyclic word not freely reduced")
        if len(w) >= 2 and w[0] == -w[-1]:
            raise InputError("word not cyclically reduced")

    @classmethod
    def of(cls, basis: Basis, raw: Iterable[int]) -> "ConjClass":
        """Canonical class of an arbitrary letter sequence."""
        core, _ = cyclic_reduce_letters(reduce_word(raw))
        return cls(basis, canonical_cyclic(core), canonical=True)

    def __len__(self):
        return len(self.cyclic_word)

    def inverse(self) -> "ConjClass":
        return ConjClass(self.basis, inverse_word(self.cyclic_word))

    def power_root(self) -> tuple:
        """(root class, exponent) with self = root^k as a cyclic word."""
        root, k = cyclic_period(self.cyclic_word)
        if k == 1:
            return self if self.canonical else canonicalize(self), 1
        return ConjClass.of(self.basis, root), k

    def __str__(self):
        return format_letters(self.basis, self.cyclic_word)


def cyclic_reduce(w: Word) -> tuple:
    """Return ``(ConjClass, conjugator Word)`` with
    ``w = conjugator * class * conjugator^-1``."""
    core, conj = cyclic_reduce_letters(w.letters)
    return ConjClass(w.basis, core), Word(w.basis, conj)


def canonicalize(c: ConjClass) -> ConjClass:
    """Idempotent canonical form of a conjugacy class."""
    if c.canonical:
        return c
    return ConjClass(c.basis, canonical_cyclic(c.cyclic_word), canonical=True)


# ---------------------------------------------------------------------------
# automorphisms

_VERIFY_LETTER_BUDGET = 200_000  # skip the O(len^2) inverse check above this


def _apply_letters(images: Sequence, inverted: Sequence, w: Sequence) -> Letters:
    out: list = []
    for t in w:
        push_block(out, images[t - 1] if t > 0 else inverted[-t - 1])
    return tuple(out)


@dataclass(frozen=True)
class Automorphism:
    """An automorphism of F_N given by generator images plus a stored,
    verified inverse.  Inverting an arbitrary endomorphism is out of scope,
    so user-built automorphisms must ship their inverse images."""

    basis: Basis
    images: tuple  # tuple[Letters, ...]
    inverse_images: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        n = self.basis.rank
        if len(self.images) != n or len(self.inverse_images) != n:
            raise InputError("need one image per generator, both directions")
        for w in (*self.images, *self.inverse_images):
            self.basis.check_letters(w)
            if reduce_word(w) != tuple(w):
                raise InputError(f"image not freely reduced: {w}")
        # the round-trip check substitutes one side into the other, so its
        # cost is (total length) x (max image length), not the total length
        max_img = max((len(w) for w in self.images), default=1)
        max_inv = max((len(w) for w in self.inverse_images), default=1)
        work = sum(len(w) for w in self.inverse_images) * max(max_img, 1)
        work += sum(len(w) for w in self.images) * max(max_inv, 1)
        if work <= _VERIFY_LETTER_BUDGET:
            self._verify()

    def _verify(self):
        for i in range(self.basis.rank):
            if self.apply_letters(self.inverse_images[i]) != (i + 1,):
                raise InputError(
                    f"inverse_images is not an inverse (generator {i + 1})"
                )
            if self.apply_inverse_letters(self.images[i]) != (i + 1,):
                raise InputError(
                    f"images is not an inverse of inverse_images (generator {i + 1})"
                )

    @cached_property
    def _inverted_images(self):
        return tuple(inverse_word(w) for w in self.images)

    @cached_property
    def _inverted_inverse_images(self):
        return tuple(inverse_word(w) for w in self.inverse_images)

    def apply_letters(self, w: Sequence) -> Letters:
        return _apply_letters(self.images, self._inverted_images, w)

    def apply_inverse_letters(self, w: Sequence) -> Letters:
        return _apply_letters(
            self.inverse_images, self._inverted_inverse_images, w
        )

    def size(self) -> int:
        return max(
            max((len(w) for w in self.images), default=0),
            max((len(w) for w in self.inverse_images), default=0),
        )

    def __str__(self):
        return format_automorphism(self)


def identity_automorphism(basis: Basis) -> Automorphism:
    gens = tuple((i + 1,) for i in range(basis.rank))
    return Automorphism(basis, gens, gens, name="id")


def apply(a: Automorphism, w: Word) -> Word:
    """Image of a word under an automorphism (substitute and reduce)."""
    return Word(a.basis, a.apply_letters(w.letters))


def apply_class(a: Automorphism, c: ConjClass) -> ConjClass:
    return ConjClass.of(a.basis, a.apply_letters(c.cyclic_word))


def compose(a: Automorphism, b: Automorphism, max_letters: int = None) -> Automorphism:
    """Group law: ``compose(a, b)`` maps x to a(b(x)).

    The composed inverse is built in the opposite order; the inverse
    invariant is re-verified by the constructor up to a letter budget
    (for very long images it holds by the group law on verified inputs).
    """
    if a.basis != b.basis:
        raise InputError("cannot compose automorphisms over different bases")
    images = tuple(a.apply_letters(w) for w in b.images)
    inverse_images = tuple(b.apply_inverse_letters(w) for w in a.inverse_images)
    if max_letters is not None:
        worst = max(max(len(w) for w in images), max(len(w) for w in inverse_images))
        if worst > max_letters:
            raise ResourceError(
                f"composition exceeds word cap: {worst} > {max_letters} letters"
            )
    name = ""
    if a.name and b.name:
        name = f"{a.name}*{b.name}"
    out = Automorphism(a.basis, images, inverse_images, name=name)
    return out


def invert(a: Automorphism) -> Automorphism:
    name = ""
    if a.name:
        name = a.name[:-3] if a.name.endswith("^-1") else a.name + "^-1"
    return Automorphism(a.basis, a.inverse_images, a.images, name=name)


def is_identity(a: Automorphism) -> bool:
    return a.images == tuple((i + 1,) for i in range(a.basis.rank))


# ---------------------------------------------------------------------------
# conjugacy-class enumeration


def enumerate_conj_classes(
    basis: Basis, max_len: int, budget: int = 2_000_000
) -> list:
    """All canonical conjugacy classes of cyclic length <= max_len.

    Walks every cyclically reduced word once and dedupes by canonical form;
    raises ResourceError when more than ``budget`` words would be visited.
    """
    if max_len < 1:
        raise InputError(f"max_len must be >= 1, got {max_len}")
    n = basis.rank
    letters = [i for i in range(1, n + 1)] + [-i for i in range(1, n + 1)]
    count = 2 * n * (2 * n - 1) ** (max_len - 1) if max_len > 1 else 2 * n
    if count > budget:
        raise ResourceError(
            f"enumeration would visit ~{count} words (> budget {budget})"
        )
    seen = {}

    def walk(prefix: list):
        if prefix and prefix[0] != -prefix[-1]:
            key = canonical_cyclic(prefix)
            if key not in seen:
                seen[key] = ConjClass(basis, key, canonical=True)
        if len(prefix) == max_len:
            return
        for t in letters:
            if prefix and t == -prefix[-1]:
                continue
            prefix.append(t)
            walk(prefix)
            prefix.pop()

    walk([])
    return sorted(
        seen.values(),
        key=lambda c: (len(c.cyclic_word), [_letter_key(t) for t in c.cyclic_word]),
    )


# ---------------------------------------------------------------------------
# text formats


def format_letters(basis: Basis, letters: Sequence) -> str:
    if not letters:
        return "1"
    return " ".join(
        basis.names[t - 1] if t > 0 else basis.names[-t - 1] + "^-1"
        for t in letters
    )


def parse_letters(basis: Basis, text: str) -> Letters:
    """Parse a word like ``x y^-1 x``; whitespace-insensitive, ``1`` or an
    empty string is the identity.  Longest generator name wins."""
    s = text.strip()
    if s in ("", "1"):
        return ()
    out = []
    names = sorted(range(basis.rank), key=lambda i: -len(basis.names[i]))
    pos = 0
    while pos < len(s):
        if s[pos].isspace():
            pos += 1
            continue
        for i in names:
            nm = basis.names[i]
            if s.startswith(nm, pos):
                pos += len(nm)
                m = re.match(r"\s*\^\s*-\s*1", s[pos:])
                if m:
                    pos += m.end()
                    out.append(-(i + 1))
                else:
                    out.append(i + 1)
                break
        else:
            raise InputError(f"cannot parse word {text!r} at position {pos}")
    return reduce_word(out)


def format_automorphism(a: Automorphism) -> str:
    basis = a.basis
    fwd = ", ".join(
        f"{basis.names[i]} -> {format_letters(basis, a.images[i])}"
        for i in range(basis.rank)
    )
    bwd = ", ".join(
        f"{basis.names[i]} -> {format_letters(basis, a.inverse_images[i])}"
        for i in range(basis.rank)
    )
    head = f"{a.name}: " if a.name else ""
    return f"{head}{fwd} | inverse: {bwd}"


def parse_automorphism(basis: Basis, text: str, name: str = "") -> Automorphism:
    """Parse ``name: x -> x y, y -> x | inverse: x -> y, y -> y^-1 x``.

    The leading ``name:`` part is optional when ``name`` is supplied.
    """
    body = text.strip()
    if "|" not in body:
        raise InputError(f"automorphism {name or text!r}: missing '| inverse:' part")
    fwd_part, inv_part = body.split("|", 1)
    # optional "name:" prefix (name must not contain '->')
    head, sep, rest = fwd_part.partition(":")
    if sep and "->" not in head:
        name = name or head.strip()
        fwd_part = rest
    inv_part = inv_part.strip()
    if not inv_part.lower().startswith("inverse"):
        raise InputError(f"automorphism {name!r}: expected 'inverse:' after '|'")
    inv_part = inv_part.split(":", 1)[1]

    def parse_side(side: str) -> tuple:
        images = [None] * basis.rank
        for piece in side.split(","):
            if not piece.strip():
                continue
            if "->" not in piece:
                raise InputError(f"automorphism {name!r}: bad rule {piece!r}")
            lhs, rhs = piece.split("->", 1)
            gen = lhs.strip()
            if gen not in basis.names:
                raise InputError(f"automorphism {name!r}: unknown generator {gen!r}")
            images[basis.names.index(gen)] = parse_letters(basis, rhs)
        missing = [basis.names[i] for i, w in enumerate(images) if w is None]
        if missing:
            raise InputError(f"automorphism {name!r}: missing images for {missing}")
        return tuple(images)

    return Automorphism(basis, parse_side(fwd_part), parse_side(inv_part), name=name)
