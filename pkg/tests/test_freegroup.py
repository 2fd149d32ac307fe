import pytest
from hypothesis import given, settings, strategies as st

from outwalk.errors import InputError, ResourceError
from outwalk.freegroup import (
    Automorphism,
    Basis,
    ConjClass,
    Word,
    apply,
    apply_class,
    canonical_cyclic,
    canonicalize,
    compose,
    concat,
    cyclic_period,
    cyclic_reduce,
    cyclic_reduce_letters,
    enumerate_conj_classes,
    format_automorphism,
    format_letters,
    identity_automorphism,
    inverse_word,
    invert,
    is_identity,
    parse_automorphism,
    parse_letters,
    reduce_word,
)

B2 = Basis(2)
B3 = Basis(3)

PHI_TEXT = "phi: x -> x y, y -> x | inverse: x -> y, y -> y^-1 x"


def phi2():
    return parse_automorphism(B2, PHI_TEXT)


def letters_strategy(rank=2, max_len=12):
    letter = st.sampled_from(
        [i for i in range(-rank, rank + 1) if i != 0]
    )
    return st.lists(letter, max_size=max_len).map(tuple)


def naive_reduce(raw):
    out = list(raw)
    changed = True
    while changed:
        changed = False
        for i in range(len(out) - 1):
            if out[i] == -out[i + 1]:
                del out[i : i + 2]
                changed = True
                break
    return tuple(out)


class TestWords:
    @given(letters_strategy(2))
    def test_reduce_matches_naive(self, raw):
        assert reduce_word(raw) == naive_reduce(raw)

    @given(letters_strategy(3, 16))
    def test_reduce_idempotent(self, raw):
        w = reduce_word(raw)
        assert reduce_word(w) == w

    @given(letters_strategy(2))
    def test_inverse_cancels(self, raw):
        w = reduce_word(raw)
        assert concat(w, inverse_word(w)) == ()

    def test_word_rejects_unreduced(self):
        with pytest.raises(InputError):
            Word(B2, (1, -1))
        assert Word.make(B2, (1, -1)).letters == ()

    def test_word_rejects_out_of_range(self):
        with pytest.raises(InputError):
            Word(B2, (3,))

    @given(letters_strategy(2), letters_strategy(2))
    def test_multiplication_is_concat_reduce(self, a, b):
        u, v = Word.make(B2, a), Word.make(B2, b)
        assert (u * v).letters == reduce_word(a + b)


class TestCyclicWords:
    @given(letters_strategy(2))
    def test_cyclic_reduce_conjugation(self, raw):
        w = reduce_word(raw)
        core, conj = cyclic_reduce_letters(w)
        assert concat(conj, core, inverse_word(conj)) == w
        if core:
            assert core[0] != -core[-1]

    @given(letters_strategy(2, 10), st.integers(0, 9))
    def test_canonical_rotation_invariant(self, raw, k):
        core, _ = cyclic_reduce_letters(reduce_word(raw))
        if not core:
            return
        r = k % len(core)
        rotated = core[r:] + core[:r]
        assert canonical_cyclic(rotated) == canonical_cyclic(core)

    @given(letters_strategy(2, 10))
    def test_canonical_inverse_invariant(self, raw):
        core, _ = cyclic_reduce_letters(reduce_word(raw))
        assert canonical_cyclic(inverse_word(core)) == canonical_cyclic(core)

    @given(letters_strategy(2, 8))
    def test_canonical_is_minimum_over_orbit(self, raw):
        core, _ = cyclic_reduce_letters(reduce_word(raw))
        if not core:
            return

        def key(w):
            return tuple(2 * abs(t) - (t > 0) for t in w)

        orbit = []
        for w in (core, inverse_word(core)):
            for r in range(len(w)):
                orbit.append(w[r:] + w[:r])
        assert key(canonical_cyclic(core)) == min(key(w) for w in orbit)

    @given(letters_strategy(2, 5), st.integers(1, 4))
    def test_cyclic_period_detects_powers(self, raw, k):
        core, _ = cyclic_reduce_letters(reduce_word(raw))
        if not core:
            return
        root, mult = cyclic_period(core * k)
        assert root * mult == core * k
        assert mult % k == 0

    def test_power_root_folds(self):
        c = ConjClass.of(B2, (1, 2, 1, 2, 1, 2))
        root, k = c.power_root()
        assert k == 3
        assert root == ConjClass.of(B2, (1, 2))

    def test_conjugates_share_class(self):
        a = ConjClass.of(B2, (2, 1, 2, -1, -2))
        b = ConjClass.of(B2, (1, 2, -1))
        assert canonicalize(a) == canonicalize(b)


class TestAutomorphisms:
    def test_parse_format_round_trip(self):
        a = phi2()
        assert a.images == ((1, 2), (1,))
        assert a.inverse_images == ((2,), (-2, 1))
        assert parse_automorphism(B2, format_automorphism(a)) == a

    def test_bad_inverse_rejected(self):
        with pytest.raises(InputError):
            Automorphism(B2, ((1, 2), (1,)), ((2,), (1,)))

    def test_identity(self):
        e = identity_automorphism(B2)
        assert is_identity(e)
        assert is_identity(compose(phi2(), invert(phi2())))

    @given(letters_strategy(2))
    def test_apply_is_homomorphism(self, raw):
        a = phi2()
        w = Word.make(B2, raw)
        left = apply(a, w * w.inverse() * w)
        assert left == apply(a, w)

    @given(letters_strategy(2), letters_strategy(2))
    def test_apply_respects_product(self, ra, rb):
        a = phi2()
        u, v = Word.make(B2, ra), Word.make(B2, rb)
        assert apply(a, u * v) == apply(a, u) * apply(a, v)

    @given(letters_strategy(2))
    def test_apply_inverse_round_trip(self, raw):
        a = phi2()
        w = Word.make(B2, raw)
        assert apply(invert(a), apply(a, w)) == w

    @given(letters_strategy(2, 8), letters_strategy(2, 4))
    def test_apply_class_conjugation_invariant(self, raw, conj):
        a = phi2()
        c1 = ConjClass.of(B2, raw)
        c2 = ConjClass.of(B2, conj + raw + tuple(-t for t in reversed(conj)))
        assert apply_class(a, c1) == apply_class(a, c2)

    def test_compose_matches_pointwise(self):
        a = phi2()
        b = invert(a)
        ab = compose(a, b)
        for i in (1, 2):
            w = Word(B2, (i,))
            assert apply(ab, w) == apply(a, apply(b, w))

    def test_compose_letter_cap(self):
        a = phi2()
        g = a
        with pytest.raises(ResourceError):
            for _ in range(60):
                g = compose(g, a, max_letters=10_000)

    def test_name_ignored_in_equality(self):
        a = phi2()
        b = Automorphism(B2, a.images, a.inverse_images, name="other")
        assert a == b


class TestEnumeration:
    def test_counts_rank2(self):
        assert len(enumerate_conj_classes(B2, 1)) == 2
        assert len(enumerate_conj_classes(B2, 2)) == 6
        assert len(enumerate_conj_classes(B2, 3)) == 12

    def test_all_canonical_and_unique(self):
        classes = enumerate_conj_classes(B3, 3)
        assert len(set(classes)) == len(classes)
        for c in classes:
            assert c.canonical
            assert canonicalize(c) == c

    def test_exhaustive_small(self):
        got = {c.cyclic_word for c in enumerate_conj_classes(B2, 2)}
        assert got == {
            (1,), (2,), (1, 1), (2, 2),
            canonical_cyclic((1, 2)), canonical_cyclic((1, -2)),
        }

    def test_zero_length_rejected(self):
        with pytest.raises(InputError):
            enumerate_conj_classes(B2, 0)


class TestTextFormat:
    def test_letters_round_trip(self):
        for w in [(), (1,), (1, -2, 1, 1), (-1, -1, 2)]:
            assert parse_letters(B2, format_letters(B2, w)) == w

    def test_identity_spelling(self):
        assert parse_letters(B2, "1") == ()
        assert format_letters(B2, ()) == "1"

    def test_unknown_generator(self):
        with pytest.raises(InputError):
            parse_letters(B2, "x z")

    def test_multi_letter_names(self):
        b = Basis(2, ("a1", "a12"))
        w = parse_letters(b, "a12 a1^-1")
        assert w == (2, -1)
        assert format_letters(b, w) == "a12 a1^-1"
