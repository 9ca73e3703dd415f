"""
Tests for surface group module.

Tests word parsing, reduction, conjugacy canonical forms, Cayley balls
and the built-in surfaces.

Author: Harsh
"""

import logging
import random
import pytest
from currentkit.errors import InputError, InvalidPresentation, ResourceLimit, UnknownGenerator, UnknownSurface
from currentkit import surface_group
from currentkit.surface_group import (
    ConjClass,
    SurfacePresentation,
    axis_orbit,
    ball,
    builtin,
    canonical_conj,
    class_of,
    coset_reps,
    evaluate,
    inverse,
    is_peripheral,
    primitive_root,
    reduce,
    torus_curve,
    word_power,
)


@pytest.mark.unit
class TestWords:
    """Test parsing, formatting and reduction of words."""

    def test_parse_indexed_generators(self, genus2):
        """Test that uppercase letters are inverses."""
        assert genus2.parse("a1B1") == (1, -2)
        assert genus2.format((1, -2, 3)) == "a1B1a2"

    def test_parse_identity(self, torus):
        """Test that the empty word and "1" are the identity."""
        assert torus.parse("") == ()
        assert torus.parse("1") == ()
        assert torus.format(()) == "1"

    def test_unknown_generator(self, torus):
        """Test that foreign letters are rejected."""
        with pytest.raises(UnknownGenerator):
            torus.parse("abc")

    def test_free_reduction(self, torus):
        """Test cancellation of inverse pairs."""
        assert reduce((1, 2, -2, -1, 2), torus) == (2,)

    def test_relator_reduces_to_identity(self, genus2):
        """Test Dehn reduction of the surface relator."""
        assert reduce(genus2.parse("a1b1A1B1a2b2A2B2"), genus2) == ()

    def test_long_relator_piece_is_shortened(self, genus2):
        """Test that more than half a relator is replaced by the shorter rest."""
        word = genus2.parse("a1b1A1B1a2")
        reduced = reduce(word, genus2)

        assert len(reduced) == 3
        assert evaluate(reduced, genus2).close_to(evaluate(word, genus2))

    def test_reduce_rejects_bad_letters(self, torus):
        """Test that letters outside the presentation are rejected."""
        with pytest.raises(UnknownGenerator):
            reduce((1, 3), torus)

    def test_primitive_root(self):
        """Test splitting a proper power."""
        assert primitive_root((1, 2, 1, 2)) == ((1, 2), 2)
        assert primitive_root((1, 2, 2)) == ((1, 2, 2), 1)


@pytest.mark.unit
class TestConjugacy:
    """Test canonical forms of conjugacy classes."""

    def test_rotation_invariant(self, torus):
        """Test that conjugate words share a canonical form."""
        assert canonical_conj((2, 1, 1), torus) == canonical_conj((1, 1, 2), torus)

    def test_inversion_invariant(self):
        """Test that a class and its inverse share a canonical form."""
        assert canonical_conj((1, 2)) == canonical_conj((-2, -1))

    def test_canonical_word_is_shortlex_minimal(self, torus):
        """Test the chosen representative."""
        assert class_of("bA", torus) == ConjClass((1, -2))

    def test_conjugation_cancels(self, torus):
        """Test that conjugating letters are cyclically cancelled."""
        assert class_of("Baab", torus) == ConjClass((1, 1))
        assert class_of("bab", torus) == ConjClass((1, 2, 2))

    def test_genus2_conjugates_agree(self, genus2):
        """Test conjugation by a generator in the closed surface group."""
        assert class_of("b2a1b1B2", genus2) == class_of("a1b1", genus2)


@pytest.mark.unit
class TestBalls:
    """Test Cayley balls and axis orbits."""

    @pytest.mark.parametrize("radius,size", [(0, 1), (1, 5), (2, 17), (3, 53)])
    def test_free_ball_sizes(self, torus, radius, size):
        """Test 2 * 3^r - 1 elements in the free group of rank two."""
        assert len(ball(torus, radius)) == size

    @pytest.mark.parametrize("radius,size", [(1, 9), (2, 65), (3, 457), (4, 3193)])
    def test_genus2_ball_sizes(self, genus2, radius, size):
        """Test the growth of the genus-2 surface group."""
        assert len(ball(genus2, radius)) == size

    def test_negative_radius(self, torus):
        """Test that the radius must be non-negative."""
        with pytest.raises(InputError):
            ball(torus, -1)

    def test_element_cap(self, torus):
        """Test that exceeding the cap raises ResourceLimit."""
        with pytest.raises(ResourceLimit):
            ball(torus, 3, cap=10)

    def test_axis_orbit_of_generator(self, torus):
        """Test that a's axis is fixed by powers of a only."""
        orbit = axis_orbit(torus, 2, class_of("a", torus))

        # 17 elements in 9 cosets of <a>
        assert len(orbit) == 9
        assert orbit.word(0) == ()

    def test_coset_reps_of_power(self, torus):
        """Test that proper powers add the missing root shifts."""
        single = coset_reps(torus, 2, class_of("a", torus))
        double = coset_reps(torus, 2, class_of("aa", torus))

        assert len(double) > len(single)
        assert () in double and (1,) in double

    def test_coset_reps_trivial_class(self, torus):
        """Test that the trivial class has no cosets."""
        with pytest.raises(InputError):
            coset_reps(torus, 2, ConjClass(()))


@pytest.mark.unit
class TestSurfaces:
    """Test built-in and custom presentations."""

    def test_builtin_names(self, torus, pants, genus2):
        """Test the three built-in surfaces."""
        assert (torus.genus, torus.punctures) == (1, 1)
        assert pants.is_thrice_punctured_sphere
        assert genus2.is_closed and genus2.rank == 4

    def test_unknown_surface(self):
        """Test that unknown names are rejected."""
        with pytest.raises(UnknownSurface):
            builtin("klein_bottle")

    def test_commutator_is_peripheral(self, torus):
        """Test the cusp class of the punctured torus."""
        assert is_peripheral(class_of("abAB", torus), torus) is True
        assert is_peripheral(class_of("ab", torus), torus) is False

    def test_sphere3_cusps(self, pants):
        """Test the three cusp classes of the thrice-punctured sphere."""
        for word in ("a", "b", "ab", "aaa", "BA"):
            assert is_peripheral(class_of(word, pants), pants) is True
        assert is_peripheral(class_of("aB", pants), pants) is False

    def test_from_dict(self, custom_presentation):
        """Test building a surface from its JSON form."""
        surface = SurfacePresentation.from_dict(custom_presentation)

        assert surface.generators == ("a", "b")
        assert surface.peripherals == ((1, 2, -1, -2),)

    def test_from_dict_bad_relator(self, custom_presentation):
        """Test that a relator must evaluate to the identity."""
        custom_presentation['relators'] = ['ab']

        with pytest.raises(InvalidPresentation):
            SurfacePresentation.from_dict(custom_presentation)

    def test_from_dict_missing_matrices(self):
        """Test that malformed input is reported as InvalidPresentation."""
        with pytest.raises(InvalidPresentation):
            SurfacePresentation.from_dict({'generators': ['a']})


@pytest.mark.unit
class TestTorusCurves:
    """Test slope curves on the punctured torus."""

    def test_axes(self):
        """Test slopes 1/0 and 0/1."""
        assert torus_curve(1, 0) == ConjClass((1,))
        assert torus_curve(0, 1) == ConjClass((2,))

    def test_diagonals(self, torus):
        """Test slopes 1/1 and 1/-1."""
        assert torus_curve(1, 1) == class_of("ab", torus)
        assert torus_curve(1, -1) == class_of("aB", torus)

    def test_letter_counts(self):
        """Test that slope p/q uses p letters a and q letters b."""
        word = torus_curve(2, 3).word

        assert sorted(word) == [1, 1, 2, 2, 2]

    def test_non_primitive_slope(self):
        """Test that slopes must be primitive."""
        with pytest.raises(InputError):
            torus_curve(2, 2)


def _random_word(rng, surface, max_length):
    return tuple(rng.choice(surface.letters()) for _ in range(rng.randint(1, max_length)))


@pytest.mark.unit
class TestConjugationInvariance:
    """Test that canonical forms only see the conjugacy class."""

    @pytest.mark.parametrize("name,max_word,max_conjugator,trials", [
        ("punctured_torus", 6, 5, 100),
        ("sphere3", 6, 5, 50),
        ("genus2_octagon", 4, 2, 50),
    ])
    def test_random_conjugates(self, name, max_word, max_conjugator, trials):
        """Test that x w x^-1 and w^-1 share the canonical form of w."""
        surface = builtin(name)
        rng = random.Random(17)
        for _ in range(trials):
            w = _random_word(rng, surface, max_word)
            x = _random_word(rng, surface, max_conjugator)
            expected = canonical_conj(w, surface)

            assert canonical_conj(x + w + inverse(x), surface) == expected
            assert canonical_conj(inverse(w), surface) == expected

    def test_closure_limit_logs(self, genus2, monkeypatch, caplog):
        """Test that a truncated half-relator closure is reported."""
        monkeypatch.setattr(surface_group, "_HALF_FLIP_LIMIT", 1)

        with caplog.at_level(logging.WARNING):
            canonical_conj(genus2.parse("a1b1A1B1a1a1"), genus2)

        assert "Half-relator closure" in caplog.text


@pytest.mark.unit
class TestBallElements:
    """Test that ball words are reduced and elements are distinct."""

    def test_words_are_dehn_reduced(self, genus2):
        """Test that no ball word admits a Dehn shortening."""
        for word in ball(genus2, 4).words:
            assert len(reduce(word, genus2)) == len(word)

    def test_elements_distinct(self, genus2):
        """Test that no two ball words name the same element."""
        maps = [m for _, m in ball(genus2, 2).entries()]
        for i, m in enumerate(maps):
            assert not any(m.close_to(other) for other in maps[i + 1:])

    def test_word_power(self):
        """Test positive, zero and negative powers."""
        assert word_power((1, 2), 3) == (1, 2, 1, 2, 1, 2)
        assert word_power((1, 2), 0) == ()
        assert word_power((1, 2), -2) == (-2, -1, -2, -1)
