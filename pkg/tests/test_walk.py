import math

import pytest

from outwalk.errors import InputError, ResourceError
from outwalk.freegroup import Basis, invert
from outwalk.outerspace import act, sym_distance, unit_rose
from outwalk.walk import (
    DEFAULT_ATOM_CAP,
    bilateral_path,
    current_track,
    default_class_window,
    dirac,
    drift_track,
    fibonacci_pair,
    measure_stats,
    sample_path,
    spectrum_track,
    strip_density_experiment,
    uniform_measure,
    WalkMeasure,
)

B2 = Basis(2)
GOLDEN = (1 + math.sqrt(5)) / 2


@pytest.fixture(scope="module")
def setup():
    T0 = unit_rose(B2)
    phi, psi = fibonacci_pair(B2)
    return T0, phi, psi


class TestMeasures:
    def test_probabilities_validated(self, setup):
        _, phi, psi = setup
        with pytest.raises(InputError):
            WalkMeasure(((phi, 0.7), (psi, 0.7)))
        with pytest.raises(InputError):
            WalkMeasure(((phi, -0.5), (psi, 1.5)))

    def test_reflected_inverts_support(self, setup):
        _, phi, psi = setup
        m = uniform_measure([phi, psi]).reflected()
        assert {a.images for a, _ in m.support} == {
            invert(phi).images, invert(psi).images
        }

    def test_stats(self, setup):
        _, phi, psi = setup
        st = measure_stats(uniform_measure([phi, psi]), [phi, psi])
        assert st.entropy == pytest.approx(math.log(2))
        assert st.log_moment == 0.0  # both supports at word distance 1

    def test_stats_unreachable_support(self, setup):
        _, phi, psi = setup
        with pytest.raises(ResourceError):
            measure_stats(dirac(phi), [psi], radius_cap=1)


class TestPaths:
    def test_deterministic_per_seed(self, setup):
        _, phi, psi = setup
        m = uniform_measure([phi, psi])
        p1 = sample_path(m, 30, seed=9)
        p2 = sample_path(m, 30, seed=9)
        assert p1.increments == p2.increments
        assert sample_path(m, 30, seed=10).increments != p1.increments

    def test_positions_are_partial_products(self, setup):
        _, phi, psi = setup
        m = uniform_measure([phi, psi])
        p = sample_path(m, 6, seed=1)
        from outwalk.freegroup import compose

        g = p.positions[0]
        for k, s in enumerate(p.increments, start=1):
            g = compose(g, s)
            assert g == p.positions[k]

    def test_word_cap(self, setup):
        _, phi, _ = setup
        with pytest.raises(ResourceError) as exc:
            sample_path(dirac(phi), 60, seed=0, word_cap=5000)
        assert exc.value.partial is not None

    def test_bilateral_independent_halves(self, setup):
        _, phi, psi = setup
        m = uniform_measure([phi, psi])
        bp = bilateral_path(m, 8, seed=2)
        assert bp.position(0).images == ((1,), (2,))
        assert bp.position(3) == bp.forward[3]
        assert bp.position(-3) == bp.backward[3]
        # backward steps use the reflected measure, not the forward draws
        assert bp.backward[1].images in {
            invert(phi).images, invert(psi).images
        }


class TestTracks:
    def test_spectrum_rows_projectivized(self, setup):
        T0, phi, psi = setup
        p = sample_path(uniform_measure([phi, psi]), 10, seed=4)
        track = spectrum_track(p, T0, default_class_window(B2, 3))
        for vec in track.vectors:
            assert sum(vec) == pytest.approx(1.0, abs=1e-12)
        assert len(track.epsilons) == 10

    def test_spectrum_converges_dirac(self, setup):
        T0, phi, _ = setup
        p = sample_path(dirac(phi), 20, seed=0)
        track = spectrum_track(p, T0, default_class_window(B2, 3))
        assert track.epsilons[-1] < 1e-8

    def test_drift_known_exact_series(self, setup):
        # d_sym(T0, phi^n T0) = 2 log F_{n+2} for the Fibonacci map
        T0, phi, _ = setup
        p = sample_path(dirac(phi), 10, seed=0)
        track = drift_track(p, T0)
        fib = [0, 1]
        for _ in range(12):
            fib.append(fib[-1] + fib[-2])
        for k in (1, 5, 10):
            assert track.values[k - 1] * k == pytest.approx(
                2 * math.log(fib[k + 2]), abs=1e-9
            )

    def test_drift_increment_estimate(self, setup):
        T0, phi, _ = setup
        p = sample_path(dirac(phi), 16, seed=0)
        track = drift_track(p, T0)
        assert track.increment_estimate == pytest.approx(
            2 * math.log(GOLDEN), abs=1e-6
        )

    def test_current_track_gaps(self, setup):
        T0, phi, _ = setup
        p = sample_path(dirac(phi), 8, seed=0)
        track = current_track(p, T0)
        assert len(track.gaps) == 8
        assert all(g >= 0 for g in track.gaps)

    def test_current_track_atom_cap(self, setup):
        T0, phi, psi = setup
        p = sample_path(uniform_measure([phi, psi]), 8, seed=0)
        with pytest.raises(ResourceError):
            current_track(p, T0, atom_cap=0)


class TestStripDensity:
    def test_record_schema_and_determinism(self, setup):
        T0, phi, psi = setup
        m = uniform_measure([phi, psi], name="u")
        rec1 = strip_density_experiment(m, 10, [1.5, 2.0, 4.0], seed=5, T0=T0)
        rec2 = strip_density_experiment(m, 10, [1.5, 2.0, 4.0], seed=5, T0=T0)
        assert rec1.rows == rec2.rows
        assert rec1.header == ("seed", "L", "density")
        densities = [r[2] for r in rec1.rows]
        assert densities == sorted(densities)  # grid is increasing
        assert rec1.summary["density_at_minimal_L"] >= 0.5
        assert rec1.summary["positivity_margin"] > 0

    def test_empty_grid_rejected(self, setup):
        T0, phi, psi = setup
        with pytest.raises(InputError):
            strip_density_experiment(
                uniform_measure([phi, psi]), 5, [], seed=0, T0=T0
            )
