from fractions import Fraction

from outwalk.freegroup import Basis, ConjClass
from outwalk.outerspace import act, rose, unit_rose
from outwalk.projection import project, project_image, projection_track
from outwalk.walk import dirac, fibonacci_pair, sample_path

B2 = Basis(2)


def test_rose_projection():
    got = project(unit_rose(B2))
    assert got == frozenset(
        {ConjClass.of(B2, (1,)), ConjClass.of(B2, (2,))}
    )


def test_metric_blind():
    assert project(rose(B2, (Fraction(1, 7), Fraction(9)))) == project(
        unit_rose(B2)
    )


def test_equivariance():
    phi, psi = fibonacci_pair(B2)
    T0 = unit_rose(B2)
    for a in (phi, psi):
        assert project(act(a, T0)) == project_image(a, project(T0))


def test_track_jumps():
    phi, _ = fibonacci_pair(B2)
    T0 = unit_rose(B2)
    p = sample_path(dirac(phi), 6, seed=0)
    tr = projection_track(p, T0)
    assert len(tr.sets) == 7
    assert len(tr.jumps) == 6
    assert tr.sets[0] == project(T0)
