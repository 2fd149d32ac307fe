"""End-to-end acceptance suite.

Each test prints a single PASS line on success so the whole gate can be
read off the verbose log.  Thresholds for the stochastic criteria are
empirical and recorded in the assertion messages.
"""

import math
import random
import time
from fractions import Fraction

import pytest

from outwalk.axes import (
    L_value,
    ProbeSet,
    axis_membership,
    default_probes,
    sandwich_check,
    sigma,
    strip_ball_census,
    strip_membership,
)
from outwalk.currents import (
    base_current,
    current_of_class,
    normalize_against,
    pair,
)
from outwalk.currents import act as act_current
from outwalk.freegroup import (
    Basis,
    apply_class,
    compose,
    enumerate_conj_classes,
    identity_automorphism,
    invert,
    parse_automorphism,
)
from outwalk.outerspace import (
    act,
    candidates,
    exact_ratio,
    lipschitz,
    rose,
    sym_distance,
    translation_length,
    unit_rose,
)
from outwalk.walk import (
    default_class_window,
    dirac,
    drift_track,
    fibonacci_pair,
    sample_path,
    spectrum_track,
    strip_density_experiment,
    uniform_measure,
)

B2 = Basis(2)
B3 = Basis(3)
GOLDEN = (1 + math.sqrt(5)) / 2


def _gens(basis):
    if basis.rank == 2:
        return list(fibonacci_pair(basis))
    fib3 = parse_automorphism(
        basis,
        "a: x -> x y, y -> x, z -> z | inverse: x -> y, y -> y^-1 x, z -> z",
    )
    rot3 = parse_automorphism(
        basis,
        "r: x -> y, y -> z, z -> x | inverse: x -> z, y -> x, z -> y",
    )
    return [fib3, rot3]


def _ball_element(basis, gens, radius, rng):
    g = identity_automorphism(basis)
    sym = list(gens) + [invert(a) for a in gens]
    for _ in range(rng.randint(0, radius)):
        g = compose(g, rng.choice(sym))
    return g


def _report(label, detail=""):
    print(f"PASS {label}" + (f" [{detail}]" if detail else ""))


def _random_class(basis, max_len, rng):
    from outwalk.freegroup import ConjClass

    n = rng.randint(1, max_len)
    letters = []
    alphabet = [t for i in range(1, basis.rank + 1) for t in (i, -i)]
    while len(letters) < n:
        t = rng.choice(alphabet)
        if letters and t == -letters[-1]:
            continue
        if letters and len(letters) == n - 1 and t == -letters[0]:
            continue
        letters.append(t)
    return ConjClass.of(basis, tuple(letters))


def test_translation_length_oracle():
    # the metric action must agree letter-for-letter with the word algebra
    start = time.time()
    for basis in (B2, B3):
        rng = random.Random(f"oracle-{basis.rank}")
        gens = _gens(basis)
        T0 = unit_rose(basis)
        trees = {}  # the ball is small, so orbit trees repeat constantly
        for _ in range(1000):
            a = _ball_element(basis, gens, 3, rng)
            c = _random_class(basis, 8, rng)
            if a.images not in trees:
                trees[a.images] = (act(a, T0), invert(a))
            T, a_inv = trees[a.images]
            got = translation_length(T, c)
            expected = len(apply_class(a_inv, c))
            assert got == expected, (a.name, str(c), got, expected)
    elapsed = time.time() - start
    assert elapsed < 10, f"oracle suite took {elapsed:.1f}s"
    _report("translation-length oracle", f"2000 pairs, {elapsed:.2f}s")


def test_candidate_maximum_is_exact():
    # exhaustive class sweep: the candidate ratio is attained and never beaten
    start = time.time()
    rng = random.Random("candidate-max")
    gens = _gens(B2)
    classes = enumerate_conj_classes(B2, 10)
    tested = 0
    while tested < 20:
        lengths = (
            Fraction(rng.randint(1, 12), 4),
            Fraction(rng.randint(1, 12), 4),
        )
        S = act(_ball_element(B2, gens, 2, rng), rose(B2, lengths))
        if any(len(c) > 10 for c in candidates(S).classes):
            continue  # exhaustive sweep cannot certify this source tree
        T2 = act(_ball_element(B2, gens, 2, rng), S)
        lip = lipschitz(S, T2)
        assert isinstance(lip, Fraction)
        best = max(
            exact_ratio(translation_length(T2, c), translation_length(S, c))
            for c in classes
        )
        assert best == lip, (lengths, best, lip)
        tested += 1
    elapsed = time.time() - start
    assert elapsed < 60, f"exhaustive sweep took {elapsed:.1f}s"
    _report("candidate maximum exact on 20 orbit pairs", f"{elapsed:.2f}s")


def test_equivariance_suite():
    rng = random.Random("equivariance")
    gens = _gens(B2)
    T0 = unit_rose(B2)
    tol = 1e-12
    for i in range(100):
        a = _ball_element(B2, gens, 2, rng)
        b = _ball_element(B2, gens, 2, rng)
        S = act(b, rose(B2, (Fraction(rng.randint(1, 8), 4),
                             Fraction(rng.randint(1, 8), 4))))
        T = act(_ball_element(B2, gens, 2, rng), S)
        c1 = current_of_class(B2, (1,))
        c2 = current_of_class(B2, (1, -2))

        # metric
        assert abs(sym_distance(act(a, S), act(a, T)) - sym_distance(S, T)) <= tol
        # pairing
        lhs = pair(act(a, T), act_current(a, c1))
        assert abs(float(lhs - pair(T, c1))) <= tol
        # height function
        s1 = sigma(act(a, T), act_current(a, c1), act_current(a, c2))
        assert abs(s1 - sigma(T, c1, c2)) <= tol
        # axis membership with transported probes
        probes = ProbeSet((S, T, T0))
        moved = ProbeSet(tuple(act(a, P) for P in probes.trees))
        L1 = float(L_value(c1, c2, T, probes)) + 0.25
        cert = axis_membership(c1, c2, T, L1, probes)
        cert_a = axis_membership(
            act_current(a, c1), act_current(a, c2), act(a, T), L1, moved
        )
        assert cert.verdict == cert_a.verdict
        assert abs(cert.L_lower - cert_a.L_lower) <= 1e-9
        # strips: the transported strip contains the conjugated element
        g = _ball_element(B2, gens, 1, rng)
        g_conj = compose(compose(a, g), invert(a))
        assert strip_membership(g, c1, c2, L1, probes, T) == strip_membership(
            g_conj, act_current(a, c1), act_current(a, c2), L1, moved, act(a, T)
        )
    _report("equivariance suite", "100 instances, tol 1e-12")


def test_fibonacci_spectrum_ratio():
    start = time.time()
    phi, _ = fibonacci_pair(B2)
    T0 = unit_rose(B2)
    path = sample_path(dirac(phi), 20, seed=0)
    window = default_class_window(B2, 3)
    totals = []
    for g in path.positions:
        T = act(g, T0)
        totals.append(float(sum(translation_length(T, c) for c in window)))
    ratio = totals[-1] / totals[-2]
    assert abs(ratio - GOLDEN) < 1e-3, ratio
    track = spectrum_track(path, T0, window)
    assert track.epsilons[-1] < 1e-8
    elapsed = time.time() - start
    assert elapsed < 5, f"spectrum run took {elapsed:.1f}s"
    _report("Fibonacci spectrum ratio", f"|ratio - golden| = {abs(ratio - GOLDEN):.1e}")


@pytest.mark.xfail(
    strict=True,
    reason=(
        "d_sym(T0, phi^n T0) = 2 log F_{n+2} exactly, so at n = 20 the "
        "normalized value is 2 log(17711)/20 = 0.97822, which is 1.6e-2 from "
        "2 log golden = 0.96242; the Cesaro average cannot be within 1e-3 "
        "before n > 300 and the criterion is unattainable as stated"
    ),
)
def test_fibonacci_drift_normalized_value():
    phi, _ = fibonacci_pair(B2)
    T0 = unit_rose(B2)
    path = sample_path(dirac(phi), 20, seed=0)
    track = drift_track(path, T0)
    assert abs(track.values[-1] - 2 * math.log(GOLDEN)) < 1e-3


def test_fibonacci_drift_increment():
    # consistent estimator of the same limit: consecutive differences of
    # d_sym converge at the exact Fibonacci-quotient rate
    start = time.time()
    phi, _ = fibonacci_pair(B2)
    T0 = unit_rose(B2)
    path = sample_path(dirac(phi), 20, seed=0)
    track = drift_track(path, T0)
    fib = [0, 1]
    for _ in range(25):
        fib.append(fib[-1] + fib[-2])
    expected_last = 2 * math.log(fib[22] / fib[21])
    assert abs(track.increments[-1] - expected_last) < 1e-9
    assert abs(track.increment_estimate - 2 * math.log(GOLDEN)) < 1e-3
    elapsed = time.time() - start
    assert elapsed < 5, f"drift run took {elapsed:.1f}s"
    _report(
        "Fibonacci drift increment",
        f"|est - 2 log golden| = {abs(track.increment_estimate - 2 * math.log(GOLDEN)):.1e}",
    )


def _fibonacci_proxy_pair(depth=8):
    phi, _ = fibonacci_pair(B2)
    T0 = unit_rose(B2)
    eta0 = base_current(B2)
    g_fwd, g_bwd = phi, invert(phi)
    for _ in range(depth - 1):
        g_fwd = compose(g_fwd, phi)
        g_bwd = compose(g_bwd, invert(phi))
    c_plus = normalize_against(act_current(g_fwd, eta0), T0)
    c_minus = normalize_against(act_current(g_bwd, eta0), T0)
    return T0, phi, c_minus, c_plus


def test_sandwich_lower_bound():
    rng = random.Random("sandwich-lower")
    gens = _gens(B2)
    slack = 1e-9
    for i in range(1000):
        S = act(_ball_element(B2, gens, 2, rng),
                rose(B2, (Fraction(rng.randint(1, 8), 4),
                          Fraction(rng.randint(1, 8), 4))))
        T = act(_ball_element(B2, gens, 2, rng), S)
        w1 = rng.choice(enumerate_conj_classes(B2, 3))
        w2 = rng.choice(enumerate_conj_classes(B2, 3))
        c1 = current_of_class(B2, w1.cyclic_word)
        c2 = current_of_class(B2, w2.cyclic_word)
        gap = abs(sigma(S, c1, c2) - sigma(T, c1, c2))
        assert gap <= sym_distance(S, T) + slack, (i, gap)
    _report("sandwich lower bound", "1000 orbit pairs, slack 1e-9")


def test_sandwich_two_sided_on_axis():
    T0, phi, c_minus, c_plus = _fibonacci_proxy_pair()
    orbit = [T0]
    for _ in range(10):
        orbit.append(act(phi, orbit[-1]))
    probes = default_probes(T0, [phi], extra_trees=orbit)
    L1 = 1.05 * max(float(L_value(c_minus, c_plus, T, probes)) for T in orbit)
    checked = 0
    for i, S in enumerate(orbit):
        for T in orbit[i:]:
            rep = sandwich_check(S, T, c_minus, c_plus, L1, probes)
            assert rep.ok, (i, rep)
            checked += 1
    _report("sandwich two-sided on axis", f"{checked} pairs at L1 = {L1:.4f}")


def test_strip_census_linear_growth():
    start = time.time()
    T0, phi, c_minus, c_plus = _fibonacci_proxy_pair()
    _, psi = fibonacci_pair(B2)
    orbit = [T0]
    for _ in range(6):
        orbit.append(act(phi, orbit[-1]))
    probes = default_probes(T0, [phi, psi], extra_trees=orbit)
    L1 = 1.05 * max(float(L_value(c_minus, c_plus, T, probes)) for T in orbit)
    census = strip_ball_census(
        c_minus, c_plus, L1, probes, [phi, psi], 6, T0
    )
    assert list(census.strip_counts) == sorted(census.strip_counts)
    assert math.isfinite(census.lambda_hat)
    for k in range(1, 7):
        assert census.strip_counts[k] <= census.lambda_hat * k + 1e-9
    elapsed = time.time() - start
    assert elapsed < 600, f"census took {elapsed:.1f}s"
    _report(
        "strip census",
        f"counts {census.strip_counts}, lambda = {census.lambda_hat:.3f}, "
        f"{elapsed:.1f}s",
    )


def test_monte_carlo_spectrum_convergence():
    phi, psi = fibonacci_pair(B2)
    m = uniform_measure([phi, psi], name="u")
    T0 = unit_rose(B2)
    window = default_class_window(B2, 3)
    hits = 0
    for seed in range(100):
        path = sample_path(m, 25, seed)
        track = spectrum_track(path, T0, window)
        if track.epsilons[-1] < 1e-2:
            hits += 1
    assert hits >= 90, f"epsilon_n < 1e-2 on only {hits}/100 seeds"
    _report("Monte Carlo spectrum convergence", f"{hits}/100 seeds converged")


def test_monte_carlo_strip_density():
    phi, psi = fibonacci_pair(B2)
    m = uniform_measure([phi, psi], name="u")
    T0 = unit_rose(B2)
    positive = 0
    for seed in range(20):
        rec = strip_density_experiment(m, 12, [1.5, 2.0, 4.0], seed, T0)
        if rec.summary["density_at_minimal_L"] > 0:
            positive += 1
    assert positive >= 18, f"positive density on only {positive}/20 seeds"
    _report("Monte Carlo strip density", f"{positive}/20 seeds positive")
