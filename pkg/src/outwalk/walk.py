"""Seeded random walks on the outer automorphism group.

Sample paths, bilateral paths, convergence diagnostics in projective
length spectra and projective currents, drift estimation, and the
strip-density experiment.  Every operation is a pure function of
(inputs, seed); rerunning reproduces records bit-identically.

Limit objects (boundary trees, their dual currents) are never
represented: the diagnostics watch finite-step proxies, and every record
that uses a proxy says so in its notes.
"""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass, field
from typing import Sequence

from .axes import L_value, ProbeSet, default_probes
from .currents import (
    RationalCurrent,
    act as act_current,
    base_current,
    check_positive_pair,
    normalize_against,
    projective_current_distance,
)
from .errors import InputError, ResourceError, ToolkitError
from .freegroup import (
    Automorphism,
    Basis,
    compose,
    enumerate_conj_classes,
    identity_automorphism,
    invert,
)
from .outerspace import MarkedMetricGraph, act, sym_distance, translation_length
from .records import ExperimentRecord

DEFAULT_WORD_CAP = 10_000_000  # letters per automorphism image
DEFAULT_ATOM_CAP = 64  # atoms per proxy current

PROXY_NOTE = (
    "boundary currents are finite-step proxies (pushforwards of the base "
    "current along the walk), not the limit objects"
)


class PositivityAbort(ToolkitError):
    """The proxy pair failed the positivity probe check; the experiment
    result would be meaningless, so it aborts loudly with the report."""

    def __init__(self, report):
        super().__init__(f"proxy current pair not positive on probes: {report}")
        self.report = report


@dataclass(frozen=True)
class WalkMeasure:
    """Finitely supported step distribution on the group."""

    support: tuple  # tuple[(Automorphism, probability), ...]
    name: str = ""

    def __post_init__(self):
        if not self.support:
            raise InputError("walk measure needs a nonempty support")
        total = 0.0
        for a, p in self.support:
            if not p > 0:
                raise InputError(f"walk probabilities must be positive, got {p}")
            total += p
        if abs(total - 1.0) > 1e-12:
            raise InputError(f"walk probabilities sum to {total}, not 1")

    @property
    def basis(self) -> Basis:
        return self.support[0][0].basis

    def draw(self, rng: random.Random) -> Automorphism:
        u = rng.random()
        acc = 0.0
        for a, p in self.support:
            acc += p
            if u < acc:
                return a
        return self.support[-1][0]

    def reflected(self) -> "WalkMeasure":
        return WalkMeasure(
            tuple((invert(a), p) for a, p in self.support),
            name=self.name + "-reflected" if self.name else "",
        )

    def is_dirac(self) -> bool:
        return len(self.support) == 1


def dirac(a: Automorphism) -> WalkMeasure:
    return WalkMeasure(((a, 1.0),), name=f"dirac({a.name})" if a.name else "dirac")


def uniform_measure(autos: Sequence, name: str = "") -> WalkMeasure:
    p = 1.0 / len(autos)
    return WalkMeasure(tuple((a, p) for a in autos), name=name)


def fibonacci_pair(basis: Basis) -> tuple:
    """The default nonelementary example in rank 2: the Fibonacci map and
    its conjugate by the generator swap — two independent fully
    irreducible elements."""
    if basis.rank != 2:
        raise InputError("the Fibonacci example pair lives in rank 2")
    phi = Automorphism(basis, ((1, 2), (1,)), ((2,), (-2, 1)), name="phi")
    swap = Automorphism(basis, ((2,), (1,)), ((2,), (1,)), name="swap")
    psi = compose(swap, compose(phi, swap))
    psi = Automorphism(basis, psi.images, psi.inverse_images, name="psi")
    return phi, psi


@dataclass(frozen=True)
class SamplePath:
    seed: int
    measure_name: str
    increments: tuple  # s_1 .. s_n
    positions: tuple  # g_0 = id, g_k = g_{k-1} s_k

    def __len__(self):
        return len(self.increments)


def _forward_rng(seed: int) -> random.Random:
    return random.Random(f"{seed}/fwd")


def _backward_rng(seed: int) -> random.Random:
    return random.Random(f"{seed}/bwd")


def _positions(start: Automorphism, increments, word_cap: int) -> list:
    out = [start]
    for k, s in enumerate(increments, start=1):
        try:
            out.append(compose(out[-1], s, max_letters=word_cap))
        except ResourceError as exc:
            raise ResourceError(
                f"word cap hit at step {k}: {exc}; last valid step {k - 1}",
                partial=tuple(out),
            ) from exc
    return out


def sample_path(
    m: WalkMeasure, n: int, seed: int, word_cap: int = DEFAULT_WORD_CAP
) -> SamplePath:
    if n < 0:
        raise InputError("path length must be >= 0")
    rng = _forward_rng(seed)
    increments = tuple(m.draw(rng) for _ in range(n))
    positions = _positions(identity_automorphism(m.basis), increments, word_cap)
    return SamplePath(seed, m.name, increments, tuple(positions))


@dataclass(frozen=True)
class BilateralPath:
    """Positions g_k for -n <= k <= n with g_0 = e; the backward half is an
    independent walk with the reflected step distribution."""

    seed: int
    measure_name: str
    forward: tuple  # g_0 .. g_n
    backward: tuple  # g_0, g_{-1}, .., g_{-n}

    @property
    def n(self) -> int:
        return len(self.forward) - 1

    def position(self, k: int) -> Automorphism:
        return self.forward[k] if k >= 0 else self.backward[-k]


def bilateral_path(
    m: WalkMeasure, n: int, seed: int, word_cap: int = DEFAULT_WORD_CAP
) -> BilateralPath:
    if n < 1:
        raise InputError("bilateral path needs n >= 1")
    fwd = sample_path(m, n, seed, word_cap)
    rng = _backward_rng(seed)
    reflected_steps = tuple(invert(m.draw(rng)) for _ in range(n))
    backward = _positions(
        identity_automorphism(m.basis), reflected_steps, word_cap
    )
    return BilateralPath(seed, m.name, fwd.positions, tuple(backward))


# ---------------------------------------------------------------------------
# measure statistics


@dataclass(frozen=True)
class MeasureStats:
    entropy: float
    log_moment: float


def measure_stats(
    m: WalkMeasure, generators: Sequence, radius_cap: int = 8
) -> MeasureStats:
    """Entropy of the step distribution and its first logarithmic moment
    with respect to the word metric of the given generators (log 0 = 0)."""
    entropy = -sum(p * math.log(p) for _, p in m.support)
    sym = list(generators) + [invert(g) for g in generators]
    dist = {identity_automorphism(m.basis).images: 0}
    frontier = [identity_automorphism(m.basis)]
    wanted = {a.images for a, _ in m.support}
    r = 0
    while wanted - set(dist) and r < radius_cap:
        r += 1
        nxt = []
        for g in frontier:
            for s in sym:
                h = compose(g, s)
                if h.images not in dist:
                    dist[h.images] = r
                    nxt.append(h)
        frontier = nxt
    missing = wanted - set(dist)
    if missing:
        names = [
            a.name or str(a) for a, _ in m.support if a.images in missing
        ]
        raise ResourceError(
            f"support elements {names} not within word-metric radius "
            f"{radius_cap} of the given generators"
        )
    log_moment = sum(
        p * (math.log(dist[a.images]) if dist[a.images] > 0 else 0.0)
        for a, p in m.support
    )
    return MeasureStats(entropy, log_moment)


# ---------------------------------------------------------------------------
# trackers


@dataclass(frozen=True)
class SpectrumTrack:
    classes: tuple
    vectors: tuple  # projectivized spectrum per step, k = 0..n
    epsilons: tuple  # l-infinity Cauchy gaps, k = 1..n


def spectrum_track(
    path: SamplePath, T0: MarkedMetricGraph, classes: Sequence
) -> SpectrumTrack:
    """Projectivized length spectra of the orbit trees along the path,
    with l-infinity gaps between consecutive steps."""
    if not classes:
        raise InputError("spectrum_track needs a nonempty class window")
    vectors = []
    for g in path.positions:
        T = act(g, T0)
        raw = [translation_length(T, c) for c in classes]
        total = float(sum(raw))
        vectors.append(tuple(float(v) / total for v in raw))
    eps = tuple(
        max(abs(a - b) for a, b in zip(v, w))
        for v, w in zip(vectors[1:], vectors)
    )
    return SpectrumTrack(tuple(classes), tuple(vectors), eps)


@dataclass(frozen=True)
class CurrentTrack:
    proxies: tuple  # normalized pushforwards of the base current
    gaps: tuple  # projective distances between consecutive proxies


def current_track(
    path: SamplePath,
    T0: MarkedMetricGraph,
    atom_cap: int = DEFAULT_ATOM_CAP,
) -> CurrentTrack:
    eta0 = base_current(T0.basis)
    proxies = []
    for k, g in enumerate(path.positions):
        cur = act_current(g, eta0)
        if cur.atom_count() > atom_cap:
            raise ResourceError(
                f"proxy current atom count {cur.atom_count()} exceeds cap "
                f"{atom_cap} at step {k}",
                partial=tuple(proxies),
            )
        proxies.append(normalize_against(cur, T0))
    gaps = tuple(
        projective_current_distance(a, b, T0)
        for a, b in zip(proxies[1:], proxies)
    )
    return CurrentTrack(tuple(proxies), gaps)


@dataclass(frozen=True)
class DriftTrack:
    values: tuple  # d_sym(T0, g_k T0) / k for k = 1..n
    estimate: float  # mean of the last quartile
    increments: tuple  # d_sym(T0, g_k T0) - d_sym(T0, g_{k-1} T0)

    @property
    def increment_estimate(self) -> float:
        q = self.increments[-max(1, len(self.increments) // 4):]
        return statistics.fmean(q)


def drift_track(path: SamplePath, T0: MarkedMetricGraph) -> DriftTrack:
    """Normalized symmetric distances along the path.

    ``estimate`` is the mean of the last quartile of d_sym/k;
    ``increment_estimate`` averages consecutive differences of d_sym,
    which converges much faster for hyperbolic-like steps.
    """
    if len(path) < 1:
        raise InputError("drift_track needs at least one step")
    dists = [0.0]
    for g in path.positions[1:]:
        dists.append(sym_distance(T0, act(g, T0)))
    values = tuple(d / k for k, d in enumerate(dists[1:], start=1))
    increments = tuple(b - a for a, b in zip(dists, dists[1:]))
    q = values[-max(1, len(values) // 4):]
    return DriftTrack(values, statistics.fmean(q), increments)


# ---------------------------------------------------------------------------
# strip-density experiment


def walk_probes(
    m: WalkMeasure,
    T0: MarkedMetricGraph,
    orbit_trees: Sequence,
    seed: int,
) -> ProbeSet:
    gens = [a for a, _ in m.support]
    return default_probes(T0, gens, extra_trees=orbit_trees, seed=seed)


def strip_density_experiment(
    m: WalkMeasure,
    n: int,
    L_grid: Sequence,
    seed: int,
    T0: MarkedMetricGraph,
    word_cap: int = DEFAULT_WORD_CAP,
) -> ExperimentRecord:
    """Density of forward times whose orbit point lies in the L-axis of
    the proxy boundary pair of a bilateral path.

    The proxy pair is the terminal pushforward of the base current on each
    side; probes are the forward orbit points plus the default recipe.
    Reports the density for every L in the grid and the smallest L at
    which the density reaches 1/2.
    """
    if not L_grid:
        raise InputError("strip-density needs a nonempty L grid")
    bp = bilateral_path(m, n, seed, word_cap)
    eta0 = base_current(T0.basis)
    c_plus = normalize_against(act_current(bp.position(n), eta0), T0)
    c_minus = normalize_against(act_current(bp.position(-n), eta0), T0)
    orbit = [act(bp.position(k), T0) for k in range(n + 1)]
    probes = walk_probes(m, T0, orbit, seed)
    positivity = check_positive_pair(c_minus, c_plus, probes.trees)
    if positivity.falsified:
        raise PositivityAbort(positivity)
    L_values = [float(L_value(c_minus, c_plus, T, probes)) for T in orbit]
    rows = []
    for L in L_grid:
        dens = sum(1 for v in L_values if v <= L) / (n + 1)
        rows.append((seed, float(L), dens))
    ranked = sorted(L_values)
    minimal_L = ranked[(n + 1 + 1) // 2 - 1]  # smallest L with density >= 1/2
    density_at_min = sum(1 for v in L_values if v <= minimal_L) / (n + 1)
    return ExperimentRecord(
        experiment="strip-density",
        seed=seed,
        params={"n": n, "L_grid": list(L_grid), "measure": m.name,
                "probes": probes.description},
        header=("seed", "L", "density"),
        rows=rows,
        summary={
            "L_values_per_step": L_values,
            "minimal_L_half_density": minimal_L,
            "density_at_minimal_L": density_at_min,
            "positivity_margin": positivity.min_margin,
        },
        notes=(PROXY_NOTE, "L values are probe lower bounds"),
    )


def default_class_window(basis: Basis, max_len: int = 3):
    """Test-class window spanning the length-spectrum coordinates that
    distinguish the trees visited at desk scale."""
    return tuple(enumerate_conj_classes(basis, max_len))
