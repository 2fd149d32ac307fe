"""Axes of positive current pairs, the height function, and strips.

The theoretical objects quantify over the compact closure of projectivized
outer space; only interior trees are representable here, so every supremum
is evaluated over an explicit finite probe set and every axis verdict is a
lower-bound certificate ("in-axis-up-to-probes"), never a proof.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import ContractError, InputError, ResourceError
from .freegroup import (
    Automorphism,
    Basis,
    compose,
    enumerate_conj_classes,
    identity_automorphism,
    invert,
)
from .currents import RationalCurrent, pair, stretch
from .outerspace import (
    MarkedMetricGraph,
    act,
    exact_ratio,
    lipschitz,
    rose,
    sym_distance,
    translation_length,
)

THEOREM_SLACK = 1e-9  # float slack on theorem inequalities (log/ratio chains)


@dataclass(frozen=True)
class ProbeSet:
    """Finite family of interior trees standing in for the closure."""

    trees: tuple
    description: str = ""

    def __post_init__(self):
        if not self.trees:
            raise InputError("probe set must be nonempty")

    def __iter__(self):
        return iter(self.trees)

    def __len__(self):
        return len(self.trees)

    def contains(self, T: MarkedMetricGraph) -> bool:
        return any(P == T for P in self.trees)

    def union(self, extra: Sequence) -> "ProbeSet":
        trees = list(self.trees)
        for T in extra:
            if not any(P == T for P in trees):
                trees.append(T)
        return ProbeSet(tuple(trees), self.description + " + extras")


def default_probes(
    basepoint: MarkedMetricGraph,
    generators: Sequence = (),
    extra_trees: Sequence = (),
    seed: int = 0,
    n_random_roses: int = 16,
) -> ProbeSet:
    """Default probe recipe: the orbit of the basepoint under the radius-2
    ball of the experiment generators, a seeded batch of rational-length
    roses, and any points of interest the caller supplies."""
    basis = basepoint.basis
    sym = list(generators) + [invert(g) for g in generators]
    ball = {(): identity_automorphism(basis)}
    layer = dict(ball)
    for _ in range(2):
        nxt = {}
        for key, g in layer.items():
            for i, s in enumerate(sym):
                h = compose(g, s)
                nxt[key + (i,)] = h
        layer = nxt
        ball.update(nxt)
    trees = []
    seen = set()
    for key in sorted(ball):
        T = act(ball[key], basepoint)
        if T not in seen:
            seen.add(T)
            trees.append(T)
    rng = random.Random(f"probes:{seed}")
    for _ in range(n_random_roses):
        lengths = tuple(
            Fraction(rng.randint(2, 16), 8) for _ in range(basis.rank)
        )
        T = rose(basis, lengths)
        if T not in seen:
            seen.add(T)
            trees.append(T)
    for T in extra_trees:
        if T not in seen:
            seen.add(T)
            trees.append(T)
    return ProbeSet(
        tuple(trees),
        f"B2-orbit({len(generators)} gens) + {n_random_roses} roses"
        f" + {len(tuple(extra_trees))} extras, seed={seed}",
    )


# ---------------------------------------------------------------------------
# the l and L functionals


def l_value(
    c1: RationalCurrent,
    c2: RationalCurrent,
    T: MarkedMetricGraph,
    T2: MarkedMetricGraph,
):
    """Lipschitz distortion divided by the best stretch of the pair;
    always >= 1, equal to 1 at T2 = T.  Scale-invariant in both trees."""
    s = stretch([c1, c2], T, T2)
    if not s > 0:
        raise InputError("pair has zero stretch; not positive on this input")
    return exact_ratio(lipschitz(T, T2), s)


def L_value(
    c1: RationalCurrent,
    c2: RationalCurrent,
    T: MarkedMetricGraph,
    probes: ProbeSet,
):
    """Max of l over the probe set: an explicit lower bound for the
    theoretical sup over the closure; deterministic given the probes."""
    return max(l_value(c1, c2, T, P) for P in probes)


@dataclass(frozen=True)
class AxisCertificate:
    tree_id: str
    pair_id: str
    L_lower: float  # max of l over probes (lower bound for the true L)
    threshold: float
    verdict: str  # "in-axis-up-to-probes" | "excluded"

    def __post_init__(self):
        if self.verdict == "excluded" and not self.L_lower > self.threshold:
            raise ContractError("excluded verdict requires L_lower > threshold")
        if self.L_lower < 1 - THEOREM_SLACK:
            raise ContractError(f"L_lower = {self.L_lower} < 1 is impossible")

    @property
    def in_axis(self) -> bool:
        return self.verdict == "in-axis-up-to-probes"

    @property
    def margin(self) -> float:
        return self.threshold - self.L_lower


def axis_membership(
    c1: RationalCurrent,
    c2: RationalCurrent,
    T: MarkedMetricGraph,
    L: float,
    probes: ProbeSet,
    tree_id: str = "",
    pair_id: str = "",
) -> AxisCertificate:
    """Certificate for T lying in the L-axis of the pair, up to probes.

    ``excluded`` is definitive (the probe lower bound already exceeds L);
    ``in-axis-up-to-probes`` is as strong as the probe set.
    """
    if L < 1:
        raise InputError(f"axis threshold must be >= 1, got {L}")
    Lv = float(L_value(c1, c2, T, probes))
    verdict = "excluded" if Lv > L else "in-axis-up-to-probes"
    return AxisCertificate(tree_id, pair_id, Lv, float(L), verdict)


def pair_L_value(
    minus_list: Sequence,
    plus_list: Sequence,
    T: MarkedMetricGraph,
    probes: ProbeSet,
):
    """Min over supplied proxy-current pairs of L_value: the computable
    stand-in for the axis of a boundary tree pair (finite proxy lists
    replace the uncomputable ergodic-current sets)."""
    if not minus_list or not plus_list:
        raise InputError("need at least one proxy current per side")
    return min(
        L_value(cm, cp, T, probes) for cm in minus_list for cp in plus_list
    )


# ---------------------------------------------------------------------------
# the height function and the sandwich inequality


def sigma(
    T: MarkedMetricGraph, c_minus: RationalCurrent, c_plus: RationalCurrent
) -> float:
    """Height of T relative to the pair: log of the pairing ratio.
    Invariant under rescaling T."""
    num = pair(T, c_plus)
    den = pair(T, c_minus)
    if not (num > 0 and den > 0):
        raise InputError("sigma needs both pairings positive")
    return math.log(exact_ratio(num, den))


@dataclass(frozen=True)
class SandwichReport:
    sigma_gap: float
    d_sym: float
    two_log_L1: float
    upper_bound: float  # sigma_gap + two_log_L1
    lower_ok: bool
    upper_ok: bool

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.upper_ok


def sandwich_check(
    S: MarkedMetricGraph,
    T: MarkedMetricGraph,
    c_minus: RationalCurrent,
    c_plus: RationalCurrent,
    L1: float,
    probes: ProbeSet,
) -> SandwichReport:
    """Check |sigma(S) - sigma(T)| <= d_sym(S, T) <= |...| + 2 log L1.

    Requires S and T certified in-axis at L1 with a probe set containing
    both trees: the upper bound is only a theorem when the sup defining L
    is evaluated at the two trees themselves.
    """
    if not (probes.contains(S) and probes.contains(T)):
        raise ContractError(
            "sandwich_check requires the probe set to contain both trees"
        )
    for name, tree in (("S", S), ("T", T)):
        cert = axis_membership(c_minus, c_plus, tree, L1, probes, tree_id=name)
        if not cert.in_axis:
            raise ContractError(
                f"{name} is not in the axis at L1={L1} "
                f"(L_lower={cert.L_lower}); the upper bound is not a theorem"
            )
    gap = abs(sigma(S, c_minus, c_plus) - sigma(T, c_minus, c_plus))
    d = sym_distance(S, T)
    two_log = 2.0 * math.log(L1)
    return SandwichReport(
        sigma_gap=gap,
        d_sym=d,
        two_log_L1=two_log,
        upper_bound=gap + two_log,
        lower_ok=gap <= d + THEOREM_SLACK,
        upper_ok=d <= gap + two_log + THEOREM_SLACK,
    )


# ---------------------------------------------------------------------------
# strips in the group


def strip_membership(
    a: Automorphism,
    c_minus: RationalCurrent,
    c_plus: RationalCurrent,
    L: float,
    probes: ProbeSet,
    basepoint: MarkedMetricGraph,
) -> bool:
    """Whether a moves the basepoint into the L-axis of the pair
    (up to probes)."""
    return axis_membership(
        c_minus, c_plus, act(a, basepoint), L, probes, tree_id=a.name
    ).in_axis


@dataclass(frozen=True)
class CensusResult:
    radii: tuple  # k = 0..k_max
    ball_sizes: tuple  # distinct orbit points within radius k
    strip_counts: tuple  # members of the strip within radius k
    lambda_hat: float  # max over k >= 1 of strip_counts[k] / k
    collisions: int  # distinct group words merged onto one orbit point

    def rows(self):
        return list(zip(self.radii, self.ball_sizes, self.strip_counts))


def strip_ball_census(
    c_minus: RationalCurrent,
    c_plus: RationalCurrent,
    L: float,
    probes: ProbeSet,
    generators: Sequence,
    k_max: int,
    basepoint: MarkedMetricGraph,
    fingerprint_len: int = 3,
    max_ball: int = 200_000,
) -> CensusResult:
    """Count strip members in word-metric balls of the subgroup generated.

    The ball is enumerated breadth-first over the symmetrized generators;
    group elements are merged when their orbit trees have identical length
    spectra on the class window (strips live in the action on orbit
    points, and such collisions are counted, not hidden).
    """
    if k_max < 0:
        raise InputError("k_max must be >= 0")
    basis = basepoint.basis
    window = enumerate_conj_classes(basis, fingerprint_len)
    sym = []
    for g in generators:
        sym.append(g)
        inv = invert(g)
        if inv.images != g.images:
            sym.append(inv)

    def fingerprint(T):
        return tuple(translation_length(T, c) for c in window)

    ident = identity_automorphism(basis)
    T_id = act(ident, basepoint)
    seen = {fingerprint(T_id): ident}
    frontier = [(ident, T_id)]
    collisions = 0
    ball_sizes, strip_counts = [], []
    members = 1 if strip_membership(ident, c_minus, c_plus, L, probes, basepoint) else 0
    ball_sizes.append(1)
    strip_counts.append(members)
    for k in range(1, k_max + 1):
        new_frontier = []
        for g, _ in frontier:
            for s in sym:
                h = compose(g, s)
                T = act(h, basepoint)
                fp = fingerprint(T)
                if fp in seen:
                    if seen[fp].images != h.images:
                        collisions += 1
                    continue
                seen[fp] = h
                new_frontier.append((h, T))
                if len(seen) > max_ball:
                    raise ResourceError(
                        f"ball size exceeded {max_ball} at radius {k}",
                        partial=CensusResult(
                            tuple(range(k)),
                            tuple(ball_sizes),
                            tuple(strip_counts),
                            _census_slope(strip_counts),
                            collisions,
                        ),
                    )
        for h, T in new_frontier:
            cert = axis_membership(c_minus, c_plus, T, L, probes, tree_id=h.name)
            if cert.in_axis:
                members += 1
        frontier = new_frontier
        ball_sizes.append(len(seen))
        strip_counts.append(members)
    return CensusResult(
        tuple(range(k_max + 1)),
        tuple(ball_sizes),
        tuple(strip_counts),
        _census_slope(strip_counts),
        collisions,
    )


def _census_slope(strip_counts) -> float:
    vals = [count / k for k, count in enumerate(strip_counts) if k >= 1]
    return max(vals) if vals else 0.0
