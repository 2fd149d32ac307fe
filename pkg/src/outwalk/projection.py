"""Combinatorial projection from marked graphs to finite class sets.

The projection of a tree is the set of conjugacy classes realized by its
embedded circles.  It forgets the metric, is equivariant for the group
action, and is the coarse invariant tracked along random walks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError
from .freegroup import Automorphism, apply_class
from .outerspace import MarkedMetricGraph, _loops_to_classes, _simple_cycles, act


def project(T: MarkedMetricGraph) -> frozenset:
    """Classes of the embedded circles of T; metric-blind and finite."""
    loops = [list(c) for c in _simple_cycles(T.graph)]
    return frozenset(_loops_to_classes(T, loops))


def project_image(a: Automorphism, classes: frozenset) -> frozenset:
    return frozenset(apply_class(a, c) for c in classes)


@dataclass(frozen=True)
class ProjectionTrack:
    sets: tuple  # projection per step
    jumps: tuple  # symmetric-difference sizes between consecutive steps


def projection_track(path, T0: MarkedMetricGraph) -> ProjectionTrack:
    """Projections of the orbit trees along a sample path, with the size
    of the symmetric difference between consecutive steps."""
    if not path.positions:
        raise InputError("projection_track needs a nonempty path")
    sets = tuple(project(act(g, T0)) for g in path.positions)
    jumps = tuple(len(a ^ b) for a, b in zip(sets, sets[1:]))
    return ProjectionTrack(sets, jumps)
