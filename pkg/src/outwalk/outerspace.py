"""Marked metric graphs as points of (unprojectivized) outer space.

A point is a finite metric graph with no valence-1 or valence-2 vertices
together with a marking: a based loop per generator, plus a stored witness
expressing each non-tree edge (after collapsing a spanning tree) as a word
in the generators.  Translation lengths, candidate loops, the asymmetric
Lipschitz metric and its symmetrization all live here.

Edge paths reuse the word machinery: a path is a tuple of signed 1-based
edge indices and tightening is free reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .errors import InputError, InternalError, ResourceError
from .freegroup import (
    Automorphism,
    Basis,
    ConjClass,
    Letters,
    _apply_letters,
    canonical_cyclic,
    cyclic_reduce_letters,
    format_letters,
    inverse_word,
    parse_letters,
    reduce_word,
)

EdgePath = tuple

_WITNESS_VERIFY_BUDGET = 100_000


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def exact_ratio(num, den):
    """num/den as a Fraction when both are exact, else a float."""
    if _is_exact(num) and _is_exact(den):
        return Fraction(num) / Fraction(den)
    return num / den


@dataclass(frozen=True)
class MetricGraph:
    """Finite connected metric graph in subdivision-free normal form."""

    num_vertices: int
    edge_ends: tuple  # tuple[(u, v), ...], 0-based vertices; +e runs u -> v
    lengths: tuple  # positive, int/Fraction/float per geometric edge

    def __post_init__(self):
        if self.num_vertices < 1:
            raise InputError("graph needs at least one vertex")
        if len(self.edge_ends) != len(self.lengths):
            raise InputError("one length per edge required")
        for u, v in self.edge_ends:
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise InputError(f"edge endpoint out of range: ({u}, {v})")
        for l in self.lengths:
            if not l > 0:
                raise InputError(f"edge lengths must be positive, got {l}")
        val = [0] * self.num_vertices
        for u, v in self.edge_ends:
            val[u] += 1
            val[v] += 1
        for vtx, k in enumerate(val):
            if k <= 2:
                raise InputError(
                    f"vertex {vtx} has valence {k}; graphs must be "
                    "subdivision-free with no valence-1 vertices"
                )
        if not self._connected():
            raise InputError("graph not connected")

    def _connected(self) -> bool:
        adj = [[] for _ in range(self.num_vertices)]
        for u, v in self.edge_ends:
            adj[u].append(v)
            adj[v].append(u)
        seen = {0}
        stack = [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.num_vertices

    @property
    def num_edges(self) -> int:
        return len(self.edge_ends)

    @property
    def betti(self) -> int:
        return self.num_edges - self.num_vertices + 1

    @property
    def volume(self):
        return sum(self.lengths)

    def start(self, letter: int) -> int:
        u, v = self.edge_ends[abs(letter) - 1]
        return u if letter > 0 else v

    def end(self, letter: int) -> int:
        u, v = self.edge_ends[abs(letter) - 1]
        return v if letter > 0 else u

    def check_path(self, path: Sequence, at: int = None) -> None:
        cur = at
        for t in path:
            if not 1 <= abs(t) <= self.num_edges:
                raise InputError(f"edge letter {t} out of range")
            if cur is not None and self.start(t) != cur:
                raise InputError(f"path not continuous at letter {t}")
            cur = self.end(t)
        if at is not None and path and cur != at:
            raise InputError("path is not a closed loop at its basepoint")


@dataclass(frozen=True)
class MarkedMetricGraph:
    """A point of cv_N: metric graph + marking + invertibility witness.

    ``marking[i]`` is the tightened based loop realizing generator i;
    ``from_rose[j]`` expresses the j-th non-tree edge (spanning tree chosen
    deterministically by BFS from the basepoint, smallest edge index first)
    as a word in the generators.  Substituting each way must give back the
    generators; this is verified on construction up to a letter budget.
    """

    basis: Basis
    graph: MetricGraph
    basepoint: int
    marking: tuple  # tuple[EdgePath, ...]
    from_rose: tuple  # tuple[Letters, ...]

    def __post_init__(self):
        g, n = self.graph, self.basis.rank
        if g.betti != n:
            raise InputError(f"graph has rank {g.betti}, marking needs {n}")
        if not 0 <= self.basepoint < g.num_vertices:
            raise InputError("basepoint out of range")
        if len(self.marking) != n:
            raise InputError("one marking loop per generator required")
        for p in self.marking:
            g.check_path(p, at=self.basepoint)
            if reduce_word(p) != tuple(p):
                raise InputError("marking path not tightened")
        if len(self.from_rose) != n:
            raise InputError("one witness word per non-tree edge required")
        for w in self.from_rose:
            self.basis.check_letters(w)
        # substitution work is (word length) x (max image length), not the
        # input size; skip the round-trip check on walk-scale markings
        max_from = max((len(w) for w in self.from_rose), default=1)
        max_to = max((len(p) for p in self.to_rose), default=1)
        work = sum(map(len, self.to_rose)) * max(max_from, 1)
        work += sum(map(len, self.from_rose)) * max(max_to, 1)
        if work <= _WITNESS_VERIFY_BUDGET:
            self._verify_witness()

    # -- spanning tree / rose collapse ------------------------------------

    @cached_property
    def _tree_edges(self) -> frozenset:
        g = self.graph
        adj = [[] for _ in range(g.num_vertices)]
        for idx, (u, v) in enumerate(g.edge_ends):
            adj[u].append((idx, v))
            adj[v].append((idx, u))
        for a in adj:
            a.sort()
        tree, seen = set(), {self.basepoint}
        queue = [self.basepoint]
        while queue:
            cur = queue.pop(0)
            for idx, nxt in adj[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    tree.add(idx)
                    queue.append(nxt)
        return frozenset(tree)

    @cached_property
    def nontree_edges(self) -> tuple:
        """1-based indices of non-tree edges; the j-th is rose letter j+1."""
        return tuple(
            i + 1 for i in range(self.graph.num_edges) if i not in self._tree_edges
        )

    @cached_property
    def _rose_letter(self) -> dict:
        return {e: j + 1 for j, e in enumerate(self.nontree_edges)}

    def path_to_rose(self, path: Sequence) -> Letters:
        """Collapse the spanning tree: keep non-tree letters, reduce."""
        lut = self._rose_letter
        out = []
        for t in path:
            j = lut.get(abs(t))
            if j is not None:
                s = j if t > 0 else -j
                if out and out[-1] == -s:
                    out.pop()
                else:
                    out.append(s)
        return tuple(out)

    @cached_property
    def to_rose(self) -> tuple:
        return tuple(self.path_to_rose(p) for p in self.marking)

    def _verify_witness(self):
        inv_from = tuple(inverse_word(w) for w in self.from_rose)
        inv_to = tuple(inverse_word(w) for w in self.to_rose)
        for i in range(self.basis.rank):
            if _apply_letters(self.from_rose, inv_from, self.to_rose[i]) != (i + 1,):
                raise InputError(
                    f"marking witness fails: generator {i + 1} does not "
                    "survive the rose round trip"
                )
        for j in range(self.basis.rank):
            if _apply_letters(self.to_rose, inv_to, self.from_rose[j]) != (j + 1,):
                raise InputError(
                    f"marking witness fails: rose letter {j + 1} does not "
                    "survive the inverse round trip"
                )

    # -- marking evaluation ------------------------------------------------

    @cached_property
    def _marking_inverted(self) -> tuple:
        return tuple(inverse_word(p) for p in self.marking)

    def word_to_path(self, letters: Sequence) -> EdgePath:
        """Tightened based edge loop realizing a word via the marking."""
        return _apply_letters(self.marking, self._marking_inverted, letters)

    @property
    def volume(self):
        return self.graph.volume

    def path_length(self, path: Sequence):
        lengths = self.graph.lengths
        return sum(lengths[abs(t) - 1] for t in path)


# ---------------------------------------------------------------------------
# constructors


def rose(basis: Basis, lengths: Sequence) -> MarkedMetricGraph:
    """The rose with one petal per generator; ``rose(basis, [1]*N)`` is the
    unit rose used as the basepoint of every experiment."""
    if len(lengths) != basis.rank:
        raise InputError("one petal length per generator required")
    graph = MetricGraph(
        1, tuple((0, 0) for _ in range(basis.rank)), tuple(lengths)
    )
    marking = tuple((i + 1,) for i in range(basis.rank))
    from_rose = tuple((i + 1,) for i in range(basis.rank))
    return MarkedMetricGraph(basis, graph, 0, marking, from_rose)


def unit_rose(basis: Basis) -> MarkedMetricGraph:
    return rose(basis, (1,) * basis.rank)


# ---------------------------------------------------------------------------
# operations


def translation_length(T: MarkedMetricGraph, c) -> object:
    """Metric length of the geodesic loop freely homotopic to c.

    Accepts a ConjClass or a raw letter tuple; zero only for the trivial
    class (the action is free).  Memoized per tree instance: along a walk
    the same classes are measured against the same trees many times and
    the marking paths grow exponentially.
    """
    letters = c.cyclic_word if isinstance(c, ConjClass) else tuple(c)
    cache = T.__dict__.setdefault("_length_cache", {})
    hit = cache.get(letters)
    if hit is not None:
        return hit
    path = T.word_to_path(letters)
    core, _ = cyclic_reduce_letters(path)
    value = T.path_length(core)
    cache[letters] = value
    return value


def act(a: Automorphism, T: MarkedMetricGraph) -> MarkedMetricGraph:
    """The Out(F_N) action: same graph, marking precomposed with a^-1, so
    that translation lengths satisfy |g|_{aT} = |a^-1(g)|_T."""
    if a.basis != T.basis:
        raise InputError("automorphism and graph use different bases")
    marking = tuple(T.word_to_path(w) for w in a.inverse_images)
    from_rose = tuple(a.apply_letters(w) for w in T.from_rose)
    return MarkedMetricGraph(T.basis, T.graph, T.basepoint, marking, from_rose)


def length_spectrum(T: MarkedMetricGraph, classes: Sequence, projectivize=False):
    if not classes:
        raise InputError("length_spectrum needs a nonempty class list")
    vec = [translation_length(T, c) for c in classes]
    if projectivize:
        total = sum(vec)
        if total == 0:
            raise InternalError("degenerate (all-zero) length spectrum")
        vec = [exact_ratio(v, total) for v in vec]
    return vec


# ---------------------------------------------------------------------------
# candidates: embedded circles, figure-eights, barbells


def _incidence(graph: MetricGraph):
    out = [[] for _ in range(graph.num_vertices)]
    for idx, (u, v) in enumerate(graph.edge_ends):
        out[u].append(idx + 1)
        out[v].append(-(idx + 1))
    return out


def _simple_cycles(graph: MetricGraph) -> list:
    """All embedded circles, one per unoriented cyclic class, as tightened
    cyclic edge words; deterministic order."""
    inc = _incidence(graph)
    found = {}

    def record(path):
        key = canonical_cyclic(path)
        if key not in found:
            found[key] = tuple(path)

    def dfs(start, cur, path, vertices, edges):
        for letter in inc[cur]:
            e = abs(letter)
            if e in edges:
                continue
            nxt = graph.end(letter)
            if nxt == start and path:
                record(path + [letter])
            elif nxt == start and not path and graph.start(letter) == start:
                # a loop edge at the start vertex
                record([letter])
            elif nxt not in vertices and nxt != start:
                vertices.add(nxt)
                edges.add(e)
                dfs(start, nxt, path + [letter], vertices, edges)
                edges.discard(e)
                vertices.discard(nxt)

    for s in range(graph.num_vertices):
        dfs(s, s, [], set(), set())
    return [found[k] for k in sorted(found)]


def _cycle_vertices(graph: MetricGraph, cycle) -> frozenset:
    return frozenset(graph.start(t) for t in cycle)


def _rotate_to(graph: MetricGraph, cycle, v):
    for k, t in enumerate(cycle):
        if graph.start(t) == v:
            return cycle[k:] + cycle[:k]
    raise InternalError("cycle does not pass through requested vertex")


def _simple_arcs(graph: MetricGraph, sources, targets, forbidden_vertices,
                 forbidden_edges) -> list:
    """Embedded arcs from a source to a target vertex avoiding the given
    interior vertices/edges; endpoints may lie in forbidden_vertices."""
    inc = _incidence(graph)
    arcs = []

    def dfs(cur, path, interior):
        for letter in inc[cur]:
            e = abs(letter)
            if e in forbidden_edges or any(abs(t) == e for t in path):
                continue
            nxt = graph.end(letter)
            if nxt in targets:
                arcs.append(tuple(path + [letter]))
                continue
            if nxt in forbidden_vertices or nxt in interior:
                continue
            dfs(nxt, path + [letter], interior | {nxt})

    for s in sorted(sources):
        dfs(s, [], set())
    return arcs


@dataclass(frozen=True)
class CandidateSet:
    classes: tuple  # tuple[ConjClass, ...], canonical, deduplicated
    source: str

    def __post_init__(self):
        if not self.classes:
            raise InternalError("candidate set is empty")


def _loops_to_classes(T: MarkedMetricGraph, loops) -> dict:
    """Map each loop to its conjugacy class; values are the loop's metric
    length in T (candidate loops are cyclically tight edge paths, so this
    is the translation length for free)."""
    inv_from = tuple(inverse_word(w) for w in T.from_rose)
    seen = {}
    for loop in loops:
        rose_word = T.path_to_rose(loop)
        core, _ = cyclic_reduce_letters(rose_word)
        word = _apply_letters(T.from_rose, inv_from, core)
        c = ConjClass.of(T.basis, word)
        if c.cyclic_word and c not in seen:
            seen[c] = T.path_length(loop)
    return dict(
        sorted(seen.items(), key=lambda kv: (len(kv[0]), kv[0].cyclic_word))
    )


def candidates(T: MarkedMetricGraph, budget: int = 100_000) -> CandidateSet:
    """Candidate loops of T: all embedded circles, figure-eights and
    barbells, expressed as conjugacy classes via the marking witness.
    Memoized per tree instance."""
    hit = T.__dict__.get("_candidate_cache")
    if hit is not None:
        return hit
    graph = T.graph
    cycles = _simple_cycles(graph)
    if len(cycles) ** 2 > budget:
        raise ResourceError(f"too many embedded circles ({len(cycles)})")
    loops = [list(c) for c in cycles]
    vsets = [_cycle_vertices(graph, c) for c in cycles]
    esets = [frozenset(abs(t) for t in c) for c in cycles]
    for i in range(len(cycles)):
        for j in range(i + 1, len(cycles)):
            shared = vsets[i] & vsets[j]
            if len(shared) == 1:
                (v,) = shared
                c1 = _rotate_to(graph, list(cycles[i]), v)
                c2 = _rotate_to(graph, list(cycles[j]), v)
                loops.append(c1 + c2)
                loops.append(c1 + list(inverse_word(c2)))
            elif not shared:
                arcs = _simple_arcs(
                    graph, vsets[i], vsets[j],
                    vsets[i] | vsets[j], esets[i] | esets[j],
                )
                for arc in arcs:
                    a0 = graph.start(arc[0])
                    b0 = graph.end(arc[-1])
                    c1 = _rotate_to(graph, list(cycles[i]), a0)
                    c2 = _rotate_to(graph, list(cycles[j]), b0)
                    back = list(inverse_word(arc))
                    loops.append(c1 + list(arc) + c2 + back)
                    loops.append(c1 + list(arc) + list(inverse_word(c2)) + back)
    by_class = _loops_to_classes(T, loops)
    # seed the length memo with the loop lengths: recomputing them through
    # the marking is quadratic in the marking size along a walk
    cache = T.__dict__.setdefault("_length_cache", {})
    for c, length in by_class.items():
        if not length > 0:
            raise InternalError(f"candidate {c} has zero length")
        cache.setdefault(c.cyclic_word, length)
    result = CandidateSet(
        tuple(by_class),
        source=f"graph(V={graph.num_vertices},E={graph.num_edges})",
    )
    T.__dict__["_candidate_cache"] = result
    return result


# ---------------------------------------------------------------------------
# Lipschitz metric


def lipschitz_witness(T: MarkedMetricGraph, T2: MarkedMetricGraph):
    """(max length ratio over candidates of T, witness class).

    Raw lengths; exact Fractions whenever both trees have exact lengths.
    The candidate maximum dominates |g|_{T2}/|g|_T for every class g, so
    this is the optimal Lipschitz stretch, not just a lower bound.
    """
    best, best_c = None, None
    for c in candidates(T).classes:
        r = exact_ratio(translation_length(T2, c), translation_length(T, c))
        if best is None or r > best:
            best, best_c = r, c
    return best, best_c


def lipschitz(T: MarkedMetricGraph, T2: MarkedMetricGraph):
    return lipschitz_witness(T, T2)[0]


def normalize(T: MarkedMetricGraph) -> MarkedMetricGraph:
    """Rescale to volume 1 (exactly, when lengths are exact)."""
    vol = T.volume
    if vol == 1:
        return T
    lengths = tuple(exact_ratio(l, vol) for l in T.graph.lengths)
    graph = MetricGraph(T.graph.num_vertices, T.graph.edge_ends, lengths)
    return MarkedMetricGraph(T.basis, graph, T.basepoint, T.marking, T.from_rose)


def distance(T: MarkedMetricGraph, T2: MarkedMetricGraph) -> float:
    """One-sided Lipschitz metric: log of the optimal Lipschitz constant
    between covolume-1 representatives."""
    lip = lipschitz(T, T2)
    ratio = exact_ratio(lip * T.volume, T2.volume)
    return math.log(ratio)


def sym_distance(T: MarkedMetricGraph, T2: MarkedMetricGraph) -> float:
    return distance(T, T2) + distance(T2, T)


# ---------------------------------------------------------------------------
# serialization


def _format_length(l) -> str:
    if isinstance(l, Fraction):
        return str(l)
    return repr(l)


def to_text(T: MarkedMetricGraph) -> str:
    basis, g = T.basis, T.graph
    lines = ["# marked metric graph"]
    lines.append(f"rank: {basis.rank}")
    lines.append("generators: " + " ".join(basis.names))
    lines.append(f"vertices: {g.num_vertices}")
    for i, ((u, v), l) in enumerate(zip(g.edge_ends, g.lengths)):
        lines.append(f"edge: {i + 1} {u} {v} {_format_length(l)}")
    lines.append(f"basepoint: {T.basepoint}")
    for i, p in enumerate(T.marking):
        path = " ".join(str(t) for t in p) if p else "-"
        lines.append(f"marking: {basis.names[i]} -> {path}")
    for j, e in enumerate(T.nontree_edges):
        lines.append(
            f"witness: {e} -> {format_letters(basis, T.from_rose[j])}"
        )
    return "\n".join(lines) + "\n"


def from_text(text: str) -> MarkedMetricGraph:
    """Parse the structured text format written by :func:`to_text`.

    Errors carry 1-based line numbers.
    """
    rank = None
    names = None
    num_vertices = None
    edges = {}
    basepoint = None
    marking_raw = {}
    witness_raw = {}

    def fail(no, msg):
        raise InputError(f"line {no}: {msg}")

    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            fail(no, f"expected 'key: value', got {raw!r}")
        key, _, val = line.partition(":")
        key, val = key.strip(), val.strip()
        try:
            if key == "rank":
                rank = int(val)
            elif key == "generators":
                names = tuple(val.split())
            elif key == "vertices":
                num_vertices = int(val)
            elif key == "edge":
                idx, u, v, l = val.split()
                edges[int(idx)] = (int(u), int(v), Fraction(l))
            elif key == "basepoint":
                basepoint = int(val)
            elif key == "marking":
                gen, _, path = val.partition("->")
                letters = () if path.strip() == "-" else tuple(
                    int(t) for t in path.split()
                )
                marking_raw[gen.strip()] = letters
            elif key == "witness":
                e, _, word = val.partition("->")
                witness_raw[int(e)] = (no, word.strip())
            else:
                fail(no, f"unknown key {key!r}")
        except (ValueError, TypeError) as exc:
            fail(no, f"cannot parse {key!r} entry: {exc}")

    if rank is None or num_vertices is None or basepoint is None:
        raise InputError("missing one of rank/vertices/basepoint")
    basis = Basis(rank, names) if names else Basis(rank)
    if sorted(edges) != list(range(1, len(edges) + 1)):
        raise InputError("edge indices must be 1..E with no gaps")
    edge_ends = tuple(edges[i][:2] for i in sorted(edges))
    lengths = tuple(
        int(edges[i][2]) if edges[i][2].denominator == 1 else edges[i][2]
        for i in sorted(edges)
    )
    graph = MetricGraph(num_vertices, edge_ends, lengths)
    marking = []
    for nm in basis.names:
        if nm not in marking_raw:
            raise InputError(f"missing marking for generator {nm!r}")
        marking.append(marking_raw[nm])
    shell = MarkedMetricGraph.__new__(MarkedMetricGraph)
    object.__setattr__(shell, "basis", basis)
    object.__setattr__(shell, "graph", graph)
    object.__setattr__(shell, "basepoint", basepoint)
    object.__setattr__(shell, "marking", tuple(marking))
    nontree = shell.nontree_edges
    from_rose = []
    for e in nontree:
        if e not in witness_raw:
            raise InputError(f"missing witness for non-tree edge {e}")
        no, word = witness_raw[e]
        try:
            from_rose.append(parse_letters(basis, word))
        except InputError as exc:
            raise InputError(f"line {no}: {exc}") from exc
    extra = set(witness_raw) - set(nontree)
    if extra:
        raise InputError(
            f"witness given for tree edges {sorted(extra)}; the spanning "
            f"tree (BFS from the basepoint) leaves {list(nontree)} free"
        )
    return MarkedMetricGraph(basis, graph, basepoint, tuple(marking), tuple(from_rose))
