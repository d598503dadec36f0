"""Continuous-time classical random walks and their mean hitting times.

Two rate conventions are supported:

``"vertex"`` (default)
    the walker leaves each vertex at total rate 1 and picks a neighbour
    uniformly, ``L = D^-1 A - I``.  Hitting times equal the expected number of
    steps of the discrete simple random walk.
``"edge"``
    every edge carries rate 1, ``L = A - D``.
"""
from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, LinAlgWarning, lu_factor, lu_solve

from .exceptions import NumericalError, UnreachableError, ValidationError
from .graphs import ColumnPartition, Graph, bfs_depths, column_partition, hypercube

CONVENTIONS = ("vertex", "edge")


@dataclass(frozen=True)
class WalkGenerator:
    """Rate matrix ``L``: nonnegative off-diagonal rates, rows summing to zero."""

    matrix: np.ndarray
    labels: tuple = ()

    @property
    def n(self) -> int:
        return len(self.matrix)


def _generator_from_rates(R: np.ndarray, labels=()) -> WalkGenerator:
    L = R - np.diag(R.sum(axis=1))
    return WalkGenerator(L, tuple(labels))


def walk_generator(g: Graph, convention: str = "vertex") -> WalkGenerator:
    if convention not in CONVENTIONS:
        raise ValidationError(f"unknown rate convention {convention!r}")
    A = g.adjacency()
    if convention == "vertex":
        deg = A.sum(axis=1)
        A = np.divide(A, deg[:, None], out=np.zeros_like(A), where=deg[:, None] > 0)
    return _generator_from_rates(A, range(1, g.n + 1))


def generator_hitting_times(L: WalkGenerator | np.ndarray, target: int) -> np.ndarray:
    """Mean hitting times of the 0-based state ``target`` from every state.

    Solves ``h[target] = 0`` and ``(L h)[v] = -1`` for ``v != target`` by LU factorisation.
    """
    L = np.asarray(L.matrix if isinstance(L, WalkGenerator) else L, dtype=float)
    n = len(L)
    keep = np.array([v for v in range(n) if v != target], dtype=int)
    h = np.zeros(n)
    if len(keep) == 0:
        return h
    M = L[np.ix_(keep, keep)]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", LinAlgWarning)
            lu = lu_factor(M, check_finite=True)
    except (LinAlgError, LinAlgWarning) as exc:
        raise NumericalError(f"hitting-time system is singular: {exc}") from exc
    if np.any(np.abs(np.diag(lu[0])) < 1e-14 * max(1.0, np.abs(M).max())):
        raise NumericalError("hitting-time system is singular")
    h[keep] = lu_solve(lu, -np.ones(len(keep)))
    if not np.all(np.isfinite(h)):
        raise NumericalError("hitting-time solve produced non-finite values")
    return h


def mean_hitting_time(g: Graph, source: int | None = None, target: int | None = None,
                      convention: str = "vertex") -> float:
    source = g.input_vertex if source is None else source
    target = g.output_vertex if target is None else target
    depth = bfs_depths(g, target)
    if any(d is None for d in depth):
        # states that cannot reach the target make the system singular
        raise UnreachableError("graph is not connected")
    return float(generator_hitting_times(walk_generator(g, convention), target - 1)[source - 1])


def lumped_generator(g: Graph, partition: ColumnPartition | None = None,
                     convention: str = "vertex") -> WalkGenerator:
    """Birth-death chain on column indices.

    A vertex in column ``n`` (of ``N``) has ``N - n`` neighbours ahead and
    ``n - 1`` behind, so forward/backward rates are those counts (edge
    convention) or the counts divided by the degree ``N - 1`` (vertex convention).
    """
    if convention not in CONVENTIONS:
        raise ValidationError(f"unknown rate convention {convention!r}")
    partition = column_partition(g) if partition is None else partition
    n = partition.n
    R = np.zeros((n, n))
    nbrs = g.neighbors()
    col_of = {v: k for k, col in enumerate(partition.columns) for v in col}
    for k, col in enumerate(partition.columns):
        rep = col[0]
        forward = sum(col_of[w] == k + 1 for w in nbrs[rep - 1])
        backward = sum(col_of[w] == k - 1 for w in nbrs[rep - 1])
        scale = forward + backward if convention == "vertex" and forward + backward else 1
        if k + 1 < n:
            R[k, k + 1] = forward / scale
        if k > 0:
            R[k, k - 1] = backward / scale
    return _generator_from_rates(R, range(1, n + 1))


def occupation_generator(d: int, convention: str = "vertex") -> WalkGenerator:
    """Lumped walk on the two-link hypercube: state ``(a, b, c)`` counts coordinates at 1, 2, 3.

    Start is ``(d, 0, 0)``, the antipode is ``(0, 0, d)``.
    """
    if convention not in CONVENTIONS:
        raise ValidationError(f"unknown rate convention {convention!r}")
    states = [(a, b, d - a - b) for a in range(d, -1, -1) for b in range(d - a + 1)]
    index = {s: i for i, s in enumerate(states)}
    R = np.zeros((len(states), len(states)))
    for (a, b, c), i in index.items():
        degree = a + 2 * b + c
        scale = degree if convention == "vertex" else 1
        moves = [((a - 1, b + 1, c), a), ((a + 1, b - 1, c), b), ((a, b - 1, c + 1), b), ((a, b + 1, c - 1), c)]
        for s, rate in moves:
            if rate:
                R[i, index[s]] += rate / scale
    return _generator_from_rates(R, states)


def lumped_hypercube_hitting(d: int, links: int = 1, convention: str = "vertex") -> float:
    """Antipodal hitting time of the d-dimensional hypercube via its lumped chain."""
    if links == 1:
        R = np.zeros((d + 1, d + 1))
        for k in range(d + 1):
            # k coordinates flipped: d - k ways forward, k back, degree d
            scale = d if convention == "vertex" else 1
            if k < d:
                R[k, k + 1] = (d - k) / scale
            if k > 0:
                R[k, k - 1] = k / scale
        L = _generator_from_rates(R)
        return float(generator_hitting_times(L, d)[0])
    if links == 2:
        L = occupation_generator(d, convention)
        return float(generator_hitting_times(L, L.labels.index((0, 0, d)))[L.labels.index((d, 0, 0))])
    raise ValidationError(f"links must be 1 or 2, got {links}")


def full_hypercube_hitting(d: int, links: int = 1, convention: str = "vertex") -> float:
    return mean_hitting_time(hypercube(d, links), convention=convention)


@dataclass
class HittingProfile:
    links: int
    rows: list[tuple[int, int, float, float | None]] = field(default_factory=list)
    convention: str = "vertex"

    @property
    def growth_target(self) -> int:
        return self.links + 1

    def hitting(self, d: int) -> float:
        return next(h for dd, _, h, _ in self.rows if dd == d)

    def ratios(self) -> dict[int, float]:
        return {d: r for d, _, _, r in self.rows if r is not None}

    def monotone_from(self) -> int | None:
        """Smallest d from which ``|ratio - (links + 1)|`` never increases again."""
        items = sorted(self.ratios().items())
        if not items:
            return None
        start = items[-1][0]
        for (d0, r0), (d1, r1) in zip(items[-2::-1], items[::-1]):
            if abs(r0 - self.growth_target) >= abs(r1 - self.growth_target):
                start = d0
            else:
                break
        return start

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["d", "sites", "hitting", "ratio"])
        for d, sites, h, r in self.rows:
            w.writerow([d, sites, format(h, ".17g"), "" if r is None else format(r, ".17g")])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "links": self.links,
            "convention": self.convention,
            "growth_target": self.growth_target,
            "ratio_monotone_from": self.monotone_from(),
            "rows": [{"d": d, "sites": s, "hitting": h, "ratio": r} for d, s, h, r in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def hitting_growth_profile(d_max: int, links: int = 1, convention: str = "vertex") -> HittingProfile:
    """Antipodal hitting times for d = 1..d_max from the lumped chains."""
    if d_max < 1:
        raise ValidationError(f"d_max must be >= 1, got {d_max}")
    profile = HittingProfile(links, convention=convention)
    prev = None
    for d in range(1, d_max + 1):
        h = lumped_hypercube_hitting(d, links, convention)
        profile.rows.append((d, (links + 1) ** d, h, None if prev is None else h / prev))
        prev = h
    return profile
