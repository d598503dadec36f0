"""Certify or refute perfect state transfer on a finite window.

Nothing here proves irrationality or absence of transfer for all time; every
verdict is tied to an explicit denominator bound or scan window.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

from .dynamics import PST_THRESHOLD, SpectralDecomposition, fidelity_scan, spectral_decompose, _spectral
from .exceptions import DegenerateSpectrumError, InvalidSizeError, UnreachableError
from .graphs import Graph, graph_distance, hypercube, path_graph

RATIONAL = "all-rational-within-bound"
IRRATIONAL = "some-irrational-beyond-bound"

WEIGHT_CUTOFF = 1e-12
# above this many distinct gaps only ratios against the smallest gap are examined
PAIRWISE_LIMIT = 150


def continued_fraction(x: float | Fraction, max_terms: int = 64) -> list[int]:
    """Partial quotients of ``x``, computed exactly on its binary value."""
    r = Fraction(x)
    terms = []
    for _ in range(max_terms):
        a = math.floor(r)
        terms.append(a)
        frac = r - a
        if frac == 0:
            break
        r = 1 / frac
    return terms


def convergents(x: float | Fraction) -> Iterator[Fraction]:
    """Successive convergents ``p/q`` of ``x`` (finite, since floats are rational)."""
    r = Fraction(x)
    p0, q0, p1, q1 = 0, 1, 1, 0
    while True:
        a = math.floor(r)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        yield Fraction(p1, q1)
        frac = r - a
        if frac == 0:
            return
        r = 1 / frac


def best_rational(x: float, q_max: int) -> tuple[Fraction, float]:
    """Last convergent with denominator ``<= q_max`` and its residual ``|q x - p|``.

    Convergents minimise ``|q x - p|`` over all denominators up to their own, so a
    small residual at a bounded ``q`` is strong evidence that ``x`` is ``p/q``.
    """
    best = None
    for c in convergents(x):
        if c.denominator > q_max:
            break
        best = c
    residual = abs(Fraction(x) * best.denominator - best.numerator)
    return best, float(residual)


@dataclass(frozen=True)
class RatioEntry:
    ratio: float
    approximation: Fraction
    residual: float


@dataclass
class RationalityReport:
    pairs: list[RatioEntry]
    verdict: str
    q_max: int
    tol: float
    eigenvalues: list[float] = field(default_factory=list)
    mode: str = "pairwise"

    @property
    def rational(self) -> bool:
        return self.verdict == RATIONAL

    def to_dict(self) -> dict:
        worst = max(self.pairs, key=lambda p: p.residual)
        return {
            "verdict": self.verdict,
            "q_max": self.q_max,
            "tol": self.tol,
            "mode": self.mode,
            "eigenvalues": self.eigenvalues,
            "ratios": len(self.pairs),
            "worst_ratio": worst.ratio,
            "worst_approximation": str(worst.approximation),
            "worst_residual": worst.residual,
        }


def _distinct(values: Sequence[float], rel: float = 1e-10) -> list[float]:
    values = sorted(float(v) for v in values)
    scale = max(1.0, max(abs(v) for v in values))
    out = [values[0]]
    for v in values[1:]:
        if v - out[-1] > rel * scale:
            out.append(v)
    return out


def rationality_check(
    eigenvalues: Sequence[float],
    q_max: int = 10**6,
    tol: float = 1e-9,
    weights: Sequence[float] | None = None,
) -> RationalityReport:
    """Test whether ratios of eigenvalue gaps look rational with denominators up to ``q_max``.

    With ``weights`` (one per eigenvalue, e.g. summed ``<B|k><k|A>`` over a
    degenerate eigenspace) only eigenvalues of weight above 1e-12 participate.
    Each ratio of two distinct gaps is expanded as a continued fraction; the
    verdict is rational iff every residual ``|q r - p|`` is below ``tol``.
    """
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    E = np.asarray(eigenvalues, dtype=float)
    if weights is not None:
        E = E[np.abs(np.asarray(weights, dtype=float)) > WEIGHT_CUTOFF]
    if len(E) == 0:
        raise DegenerateSpectrumError("no eigenvalues with nonzero weight")
    levels = _distinct(E)
    if len(levels) < 2:
        raise DegenerateSpectrumError("need at least two distinct eigenvalues")

    gaps = _distinct([b - a for a, b in combinations(levels, 2)])
    if len(gaps) <= PAIRWISE_LIMIT:
        mode = "pairwise"
        ratios = [big / small for small, big in combinations(gaps, 2)]
    else:
        mode = "reference-gap"
        ratios = [g / gaps[0] for g in gaps[1:]]
    if not ratios:
        # a single gap, e.g. two levels: the lone ratio is 1
        ratios = [1.0]

    pairs = []
    for r in ratios:
        approx, residual = best_rational(r, q_max)
        pairs.append(RatioEntry(r, approx, residual))
    verdict = RATIONAL if all(p.residual < tol for p in pairs) else IRRATIONAL
    return RationalityReport(pairs, verdict, q_max, tol, levels, mode)


def transition_levels(H, source: int = 1, target: int | None = None, rel: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Distinct eigenvalues and the ``<target|P_E|source>`` weight of each eigenspace."""
    spec = _spectral(H)
    target = spec.dimension if target is None else target
    E = spec.eigenvalues
    w = spec.weights(source, target)
    scale = max(1.0, float(np.abs(E).max()))
    groups = np.concatenate([[0], np.cumsum(np.diff(E) > rel * scale)])
    levels = np.array([E[groups == g].mean() for g in range(groups[-1] + 1)])
    weights = np.array([w[groups == g].sum() for g in range(groups[-1] + 1)])
    return levels, weights


def rationality_for(H, source: int = 1, target: int | None = None, q_max: int = 10**6, tol: float = 1e-9) -> RationalityReport:
    levels, weights = transition_levels(H, source, target)
    return rationality_check(levels, q_max, tol, weights)


def find_pst_times(
    H,
    source: int = 1,
    target: int | None = None,
    t_max: float | None = None,
    tol: float = PST_THRESHOLD,
    samples: int | None = None,
    workers: int = 1,
) -> list[float]:
    """Refined times in ``[0, t_max]`` where ``|F(t)| >= 1 - tol``, ascending."""
    series = fidelity_scan(H, t_max, samples, source, target, workers)
    return [t for t, m in series.peaks if m >= 1 - tol]


@dataclass
class TransferReport:
    graph: dict
    distance: int | None
    t_max: float
    samples: int
    tol: float
    pst_times: list[float]
    peak_time: float
    peak_magnitude: float
    rationality: dict | None

    def to_dict(self) -> dict:
        return {
            "graph": self.graph,
            "distance": self.distance,
            "window": [0.0, self.t_max],
            "samples": self.samples,
            "tol": self.tol,
            "pst": bool(self.pst_times),
            "pst_times": self.pst_times,
            "peak_time": self.peak_time,
            "peak_magnitude": self.peak_magnitude,
            "rationality": self.rationality,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_table(self) -> str:
        rows = [
            ("vertices", self.graph["vertices"]),
            ("edges", self.graph["edges"]),
            ("input -> output", f"{self.graph['input']} -> {self.graph['output']}"),
            ("distance", self.distance),
            ("scan window", f"[0, {self.t_max:.6g}] ({self.samples} samples)"),
            ("peak |F|", f"{self.peak_magnitude:.15f} at t={self.peak_time:.12f}"),
            ("PST (|F| >= 1-tol)", "yes" if self.pst_times else "none in window"),
            ("PST times", ", ".join(f"{t:.12f}" for t in self.pst_times) or "-"),
        ]
        if self.rationality:
            rows.append(("gap ratios", f"{self.rationality['verdict']} (q<={self.rationality['q_max']})"))
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in rows) + "\n"


def transfer_report(
    graph: Graph,
    H: np.ndarray | None = None,
    t_max: float | None = None,
    samples: int | None = None,
    tol: float = PST_THRESHOLD,
    q_max: int = 10**6,
    rational_tol: float = 1e-9,
    workers: int = 1,
) -> TransferReport:
    """Scan, PST times and gap-ratio verdict between the graph's input and output.

    ``H`` overrides the unit-coupling Hamiltonian (e.g. an engineered chain on a path graph).
    """
    spec = spectral_decompose(graph.adjacency() if H is None else H)
    src, dst = graph.input_vertex, graph.output_vertex
    series = fidelity_scan(spec, t_max, samples, src, dst, workers)
    try:
        distance = graph_distance(graph, src, dst)
    except UnreachableError:
        distance = None
    try:
        rationality = rationality_for(spec, src, dst, q_max, rational_tol).to_dict()
    except DegenerateSpectrumError:
        rationality = None
    return TransferReport(
        graph.summary(),
        distance,
        float(series.times[-1]),
        len(series.times),
        tol,
        [t for t, m in series.peaks if m >= 1 - tol],
        series.peak_time,
        series.peak_magnitude,
        rationality,
    )


def _largest_power(base: int, budget: int) -> int:
    d = 0
    while base ** (d + 1) <= budget:
        d += 1
    return d


def communication_distance_report(qubit_budget: int) -> dict:
    """Longest perfect-transfer distance reachable with at most ``qubit_budget`` qubits.

    Uniform couplings: the better of the one-link cube (``2^d`` sites, distance d)
    and the two-link cube (``3^d`` sites, distance ``2d = 2 log_3 N``).
    Engineered couplings: the full chain, distance ``budget - 1``.
    """
    if qubit_budget < 2:
        raise InvalidSizeError(f"need at least 2 qubits, got {qubit_budget}")
    candidates = []
    for links in (1, 2):
        d = _largest_power(links + 1, qubit_budget)
        if d >= 1:
            sites = (links + 1) ** d
            g = hypercube(d, links)
            candidates.append({
                "family": f"{links}-link hypercube",
                "links": links,
                "d": d,
                "sites": sites,
                "distance": graph_distance(g, g.input_vertex, g.output_vertex),
                "transfer_time": math.pi / 2 if links == 1 else math.pi / math.sqrt(2),
            })
    uniform = max(candidates, key=lambda c: (c["distance"], -c["sites"]))
    chain = path_graph(qubit_budget)
    return {
        "budget": qubit_budget,
        "uniform": uniform,
        "uniform_candidates": candidates,
        "two_log3_budget": 2 * math.log(qubit_budget, 3),
        "engineered": {
            "family": "engineered chain",
            "sites": qubit_budget,
            "distance": graph_distance(chain, 1, qubit_budget),
            "transfer_time": math.pi / 2,
            "lambda": 2.0,
        },
    }
