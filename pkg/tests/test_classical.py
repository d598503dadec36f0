import json

import numpy as np
import pytest

from conftest import random_connected_graph
from pstnet.classical import (
    full_hypercube_hitting,
    generator_hitting_times,
    hitting_growth_profile,
    lumped_generator,
    lumped_hypercube_hitting,
    mean_hitting_time,
    occupation_generator,
    walk_generator,
)
from pstnet.exceptions import NumericalError, UnreachableError, ValidationError
from pstnet.graphs import Graph, hypercube, path_graph


def birth_death_hitting(forward, backward):
    """Passage time 0 -> n of a birth-death chain by the step recursion T_k = (1 + b_k T_{k-1}) / f_k."""
    total, prev = 0.0, 0.0
    for k, f in enumerate(forward):
        prev = (1 + (backward[k] * prev if k else 0)) / f
        total += prev
    return total


def test_hand_values():
    assert mean_hitting_time(path_graph(2)) == pytest.approx(1)
    assert mean_hitting_time(path_graph(3)) == pytest.approx(4)
    assert mean_hitting_time(path_graph(3), convention="edge") == pytest.approx(3)
    square = Graph.from_edges(4, [(1, 2), (2, 3), (3, 4), (4, 1)], 1, 3)
    assert mean_hitting_time(square) == pytest.approx(4)
    assert mean_hitting_time(hypercube(3, 1)) == pytest.approx(10)


def test_hitting_matches_birth_death_recursion():
    for d in range(1, 13):
        k = np.arange(d + 1)
        expected = birth_death_hitting((d - k[:-1]) / d, k / d)
        assert lumped_hypercube_hitting(d, 1) == pytest.approx(expected, rel=1e-12)


def test_generator_rows_sum_to_zero():
    g = random_connected_graph(9, seed=2)
    for convention in ("vertex", "edge"):
        L = walk_generator(g, convention).matrix
        assert np.abs(L.sum(axis=1)).max() < 1e-14
        off = L - np.diag(np.diag(L))
        assert off.min() >= 0


def test_hitting_satisfies_defining_equations():
    g = random_connected_graph(8, seed=5)
    L = walk_generator(g).matrix
    h = generator_hitting_times(L, 7)
    assert h[7] == 0
    np.testing.assert_allclose((L @ h)[:7], -1, atol=1e-10)


def test_lumped_generator_rates():
    L = lumped_generator(hypercube(1, 1)).matrix
    np.testing.assert_allclose(L, [[-1, 1], [1, -1]])
    edge = lumped_generator(hypercube(3, 1), convention="edge").matrix
    np.testing.assert_allclose(np.diag(edge, 1), [3, 2, 1])
    np.testing.assert_allclose(np.diag(edge, -1), [1, 2, 3])
    vertex = lumped_generator(hypercube(3, 1)).matrix
    np.testing.assert_allclose(np.diag(vertex, 1), [1, 2 / 3, 1 / 3])
    for L in (edge, vertex, occupation_generator(4).matrix):
        assert np.abs(L.sum(axis=1)).max() < 1e-14


@pytest.mark.parametrize("convention", ["vertex", "edge"])
@pytest.mark.parametrize("d", range(1, 9))
def test_lumped_matches_full_one_link(d, convention):
    lumped = lumped_hypercube_hitting(d, 1, convention)
    assert abs(lumped - full_hypercube_hitting(d, 1, convention)) < 1e-8 * max(1, lumped)
    L = lumped_generator(hypercube(d, 1), convention=convention)
    assert generator_hitting_times(L, d)[0] == pytest.approx(lumped, rel=1e-12)


@pytest.mark.parametrize("d", range(1, 6))
def test_lumped_matches_full_two_link(d):
    lumped = lumped_hypercube_hitting(d, 2)
    assert abs(lumped - full_hypercube_hitting(d, 2)) < 1e-8 * lumped


def test_growth_profile_one_link():
    prof = hitting_growth_profile(12, 1)
    ratios = prof.ratios()
    assert prof.hitting(1) == pytest.approx(1)
    assert abs(ratios[12] - 2) < 0.05
    # the ratios dip below 2 near d = 5 and approach it monotonically from d = 7
    assert prof.monotone_from() == 7
    assert all(prof.hitting(d) / prof.hitting(3) >= 1.9 ** (d - 3) for d in range(3, 13))


def test_growth_profile_two_link():
    prof = hitting_growth_profile(10, 2)
    ratios = prof.ratios()
    assert prof.monotone_from() == 5
    assert abs(ratios[10] - 3) < abs(ratios[5] - 3)


def test_profile_exports():
    prof = hitting_growth_profile(3, 1)
    lines = prof.to_csv().splitlines()
    assert lines[0] == "d,sites,hitting,ratio"
    assert lines[1] == "1,2,1,"
    data = json.loads(prof.to_json())
    assert data["rows"][2]["hitting"] == pytest.approx(10, abs=1e-12)


def test_errors():
    with pytest.raises(UnreachableError):
        mean_hitting_time(Graph.from_edges(4, [(1, 2), (3, 4)]))
    with pytest.raises(NumericalError):
        generator_hitting_times(np.zeros((3, 3)), 0)
    with pytest.raises(ValidationError):
        walk_generator(path_graph(3), "per-edge")
    with pytest.raises(ValidationError):
        hitting_growth_profile(0)
