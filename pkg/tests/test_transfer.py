import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import path_end_amplitude
from pstnet.dynamics import spectral_decompose
from pstnet.exceptions import DegenerateSpectrumError, InvalidSizeError
from pstnet.graphs import hypercube, path_graph
from pstnet.spins import chain_hamiltonian, engineered_couplings
from pstnet.transfer import (
    IRRATIONAL,
    RATIONAL,
    best_rational,
    communication_distance_report,
    continued_fraction,
    find_pst_times,
    rationality_check,
    rationality_for,
    transfer_report,
    transition_levels,
)

PHI = (1 + math.sqrt(5)) / 2


def test_continued_fraction_examples():
    assert continued_fraction(Fraction(415, 93)) == [4, 2, 6, 7]
    assert continued_fraction(math.sqrt(2), 8) == [1, 2, 2, 2, 2, 2, 2, 2]
    assert continued_fraction(PHI, 10) == [1] * 10


@settings(max_examples=50, deadline=None)
@given(st.integers(-10**5, 10**5), st.integers(1, 10**5))
def test_best_rational_recovers_exact_fractions(p, q):
    approx, residual = best_rational(Fraction(p, q), 10**6)
    assert approx == Fraction(p, q)
    assert residual == 0


def test_best_rational_respects_bound():
    approx, residual = best_rational(math.pi, 1000)
    assert approx == Fraction(355, 113)
    assert residual == pytest.approx(abs(113 * math.pi - 355), rel=1e-6)


def _path_levels(n):
    return spectral_decompose(path_graph(n).adjacency()).eigenvalues


def test_rationality_two_and_three():
    two = rationality_check(_path_levels(2))
    assert two.verdict == RATIONAL and [p.ratio for p in two.pairs] == [1.0]
    three = rationality_check(_path_levels(3))
    assert three.rational
    assert {p.approximation for p in three.pairs} <= {Fraction(1, 2), Fraction(1), Fraction(2)}


@pytest.mark.parametrize("n", [4, 5])
def test_rationality_fails_for_longer_paths(n):
    report = rationality_check(_path_levels(n), q_max=10**6, tol=1e-9)
    assert report.verdict == IRRATIONAL
    assert max(p.residual for p in report.pairs) > 1e-7


def test_golden_structure_at_four():
    report = rationality_check(_path_levels(4))
    golden = [p for p in report.pairs if abs(p.ratio - PHI**2) < 1e-12]
    assert golden
    # phi^2 = [2; 1, 1, 1, ...]
    assert continued_fraction(golden[0].ratio, 12) == [2] + [1] * 11


def test_rationality_degenerate():
    with pytest.raises(DegenerateSpectrumError):
        rationality_check([1.0, 1.0])
    with pytest.raises(DegenerateSpectrumError):
        rationality_check([0.0, 1.0], weights=[1.0, 0.0])


def test_rationality_uses_reference_gap_for_large_spectra():
    report = rationality_check(np.arange(40.0))
    assert report.rational
    report = rationality_check(np.sqrt(np.arange(40.0)))
    assert report.mode == "reference-gap" and not report.rational


def test_transition_levels_drop_dark_states():
    # hypercube(3,1) has 4 distinct levels with antipodal weight, from 8 eigenvalues
    levels, weights = transition_levels(hypercube(3, 1).adjacency(), 1, 8)
    np.testing.assert_allclose(levels, [-3, -1, 1, 3], atol=1e-12)
    assert rationality_for(hypercube(3, 2).adjacency(), 1, 27).rational
    assert rationality_for(chain_hamiltonian(engineered_couplings(16))).rational


def test_find_pst_times_two_chain():
    times = find_pst_times(path_graph(2).adjacency(), t_max=4 * math.pi)
    np.testing.assert_allclose(times, [k * math.pi / 2 for k in (1, 3, 5, 7)], atol=1e-10)


def test_find_pst_times_engineered_seven():
    times = find_pst_times(chain_hamiltonian(engineered_couplings(7, 2.0)), t_max=2 * math.pi)
    assert any(abs(t - math.pi / 2) < 1e-10 for t in times)


def test_find_pst_times_path_five_empty():
    assert find_pst_times(path_graph(5).adjacency(), t_max=50) == []


@pytest.mark.parametrize("n", [4, 5, 6])
def test_no_pst_matches_dense_grid_oracle(n):
    grid = np.abs(path_end_amplitude(n, np.linspace(0, 50, 200001)))
    assert grid.max() < 1 - 1e-6
    assert find_pst_times(path_graph(n).adjacency(), t_max=50, tol=1e-6) == []


@pytest.mark.parametrize("n", [2, 3])
def test_pst_invariant_short_paths(n):
    t0 = math.pi / 2 if n == 2 else math.pi / math.sqrt(2)
    times = find_pst_times(path_graph(n).adjacency(), t_max=2 * t0 + 0.1)
    assert abs(times[0] - t0) < 1e-9


@pytest.mark.parametrize("d", range(1, 7))
def test_pst_invariant_hypercubes(d):
    g = hypercube(d, 1)
    times = find_pst_times(g.adjacency(), 1, g.n, t_max=2.0)
    assert len(times) == 1 and abs(times[0] - math.pi / 2) < 1e-9


@pytest.mark.parametrize("n", [2, 5, 11, 23, 40, 64])
def test_pst_invariant_engineered(n):
    times = find_pst_times(chain_hamiltonian(engineered_couplings(n, 2.0)), t_max=2.0)
    assert len(times) == 1 and abs(times[0] - math.pi / 2) < 1e-9


def test_transfer_report_json():
    rep = transfer_report(path_graph(2))
    data = json.loads(rep.to_json())
    assert data["pst"] and data["distance"] == 1
    assert data["pst_times"][0] == pytest.approx(math.pi / 2, abs=1e-10)
    assert data["rationality"]["verdict"] == RATIONAL
    assert "PST times" in rep.to_table()


def test_transfer_report_engineered_override():
    rep = transfer_report(path_graph(16), H=chain_hamiltonian(engineered_couplings(16)))
    assert rep.pst_times[0] == pytest.approx(math.pi / 2, abs=1e-10)


def test_transfer_report_path_four():
    rep = transfer_report(path_graph(4), t_max=50)
    assert rep.pst_times == []
    assert rep.rationality["verdict"] == IRRATIONAL


@pytest.mark.parametrize("budget, uniform, engineered", [(27, 6, 26), (2, 1, 1), (9, 4, 8)])
def test_communication_distance(budget, uniform, engineered):
    rep = communication_distance_report(budget)
    assert rep["uniform"]["distance"] == uniform
    assert rep["engineered"]["distance"] == engineered


def test_communication_distance_27_is_two_link_cube():
    rep = communication_distance_report(27)
    assert (rep["uniform"]["links"], rep["uniform"]["d"]) == (2, 3)
    assert rep["two_log3_budget"] == pytest.approx(6)
    with pytest.raises(InvalidSizeError):
        communication_distance_report(1)
