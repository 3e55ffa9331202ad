import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.stats import norm

from bmst_ht.coset import HtCode, codebook
from bmst_ht.hadamard import CapabilityError
from bmst_ht.weights import NumericError, iowef, qfunc, required_ebn0, union_bound_ber

# Table I of the construction example, as (w, d) -> count.
# The printed [8,6] row has "2X^2X^6" where 2X^2Y^6 is meant.
TABLE_I = {
    1: {(0, 0): 1, (1, 8): 1},
    2: {(0, 0): 1, (1, 4): 1, (1, 8): 1, (2, 4): 1},
    3: {(0, 0): 1, (1, 4): 2, (1, 8): 1, (2, 4): 3, (3, 4): 1},
    4: {(0, 0): 1, (1, 4): 3, (1, 8): 1, (2, 4): 6, (3, 4): 4, (4, 4): 1},
    5: {(0, 0): 1, (1, 2): 1, (1, 4): 3, (1, 8): 1, (2, 2): 2, (2, 4): 7, (2, 6): 1, (3, 4): 7,
        (3, 6): 3, (4, 2): 1, (4, 4): 4, (5, 4): 1},
    6: {(0, 0): 1, (1, 2): 2, (1, 4): 3, (1, 8): 1, (2, 2): 5, (2, 4): 8, (2, 6): 2, (3, 2): 1,
        (3, 4): 12, (3, 6): 7, (4, 2): 3, (4, 4): 11, (4, 6): 1, (5, 4): 4, (5, 6): 2, (6, 2): 1},
    7: {(0, 0): 1, (1, 2): 3, (1, 4): 3, (1, 8): 1, (2, 2): 9, (2, 4): 9, (2, 6): 3, (3, 2): 3,
        (3, 4): 20, (3, 6): 12, (4, 2): 9, (4, 4): 23, (4, 6): 3, (5, 4): 12, (5, 6): 9, (6, 2): 3,
        (6, 4): 3, (6, 6): 1, (7, 2): 1},
}


@pytest.mark.parametrize("K", range(1, 8))
def test_iowef_table_i(K):
    assert iowef(HtCode(8, K)).terms == TABLE_I[K]


def test_iowef_8_7_shape():
    w = iowef(HtCode(8, 7))
    assert len(w.terms) == 19 and w.total == 128


@pytest.mark.parametrize("N", [2, 4, 8, 16])
def test_iowef_conservation_and_enumeration(N):
    for K in range(1, N):
        code = HtCode(N, K)
        w = iowef(code)
        assert w.total == 2 ** K and w.terms[0, 0] == 1
        assert all(0 <= a <= K and 0 <= d <= N for a, d in w.terms)
        if K <= 10:
            info, words = codebook(code)
            pairs, counts = np.unique(np.stack([info.sum(1), words.sum(1)], 1), axis=0, return_counts=True)
            assert w.terms == {(int(a), int(b)): int(c) for (a, b), c in zip(pairs, counts)}


def test_iowef_guard():
    with pytest.raises(CapabilityError):
        iowef(HtCode(32, 25))


def test_polynomial_rendering():
    assert iowef(HtCode(8, 2)).polynomial() == "1 + XY^4 + XY^8 + X^2Y^4"
    assert iowef(HtCode(2, 1)).polynomial() == "1 + XY^2"


def test_q_function():
    assert qfunc(0.0) == 0.5
    assert abs(qfunc(4.2649) - 1e-5) < 1e-7
    assert np.allclose(qfunc([0.5, 1.0, 3.0]), norm.sf([0.5, 1.0, 3.0]), rtol=1e-12)


def test_union_bound_single_term():
    w = iowef(HtCode(8, 1))
    assert abs(union_bound_ber(w, 9.6) / 1e-5 - 1) < 0.2
    gamma = 10 ** 0.96
    assert union_bound_ber(w, 9.6) == pytest.approx(norm.sf(np.sqrt(2 * gamma)), rel=1e-12)


def test_union_bound_rm_8_4_near_1e5_at_7_7_db():
    # the weight-4 terms dominate; 7.7 dB gives ~5e-6 with the standard bound
    value = union_bound_ber(iowef(HtCode(8, 4)), 7.7)
    assert 1e-5 / 3 < value < 1e-5


def test_union_bound_decays_and_is_monotone():
    for K in (1, 4, 7):
        w = iowef(HtCode(8, K))
        grid = np.linspace(0, 12, 121)
        vals = union_bound_ber(w, grid)
        assert np.all(np.diff(vals) < 0)
        assert union_bound_ber(w, 40.0) < 1e-100


@pytest.mark.parametrize("N, K, expected, tol", [(8, 1, 9.6, 0.05), (8, 7, 8.2, 0.1), (16, 8, 7.6, 0.1)])
def test_required_ebn0_against_tables(N, K, expected, tol):
    assert abs(required_ebn0(iowef(HtCode(N, K)), 1e-5) - expected) <= tol


def test_required_ebn0_matches_brentq():
    w = iowef(HtCode(8, 5))
    oracle = brentq(lambda x: union_bound_ber(w, x) - 1e-4, -2, 15, xtol=1e-12)
    assert required_ebn0(w, 1e-4) == pytest.approx(oracle, abs=1e-4)


def test_required_ebn0_errors():
    w = iowef(HtCode(8, 4))
    with pytest.raises(NumericError):
        required_ebn0(w, 1e-300)
    with pytest.raises(ValueError):
        required_ebn0(w, 0.7)
