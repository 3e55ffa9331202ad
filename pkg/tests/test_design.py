import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from bmst_ht.design import biawgn_capacity, design_table, max_memory, required_memory, shannon_limit


def capacity_by_quad(snr):
    s2 = 1 / (2 * snr)

    def integrand(y):
        return (np.exp(-(y - 1) ** 2 / (2 * s2)) / math.sqrt(2 * math.pi * s2)
                * np.logaddexp(0, -2 * y / s2) / math.log(2))

    return 1 - quad(integrand, -np.inf, np.inf, limit=200)[0]


@pytest.mark.parametrize("snr", [0.01, 0.3, 1.0, 2.5, 8.0, 30.0])
def test_capacity_matches_adaptive_quadrature(snr):
    assert abs(biawgn_capacity(snr) - capacity_by_quad(snr)) < 1e-6


def test_capacity_limits():
    assert biawgn_capacity(1e-6) < 1e-5
    assert abs(biawgn_capacity(100.0) - 1) < 1e-6
    with pytest.raises(ValueError):
        biawgn_capacity(0.0)


def test_half_rate_limit():
    oracle = brentq(lambda x: capacity_by_quad(0.5 * 10 ** (x / 10)) - 0.5, -1, 2, xtol=1e-8)
    assert oracle == pytest.approx(0.187, abs=1e-3)
    assert shannon_limit(0.5) == pytest.approx(oracle, abs=2e-4)


@pytest.mark.parametrize("rate, expected", [(4 / 8, 0.2), (1 / 16, -1.4), (15 / 16, 3.9)])
def test_shannon_limit_tables(rate, expected):
    assert round(shannon_limit(rate), 1) == expected


def test_shannon_limit_increasing():
    vals = [shannon_limit(r) for r in np.arange(0.1, 0.95, 0.1)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("gamma, star, m", [(10.8, 0.0, 11), (3.0, 3.0, 0), (4.4, 0.0, 2), (1.0, 2.0, 0)])
def test_required_memory(gamma, star, m):
    assert required_memory(gamma, star) == m


def test_required_memory_rounds_half_away_from_zero():
    gap = 10 * math.log10(2.5)  # 10^(gap/10) - 1 = 1.5
    assert required_memory(gap + 1e-12, 0.0) == 2


def test_required_memory_nondecreasing():
    gaps = np.linspace(0, 12, 241)
    mem = [required_memory(g, 0.0) for g in gaps]
    assert all(b >= a for a, b in zip(mem, mem[1:]))


def test_design_table_n8():
    rows = design_table(8, 1e-5)
    paper = (11, 10, 6, 5, 5, 4, 2)
    mem = [r.memory for r in rows]
    assert sum(a == b for a, b in zip(mem, paper)) >= 6
    assert all(abs(a - b) <= 1 for a, b in zip(mem, paper))
    assert max_memory(rows) == 11
    for r in rows:
        assert r.gap_db == pytest.approx(r.gamma_db - r.gamma_star_db)
        assert r.memory == round(10 ** (r.gap_db / 10) - 1)
        assert abs((1 + r.memory) - 10 ** (r.gap_db / 10)) <= 0.5


def test_design_table_n2():
    rows = design_table(2, 1e-5)
    assert len(rows) == 1 and rows[0].K == 1 and rows[0].rate == 0.5
    assert rows[0].memory == required_memory(rows[0].gamma_db, rows[0].gamma_star_db)
