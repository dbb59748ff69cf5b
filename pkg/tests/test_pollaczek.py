from fractions import Fraction

import pytest
import sympy as sp

from elliptica.pollaczek import (ORACLE_PARAMS, PAPER_PARAMS, crosscheck_oracle, gf_ode_residual,
                                 numeric_gf_spotcheck, oracle_pq, pollaczek_pq, pollaczek_table,
                                 series_value)
from elliptica.scalars import B, ONE, ZERO, CoeffPoly
from oracles import poly_to_sympy, pollaczek_sympy


def test_initial_conditions():
    assert (pollaczek_pq(0).p, pollaczek_pq(0).q) == (ZERO, ONE)
    assert (pollaczek_pq(1).p, pollaczek_pq(1).q) == (ONE, ZERO)


def test_printed_k2_k3():
    p2 = pollaczek_pq(2)
    p3 = pollaczek_pq(3)
    assert p2.p == (B - 1).scale(Fraction(4, 5))
    assert p2.q == CoeffPoly.const(Fraction(1, 5))
    assert p3.p == (B * B * 32 - B * 48 + 11).scale(Fraction(1, 35))
    assert p3.q == (B * 2 - 1).scale(Fraction(4, 35))


def test_determinant_is_one_over_35():
    p2, p3 = pollaczek_pq(2), pollaczek_pq(3)
    assert p2.p * p3.q - p3.p * p2.q == CoeffPoly.const(Fraction(1, 35))


@pytest.mark.parametrize("params", [PAPER_PARAMS, ORACLE_PARAMS], ids=["printed", "oracle"])
def test_recurrence_matches_sympy(params):
    P, Q = pollaczek_sympy(12, params.lam, params.alpha, params.beta, params.gamma)
    for k, (p, q) in enumerate(pollaczek_table(12, params)):
        assert sp.expand(poly_to_sympy(p) - P[k]) == 0
        assert sp.expand(poly_to_sympy(q) - Q[k]) == 0


def test_degree_bounds_up_to_32():
    assert all(pollaczek_pq(k).degree_bounds_hold() for k in range(33))


def test_memo_agrees_with_fresh_computation():
    assert pollaczek_table(15, memo=False) == pollaczek_table(15)


def test_oracle_parameters_reproduce_the_reduction_oracle():
    for k in range(12):
        pr, orc = pollaczek_pq(k, ORACLE_PARAMS), oracle_pq(k)
        assert (pr.p, pr.q) == (orc.p, orc.q)


def test_crosscheck_printed_parameters():
    rep = crosscheck_oracle(10)
    assert len(rep.rows) == 11
    assert rep.rows[0]["agree"] and rep.rows[1]["agree"]
    # frozen: the printed beta = -1 departs from the oracle at k = 2
    assert rep.first_divergent == 2
    assert rep.rows[2]["p"] == "(4/5)*b - 4/5" and rep.rows[2]["oracle_p"] == "(4/5)*b"
    assert rep.to_json()["verdict"] == "diverge at k=2"


def test_crosscheck_oracle_parameters_agree():
    assert crosscheck_oracle(10, ORACLE_PARAMS).verdict == "agree"


def test_ode_order_zero_term_vanishes():
    assert not gf_ode_residual("Q", 4)[0]


def test_ode_closes_for_oracle_with_curve_sign():
    for which in ("P", "Q"):
        assert gf_ode_residual(which, 12, ORACLE_PARAMS, cubic_constant=1).is_zero()


def test_ode_printed_sign_leaves_residuals():
    # frozen outcomes of the residual sweep (report-only in the harness)
    assert gf_ode_residual("Q", 8).nonzero_orders()[0] == 1
    assert gf_ode_residual("P", 8).nonzero_orders()[0] == 1
    assert gf_ode_residual("P", 8, cubic_constant=1).is_zero()
    assert gf_ode_residual("Q", 8, cubic_constant=1).nonzero_orders() == [1]


def test_ode_rejects_short_series():
    with pytest.raises(ValueError):
        gf_ode_residual("Q", 1)


def test_spotcheck_at_zero():
    rep = numeric_gf_spotcheck(0, 2)
    assert rep.series_value == 1.0 and rep.within_tol


def test_spotcheck_oracle_parameters():
    rep = numeric_gf_spotcheck(Fraction(1, 10), Fraction(1, 3), params=ORACLE_PARAMS)
    assert rep.within_tol, rep


def test_spotcheck_b_equal_two_is_reported():
    rep = numeric_gf_spotcheck(Fraction(1, 10), 2, params=ORACLE_PARAMS)
    assert rep.abs_diff is not None or rep.note


def test_truncation_converges():
    x0, b0 = Fraction(1, 10), 2
    full = series_value(x0, b0, 60, ORACLE_PARAMS)
    assert abs(series_value(x0, b0, 40, ORACLE_PARAMS) - full) < abs(series_value(x0, b0, 10, ORACLE_PARAMS) - full)


def test_spotcheck_domain_errors():
    with pytest.raises(ValueError):
        numeric_gf_spotcheck(Fraction(1, 2), 2)
    with pytest.raises(ValueError):
        numeric_gf_spotcheck(Fraction(1, 10), 1)
