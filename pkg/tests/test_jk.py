from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from elliptica.fock import X, X1, Y, FockState
from elliptica.jk import (ALL_FLAGS, CORRECTED, PHI_ZERO, JKOperator, TraceFunctional, TypoFlags,
                          engines_agree, jk_apply, jk_apply_generic, jk_compare, jk_relation_check,
                          quotient_invariance_check, typo_sweep)
from elliptica.ring import PLAIN, USECT
from strategies import fock_states

VAC = FockState.vacuum(0)
X_STATES = [VAC, FockState.monomial({(X, 1): 1, (X, -1): 1}), FockState.monomial({(X1, 0): 2}, 0, -1),
            FockState.monomial({(X, 2): 1, (X1, -1): 1}, 0, 3)]
PHI = TraceFunctional({(0, PLAIN): 1, (-1, USECT): Fraction(2, 3), (1, PLAIN): -2})


def test_f_is_multiplication():
    assert jk_apply(JKOperator("f", 2, PLAIN), VAC) == FockState.monomial({(X, 2): 1})
    assert jk_apply(JKOperator("f", -1, USECT), VAC) == FockState.monomial({(X1, -1): 1})


def test_h_on_single_variable():
    s = FockState.monomial({(X, 5): 1})
    assert jk_apply(JKOperator("h", 0, PLAIN), s) == s.scale(-2)


def test_e_double_derivative_example():
    # sum over (n, q) = (1, -1) and (-1, 1), each contributing -x_0
    s = FockState.monomial({(X, 1): 1, (X, -1): 1})
    want = FockState.monomial({(X, 0): 1}, 0, -2)
    assert jk_apply_generic("e", (0, PLAIN), s) == want
    assert jk_apply(JKOperator("e", 0, PLAIN), s) == want


def test_phi_shifts_h():
    assert jk_apply(JKOperator("h", 0, PLAIN), VAC, PHI) == VAC
    assert jk_apply(JKOperator("h", 1, PLAIN), VAC, PHI) == VAC.scale(-2)


def test_y_sector_rejected():
    with pytest.raises(ValueError):
        jk_apply(JKOperator("h", 0, PLAIN), FockState.monomial({(Y, -1): 1}))


def test_trace_functional_json_round_trip():
    phi = TraceFunctional.from_json({"t^0": "1", "u t^-1": "2/3"})
    assert phi.values == {(0, PLAIN): 1, (-1, USECT): Fraction(2, 3)}
    assert TraceFunctional.from_json(phi.to_json()).values == phi.values
    with pytest.raises(ValueError):
        TraceFunctional.from_json({"v t^2": "1"})


def test_bad_flags_rejected():
    with pytest.raises(ValueError):
        TypoFlags("x", "printed", "printed")


phis = st.dictionaries(st.tuples(st.integers(-2, 2), st.sampled_from((PLAIN, USECT))),
                       st.integers(-3, 3), max_size=3)


@given(X_=st.sampled_from("ehf"), n=st.integers(-2, 2), sec=st.sampled_from((PLAIN, USECT)),
       s=fock_states(kinds=(X, X1), vcomps=(0,), max_vars=2, window=2), p1=phis, p2=phis)
def test_affine_in_phi(X_, n, sec, s, p1, p2):
    both = dict(p1)
    for k, v in p2.items():
        both[k] = both.get(k, 0) + v
    op = JKOperator(X_, n, sec)
    lhs = jk_apply(op, s, TraceFunctional(both)) + jk_apply(op, s)
    rhs = jk_apply(op, s, TraceFunctional(p1)) + jk_apply(op, s, TraceFunctional(p2))
    assert lhs == rhs


def test_f_f_relation_trivial():
    a, b = JKOperator("f", 1, PLAIN), JKOperator("f", -1, PLAIN)
    for s in X_STATES:
        assert jk_apply(a, jk_apply(b, s)) == jk_apply(b, jk_apply(a, s))


@pytest.mark.parametrize("phi", [PHI_ZERO, PHI], ids=["phi0", "phi"])
def test_corrected_flags_close(phi):
    rep = jk_relation_check(2, phi, X_STATES, CORRECTED)
    assert rep.passed, rep.failure


def test_printed_flags_do_not_close():
    assert not jk_relation_check(2, PHI_ZERO, X_STATES, TypoFlags()).passed


@pytest.mark.slow
def test_typo_sweep_names_single_closing_configuration():
    got = typo_sweep(2, [PHI_ZERO, PHI], X_STATES)
    assert got["closing"] == ["uu_coeff=b,uu_shift=curve,phi_uu=curve"]
    assert len(got["configurations"]) == len(ALL_FLAGS) == 8


def test_engines_agree_only_for_corrected_flags():
    assert engines_agree(3, PHI, X_STATES).passed
    assert not engines_agree(3, PHI, X_STATES, TypoFlags()).passed


def test_quotient_invariance_w4():
    states = [FockState.monomial({(Y, -1): 1, (X, 1): 1}), FockState.monomial({(Y, -2): 2}, 1),
              FockState.monomial({(X1, 0): 1, (Y, -1): 1}, 0, 2)]
    rep = quotient_invariance_check(4, states)
    assert rep.passed and rep.checked > 0


def test_compare_finds_inner_sign_character():
    rep = jk_compare(2, X_STATES)
    assert rep.found == {"e": -1, "h": 1, "f": -1}
    assert rep.per_component == {"v0": rep.found, "v1": rep.found}
    matches = [c["epsilon"] for c in rep.characters if c["matches"]]
    assert matches == ["(-e, h, -f)"]
