from fractions import Fraction

from hypothesis import strategies as st

from elliptica.fock import X, X1, Y, Y1, FockState
from elliptica.ring import PLAIN, USECT, RingElement
from elliptica.scalars import CoeffPoly

small_fractions = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))
exponents = st.tuples(*[st.integers(0, 2)] * 6)


@st.composite
def coeff_polys(draw, max_terms=4):
    return CoeffPoly(draw(st.dictionaries(exponents, small_fractions, max_size=max_terms)))


@st.composite
def b_polys(draw, max_terms=3):
    terms = draw(st.dictionaries(st.integers(0, 2), small_fractions, max_size=max_terms))
    return CoeffPoly({(e, 0, 0, 0, 0, 0): c for e, c in terms.items()})


ring_keys = st.tuples(st.integers(-4, 4), st.sampled_from((PLAIN, USECT)))


@st.composite
def ring_elements(draw, max_terms=3):
    terms = draw(st.dictionaries(ring_keys, b_polys(2), max_size=max_terms))
    return RingElement(terms)


@st.composite
def fock_monomials(draw, max_vars=3, window=3, kinds=(X, X1, Y, Y1), vcomps=(0, 1)):
    variables = {}
    for _ in range(draw(st.integers(0, max_vars))):
        kind = draw(st.sampled_from(kinds))
        n = draw(st.integers(-window, -1)) if kind in (Y, Y1) else draw(st.integers(-window, window))
        variables[(kind, n)] = variables.get((kind, n), 0) + 1
    coeff = draw(st.sampled_from((-3, -2, -1, 1, 2, 3)))
    return FockState.monomial(variables, draw(st.sampled_from(vcomps)), coeff)


@st.composite
def fock_states(draw, max_terms=2, **kw):
    s = FockState()
    for _ in range(draw(st.integers(1, max_terms))):
        s = s + draw(fock_monomials(**kw))
    return s
