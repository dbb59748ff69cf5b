"""Pollaczek polynomials p_k(b), q_k(b), their generating-function ODEs, and
the comparison against the differential-form oracle in :mod:`elliptica.ring`.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .ring import u_class
from .scalars import B, ONE, ZERO, CoeffPoly


@dataclass(frozen=True)
class PollaczekParams:
    lam: Fraction = Fraction(-1, 2)
    alpha: Fraction = Fraction(0)
    beta: Fraction = Fraction(-1)
    gamma: Fraction = Fraction(1, 2)

    @classmethod
    def of(cls, lam=None, alpha=None, beta=None, gamma=None) -> "PollaczekParams":
        d = cls()
        return cls(
            Fraction(d.lam if lam is None else lam),
            Fraction(d.alpha if alpha is None else alpha),
            Fraction(d.beta if beta is None else beta),
            Fraction(d.gamma if gamma is None else gamma),
        )


PAPER_PARAMS = PollaczekParams()
# beta = 0 is what the Kähler-relation recurrence in ring.py amounts to
ORACLE_PARAMS = PollaczekParams(beta=Fraction(0))


@dataclass(frozen=True)
class PollaczekPair:
    k: int
    p: CoeffPoly
    q: CoeffPoly

    def degree_bounds_hold(self) -> bool:
        if self.k == 0:
            return True
        return self.p.degree("b") <= max(self.k - 1, 0) and self.q.degree("b") <= max(self.k - 2, 0)


class _Memo:
    # single writer; readers see either the old or the extended list
    def __init__(self):
        self.lock = threading.Lock()
        self.tables: Dict[PollaczekParams, List[Tuple[CoeffPoly, CoeffPoly]]] = {}


_MEMO = _Memo()


def _step(k: int, prm: PollaczekParams, prev1: CoeffPoly, prev2: CoeffPoly) -> CoeffPoly:
    # (k+g) P_k = 2[(k+l+a+g-1) b + beta] P_{k-1} - (k+2l+g-2) P_{k-2}
    lead = k + prm.gamma
    if lead == 0:
        raise ZeroDivisionError(f"k + gamma vanishes at k={k}")
    mid = B * (2 * (k + prm.lam + prm.alpha + prm.gamma - 1)) + 2 * prm.beta
    return (mid * prev1 - prev2 * (k + 2 * prm.lam + prm.gamma - 2)).scale(1 / lead)


def pollaczek_table(kmax: int, params: PollaczekParams = PAPER_PARAMS, memo: bool = True
                    ) -> List[Tuple[CoeffPoly, CoeffPoly]]:
    """[(p_k, q_k) for k = 0..kmax] with p0=0, p1=1, q0=1, q1=0."""
    if kmax < 0:
        raise ValueError("kmax must be non-negative")
    if memo:
        table = _MEMO.tables.get(params)
        if table is not None and len(table) > kmax:
            return table[: kmax + 1]
    table = [(ZERO, ONE), (ONE, ZERO)]
    while len(table) <= kmax:
        k = len(table)
        (p1, q1), (p2, q2) = table[k - 1], table[k - 2]
        table.append((_step(k, params, p1, p2), _step(k, params, q1, q2)))
    table = table[: kmax + 1]
    if memo:
        with _MEMO.lock:
            old = _MEMO.tables.get(params)
            if old is None or len(old) < len(table):
                _MEMO.tables[params] = table
    return list(table)


def pollaczek_pq(k: int, params: PollaczekParams = PAPER_PARAMS) -> PollaczekPair:
    p, q = pollaczek_table(k, params)[k]
    return PollaczekPair(k, p, q)


def oracle_pq(k: int) -> PollaczekPair:
    """(p_k, q_k) read off the class of t^(k-2) u dt from the reduction oracle."""
    p, q = u_class(k - 2)
    return PollaczekPair(k, p, q)


@dataclass
class DiscrepancyReport:
    kmax: int
    rows: List[dict] = field(default_factory=list)
    first_divergent: Optional[int] = None

    @property
    def verdict(self) -> str:
        return "agree" if self.first_divergent is None else f"diverge at k={self.first_divergent}"

    def to_json(self) -> dict:
        return {"kmax": self.kmax, "verdict": self.verdict,
                "first_divergent": self.first_divergent, "rows": self.rows}


def crosscheck_oracle(kmax: int, params: PollaczekParams = PAPER_PARAMS) -> DiscrepancyReport:
    rep = DiscrepancyReport(kmax)
    for k, (p, q) in enumerate(pollaczek_table(kmax, params)):
        op, oq = u_class(k - 2)
        agree = p == op and q == oq
        if not agree and rep.first_divergent is None:
            rep.first_divergent = k
        rep.rows.append({"k": k, "p": str(p), "q": str(q), "oracle_p": str(op),
                         "oracle_q": str(oq), "agree": agree})
    return rep


# ---------------------------------------------------------------------------
# generating functions

@dataclass(frozen=True)
class SeriesPoly:
    """Truncated power series in x with CoeffPoly coefficients, orders 0..N."""

    coeffs: Tuple[CoeffPoly, ...]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> CoeffPoly:
        return self.coeffs[n] if 0 <= n < len(self.coeffs) else ZERO

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def nonzero_orders(self) -> List[int]:
        return [n for n, c in enumerate(self.coeffs) if c]

    def to_json(self) -> List[str]:
        return [str(c) for c in self.coeffs]


def gf_ode_residual(which: str, N: int, params: PollaczekParams = PAPER_PARAMS,
                    cubic_constant: int = -1, series: Optional[List[CoeffPoly]] = None
                    ) -> SeriesPoly:
    """Residual of the generating-function ODE through order N.

    The ODE is ``x(x^2 - 2bx + c) F' + [(2l+g)x^2 - 2x((l+a+g)b + beta) + g] F = rhs``
    with ``c = cubic_constant`` (printed as -1), ``rhs = g`` for Q and
    ``(1+g) x`` for P.  ``F`` is built from :func:`pollaczek_table` unless a
    coefficient list is supplied.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    if which not in ("P", "Q"):
        raise ValueError("which must be 'P' or 'Q'")
    if series is None:
        tab = pollaczek_table(N, params)
        series = [p if which == "P" else q for p, q in tab]
    f = lambda n: series[n] if 0 <= n < len(series) else ZERO  # noqa: E731
    lam, a, beta, g = params.lam, params.alpha, params.beta, params.gamma
    out = []
    for n in range(N + 1):
        # x^3 F' -> (n-2) f_{n-2};  -2b x^2 F' -> -2b (n-1) f_{n-1};  c x F' -> c n f_n
        r = f(n - 2) * (n - 2) + B * (-2 * (n - 1)) * f(n - 1) + f(n) * (cubic_constant * n)
        r = r + f(n - 2) * (2 * lam + g) + (B * (-2 * (lam + a + g)) - 2 * beta) * f(n - 1) + f(n) * g
        if which == "Q" and n == 0:
            r = r - g
        if which == "P" and n == 1:
            r = r - (1 + g)
        out.append(r)
    return SeriesPoly(tuple(out))


@dataclass
class FloatReport:
    x0: float
    b0: float
    series_value: float
    quadrature_value: Optional[float]
    abs_diff: Optional[float]
    tol: float
    within_tol: bool
    note: str = ""

    def to_json(self) -> dict:
        return dict(self.__dict__)


def numeric_gf_spotcheck(x0, b0, tol: float = 1e-6, order: int = 40,
                         params: PollaczekParams = PAPER_PARAMS) -> FloatReport:
    """Float comparison of the truncated Q series with the closed-form integral.

    Only floating-point code in the package; never part of an exact check.
    """
    from scipy import integrate

    x0, b0 = float(Fraction(x0)), float(Fraction(b0))
    if abs(x0) >= 0.25:
        raise ValueError("|x0| must be < 1/4")
    if b0 * b0 == 1:
        raise ValueError("b0^2 must differ from 1")
    tab = pollaczek_table(order, params)
    s = sum(float(q.evaluate({"b": Fraction(b0)})) * x0 ** n for n, (_, q) in enumerate(tab))
    if x0 == 0:
        return FloatReport(x0, b0, s, 1.0, abs(s - 1.0), tol, abs(s - 1.0) <= tol, "x0 = 0")
    lam, al, be, g = (float(v) for v in (params.lam, params.alpha, params.beta, params.gamma))
    disc = complex(b0 * b0 - 1) ** 0.5
    r1, r2 = b0 + disc, b0 - disc
    ap = lam - (al * b0 + be) / disc
    am = lam + (al * b0 + be) / disc

    def integrand(xi: float) -> complex:
        return (g * (xi / x0) ** g / xi * ((xi - r1) / (x0 - r1)) ** ap * ((xi - r2) / (x0 - r2)) ** am
                / ((xi - r1) * (xi - r2)))

    try:
        re, _ = integrate.quad(lambda v: integrand(v).real, 0.0, x0, limit=200)
        im, _ = integrate.quad(lambda v: integrand(v).imag, 0.0, x0, limit=200)
    except Exception as exc:  # quadrature failure is a report outcome
        return FloatReport(x0, b0, s, None, None, tol, False, f"quadrature failed: {exc}")
    val = complex(re, im)
    note = "" if abs(val.imag) < 1e-12 else f"imaginary part {val.imag:.3e}"
    diff = abs(s - val)
    return FloatReport(x0, b0, s, val.real, diff, tol, bool(diff <= tol and math.isfinite(diff)), note)


def series_value(x0, b0, order: int, params: PollaczekParams = PAPER_PARAMS, which: str = "Q") -> float:
    tab = pollaczek_table(order, params)
    bb = Fraction(b0)
    idx = 1 if which == "Q" else 0
    return float(sum(row[idx].evaluate({"b": bb}) * Fraction(x0) ** n for n, row in enumerate(tab)))
