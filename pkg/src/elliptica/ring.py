"""The ring R = Q[b][t, 1/t, u] / (u^2 - t^3 + 2 b t^2 - t) and classes in Omega^1_R / dR.

Ring elements are stored on the basis ``t^n`` (sector 0) and ``t^n u``
(sector 1).  :func:`reduce_fdg` is the reduction oracle for ``f dg``; it
derives its own three-term relation from the Kähler relation and never
consults the Pollaczek recursion.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Tuple

from .report import Report
from .scalars import B, ONE, ZERO, CoeffPoly, as_poly

PLAIN, USECT = 0, 1
Key = Tuple[int, int]

# u^2 = t^3 - 2b t^2 + t, as {t-power: coefficient}
CURVE: Dict[int, CoeffPoly] = {3: ONE, 2: B * -2, 1: ONE}
# 2 u du = (3t^2 - 4bt + 1) dt, halved: u du = DUDT dt
DUDT: Dict[int, CoeffPoly] = {2: CoeffPoly.const(Fraction(3, 2)), 1: B * -2, 0: CoeffPoly.const(Fraction(1, 2))}


class RingElement:
    """Finitely supported element of R keyed by ``(n, sector)``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Key, object] | None = None):
        clean: Dict[Key, CoeffPoly] = {}
        for (n, s), c in (terms or {}).items():
            if s not in (PLAIN, USECT):
                raise ValueError(f"bad sector {s!r}")
            c = as_poly(c)
            if c:
                clean[(int(n), s)] = c
        self.terms = clean

    @classmethod
    def t(cls, n: int, coeff=1) -> "RingElement":
        return cls({(n, PLAIN): coeff})

    @classmethod
    def tu(cls, n: int, coeff=1) -> "RingElement":
        return cls({(n, USECT): coeff})

    @classmethod
    def monomial(cls, n: int, sector: int, coeff=1) -> "RingElement":
        return cls({(n, sector): coeff})

    def __add__(self, other: "RingElement") -> "RingElement":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, ZERO) + c
        return RingElement(out)

    def __neg__(self) -> "RingElement":
        return RingElement({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "RingElement") -> "RingElement":
        return self + (-other)

    def scale(self, c) -> "RingElement":
        c = as_poly(c)
        return RingElement({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, RingElement):
            return ring_mul(self, other)
        return self.scale(other)

    __rmul__ = scale

    def __eq__(self, other) -> bool:
        return isinstance(other, RingElement) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (n, s), c in sorted(self.terms.items()):
            mono = f"t^{n}" + ("*u" if s else "")
            parts.append(f"({c})*{mono}")
        return " + ".join(parts)

    __repr__ = __str__


def monomial_product(n1: int, s1: int, n2: int, s2: int) -> Dict[Key, CoeffPoly]:
    """Structure constants: ``t^n1 u^s1 * t^n2 u^s2`` on the basis."""
    if s1 + s2 < 2:
        return {(n1 + n2, s1 + s2): ONE}
    return {(n1 + n2 + k, PLAIN): c for k, c in CURVE.items()}


def ring_mul(f: RingElement, g: RingElement) -> RingElement:
    out: Dict[Key, CoeffPoly] = {}
    for (n1, s1), c1 in f.terms.items():
        for (n2, s2), c2 in g.terms.items():
            c12 = c1 * c2
            for key, c in monomial_product(n1, s1, n2, s2).items():
                out[key] = out.get(key, ZERO) + c12 * c
    return RingElement(out)


def tau(f: RingElement) -> RingElement:
    """The automorphism t -> 1/t, u -> u/t^2."""
    return RingElement({((-n, PLAIN) if s == PLAIN else (-n - 2, USECT)): c
                        for (n, s), c in f.terms.items()})


@dataclass(frozen=True)
class DifferentialClass:
    """Coordinates of a class in Omega^1_R/dR on (w0, w+, w-)."""

    c0: CoeffPoly = ZERO
    cplus: CoeffPoly = ZERO
    cminus: CoeffPoly = ZERO

    @classmethod
    def omega0(cls, c=1) -> "DifferentialClass":
        return cls(as_poly(c), ZERO, ZERO)

    @classmethod
    def omega_plus(cls, c=1) -> "DifferentialClass":
        return cls(ZERO, as_poly(c), ZERO)

    @classmethod
    def omega_minus(cls, c=1) -> "DifferentialClass":
        return cls(ZERO, ZERO, as_poly(c))

    def __add__(self, o: "DifferentialClass") -> "DifferentialClass":
        return DifferentialClass(self.c0 + o.c0, self.cplus + o.cplus, self.cminus + o.cminus)

    def __neg__(self) -> "DifferentialClass":
        return DifferentialClass(-self.c0, -self.cplus, -self.cminus)

    def __sub__(self, o: "DifferentialClass") -> "DifferentialClass":
        return self + (-o)

    def scale(self, c) -> "DifferentialClass":
        c = as_poly(c)
        return DifferentialClass(self.c0 * c, self.cplus * c, self.cminus * c)

    def is_zero(self) -> bool:
        return not (self.c0 or self.cplus or self.cminus)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def parity(self) -> set:
        """Set of Z/2 degrees present (w0 even, w+/- odd)."""
        out = set()
        if self.c0:
            out.add(0)
        if self.cplus or self.cminus:
            out.add(1)
        return out

    def __str__(self) -> str:
        parts = []
        for c, name in ((self.c0, "w0"), (self.cplus, "w+"), (self.cminus, "w-")):
            if c:
                parts.append(f"({c})*{name}")
        return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# classes a_n := [t^n u dt]
#
# Multiplying 2u du = (3t^2 - 4bt + 1) dt by t^(m-1) u and using
# t^k du == -k t^(k-1) u dt modulo exact forms gives, for every integer m,
#     (2m+7) a_{m+1} = 4b(m+2) a_m - (2m+1) a_{m-1}.
# Base classes: a_{-1} = w+, a_{-2} = w-.

def u_relation(m: int) -> Dict[int, CoeffPoly]:
    """The relation for index ``m`` as ``{n: coeff}`` with ``sum coeff*a_n == 0``."""
    return {m + 1: CoeffPoly.const(2 * m + 7), m: B * (-4 * (m + 2)), m - 1: CoeffPoly.const(2 * m + 1)}


@lru_cache(maxsize=None)
def u_class(n: int) -> Tuple[CoeffPoly, CoeffPoly]:
    """(w+, w-) coordinates of a_n by the three-term recurrence, walking away from a_{-1}, a_{-2}."""
    if n == -1:
        return ONE, ZERO
    if n == -2:
        return ZERO, ONE
    if n >= 0:
        # a_n from a_{n-1}, a_{n-2}: m = n - 1
        m = n - 1
        p1, q1 = u_class(n - 1)
        p2, q2 = u_class(n - 2)
        mid = B * (4 * (m + 2))
        d = Fraction(1, 2 * m + 7)
        return (mid * p1 - p2 * (2 * m + 1)).scale(d), (mid * q1 - q2 * (2 * m + 1)).scale(d)
    # n <= -3: a_n from a_{n+1}, a_{n+2}: m = n + 1, divide by 2m+1 (odd, nonzero)
    m = n + 1
    p1, q1 = u_class(n + 1)
    p2, q2 = u_class(n + 2)
    mid = B * (4 * (m + 2))
    d = Fraction(1, 2 * m + 1)
    return (mid * p1 - p2 * (2 * m + 7)).scale(d), (mid * q1 - q2 * (2 * m + 7)).scale(d)


def u_class_by_elimination(targets: Iterable[int], lo: int, hi: int, seed: int = 0
                           ) -> Dict[int, Tuple[CoeffPoly, CoeffPoly]]:
    """Solve the relation system on the index window ``[lo, hi]`` in a shuffled order.

    Equations are scanned in a seeded random order; any equation with a single
    unknown sitting at an end (rational, nonzero coefficient) is solved for it.
    Equations with no unknown left are checked for consistency.  Used to test
    confluence of :func:`u_class` against a different elimination order and
    window.
    """
    if lo > -2 or hi < -1:
        raise ValueError("window must contain -2 and -1")
    known: Dict[int, Tuple[CoeffPoly, CoeffPoly]] = {-1: (ONE, ZERO), -2: (ZERO, ONE)}
    eqs = [u_relation(m) for m in range(lo + 1, hi)]
    rng = random.Random(seed)
    pending = list(range(len(eqs)))
    rng.shuffle(pending)
    progress = True
    while pending and progress:
        progress = False
        for idx in list(pending):
            eq = eqs[idx]
            unknown = [n for n in eq if n not in known]
            if not unknown:
                p = sum((known[n][0] * c for n, c in eq.items()), ZERO)
                q = sum((known[n][1] * c for n, c in eq.items()), ZERO)
                if p or q:
                    raise ArithmeticError(f"inconsistent relation at {sorted(eq)}: {p}, {q}")
                pending.remove(idx)
                progress = True
                continue
            if len(unknown) != 1 or not eq[unknown[0]].is_constant():
                continue
            n = unknown[0]
            inv = Fraction(1) / eq[n].constant_value()
            p = sum((known[k][0] * c for k, c in eq.items() if k != n), ZERO)
            q = sum((known[k][1] * c for k, c in eq.items() if k != n), ZERO)
            known[n] = ((-p).scale(inv), (-q).scale(inv))
            pending.remove(idx)
            progress = True
    missing = [n for n in targets if n not in known]
    if missing:
        raise ValueError(f"window [{lo}, {hi}] does not determine a_n for n in {missing}")
    return {n: known[n] for n in targets}


def _form_components(f: RingElement, g: RingElement):
    """Expand f dg as dicts of t^n dt, t^n u dt and t^n du coefficients."""
    dt: Dict[int, CoeffPoly] = {}
    udt: Dict[int, CoeffPoly] = {}
    du: Dict[int, CoeffPoly] = {}

    def acc(d, n, c):
        d[n] = d.get(n, ZERO) + c

    for (a, sf), cf in f.terms.items():
        for (c, sg), cg in g.terms.items():
            k = cf * cg
            if sg == PLAIN:
                if c:
                    acc(udt if sf else dt, a + c - 1, k * c)
                continue
            # d(t^c u) = c t^(c-1) u dt + t^c du
            if sf == PLAIN:
                if c:
                    acc(udt, a + c - 1, k * c)
                acc(du, a + c, k)
            else:
                if c:
                    for e, cc in CURVE.items():
                        acc(dt, a + c - 1 + e, k * c * cc)
                for e, cc in DUDT.items():
                    acc(dt, a + c + e, k * cc)
    return dt, udt, du


def reduce_fdg(f: RingElement, g: RingElement, u_reducer=None) -> DifferentialClass:
    """Class of ``f dg`` on the basis w0 = [dt/t], w+ = [u dt/t], w- = [u dt/t^2]."""
    u_reducer = u_reducer or u_class
    dt, udt, du = _form_components(f, g)
    for n, c in du.items():
        # d(t^n u) exact  =>  t^n du == -n t^(n-1) u dt
        if n:
            udt[n - 1] = udt.get(n - 1, ZERO) + c * (-n)
    c0 = dt.get(-1, ZERO)
    cp, cm = ZERO, ZERO
    for n, c in udt.items():
        if not c:
            continue
        p, q = u_reducer(n)
        cp = cp + c * p
        cm = cm + c * q
    return DifferentialClass(c0, cp, cm)


def omega_pairing(f: RingElement, g: RingElement) -> DifferentialClass:
    """The universal 2-cocycle omega(f, g) = [f dg]."""
    return reduce_fdg(f, g)


@lru_cache(maxsize=None)
def omega_monomials(n1: int, s1: int, n2: int, s2: int) -> DifferentialClass:
    return reduce_fdg(RingElement.monomial(n1, s1), RingElement.monomial(n2, s2))


# ---------------------------------------------------------------------------
# soundness sweeps

def _window_monomials(W: int):
    return [(n, s) for s in (PLAIN, USECT) for n in range(-W, W + 1)]


def tau_negation_check(W: int) -> Report:
    """reduce(tau f d tau g) == -reduce(f dg) on all monomial pairs in [-W, W]."""
    rep = Report("tau_negation")
    mons = _window_monomials(W)
    for a, b in itertools.product(mons, repeat=2):
        f, g = RingElement.monomial(*a), RingElement.monomial(*b)
        rep.checked += 1
        lhs = reduce_fdg(tau(f), tau(g))
        if lhs != -reduce_fdg(f, g):
            rep.fail(f=str(f), g=str(g), got=str(lhs), expected=str(-reduce_fdg(f, g)))
            break
    return rep


def cocycle_identity_check(W: int) -> Report:
    """omega(fg, h) + omega(gh, f) + omega(hf, g) == 0 on monomial triples in [-W, W]."""
    rep = Report("cocycle_identity")
    mons = _window_monomials(W)
    for a, b, c in itertools.combinations_with_replacement(mons, 3):
        f, g, h = (RingElement.monomial(*m) for m in (a, b, c))
        rep.checked += 1
        tot = reduce_fdg(f * g, h) + reduce_fdg(g * h, f) + reduce_fdg(h * f, g)
        if tot:
            rep.fail(f=str(f), g=str(g), h=str(h), residual=str(tot))
            break
    return rep


def leibniz_check(W: int) -> Report:
    """reduce(f d(gh)) == reduce(fg dh) + reduce(fh dg) on monomial triples."""
    rep = Report("leibniz")
    mons = _window_monomials(W)
    for a, b, c in itertools.product(mons, repeat=3):
        if b > c:
            continue  # symmetric in g, h
        f, g, h = (RingElement.monomial(*m) for m in (a, b, c))
        rep.checked += 1
        lhs = reduce_fdg(f, g * h)
        rhs = reduce_fdg(f * g, h) + reduce_fdg(f * h, g)
        if lhs != rhs:
            rep.fail(f=str(f), g=str(g), h=str(h), lhs=str(lhs), rhs=str(rhs))
            break
    return rep


def confluence_check(W: int, seeds: Iterable[int] = range(4)) -> Report:
    """Recursive reduction agrees with shuffled elimination on several windows.

    Also compares reduce_fdg driven by each elimination table.
    """
    rep = Report("confluence")
    span = 3 * W + 4  # products of window monomials reach index 2W + 3 after the u^2 rewrite
    targets = list(range(-span, span + 1))
    tables = []
    for seed in seeds:
        lo, hi = -span - 1 - seed, span + 1 + 2 * seed
        tables.append((seed, lo, hi, u_class_by_elimination(targets, lo, hi, seed)))
    for seed, lo, hi, tab in tables:
        for n in targets:
            rep.checked += 1
            if tab[n] != u_class(n):
                rep.fail(index=n, seed=seed, window=[lo, hi], elimination=[str(x) for x in tab[n]],
                         recursion=[str(x) for x in u_class(n)])
                return rep
    mons = _window_monomials(W)
    seed, lo, hi, tab = tables[-1]
    for a, b in itertools.product(mons, repeat=2):
        f, g = RingElement.monomial(*a), RingElement.monomial(*b)
        rep.checked += 1
        if reduce_fdg(f, g, lambda n: tab[n]) != reduce_fdg(f, g):
            rep.fail(f=str(f), g=str(g), seed=seed)
            break
    return rep


def oracle_soundness(W: int = 4) -> List[Report]:
    return [confluence_check(W), leibniz_check(W), tau_negation_check(W), cocycle_identity_check(W)]
