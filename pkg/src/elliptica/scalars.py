"""Exact coefficient ring: sparse polynomials over Q in a fixed symbol set.

Every scalar in the package lives in ``Q[b, chi0, lambda, mu, nu, kappa]``.
Rationals are :class:`fractions.Fraction`; a :class:`CoeffPoly` maps exponent
vectors to nonzero fractions.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple, Union

Rational = Fraction

SYMBOLS: Tuple[str, ...] = ("b", "chi0", "lambda", "mu", "nu", "kappa")
_INDEX = {name: i for i, name in enumerate(SYMBOLS)}
_ALIASES = {"χ0": "chi0", "lam": "lambda", "λ": "lambda", "μ": "mu", "ν": "nu",
            "κ": "kappa", "ϰ": "kappa"}
NVARS = len(SYMBOLS)
ZERO_EXP: Tuple[int, ...] = (0,) * NVARS

Exponent = Tuple[int, ...]
Scalar = Union[int, Fraction, "CoeffPoly"]


class SymbolError(ValueError):
    """Raised for a symbol outside the closed coefficient-ring symbol set."""


def symbol_index(name: str) -> int:
    name = _ALIASES.get(name, name)
    try:
        return _INDEX[name]
    except KeyError:
        raise SymbolError(f"unknown symbol {name!r}; allowed: {', '.join(SYMBOLS)}") from None


class CoeffPoly:
    """Immutable sparse polynomial with Fraction coefficients.

    >>> b = CoeffPoly.symbol("b")
    >>> str((b - 1) * (2 * b - 1))
    '2*b^2 - 3*b + 1'
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Exponent, Fraction] | None = None, *, _canonical: bool = False):
        if terms is None:
            self._terms: Dict[Exponent, Fraction] = {}
        elif _canonical:
            self._terms = terms  # type: ignore[assignment]
        else:
            clean = {}
            for exp, c in terms.items():
                if len(exp) != NVARS or any(e < 0 for e in exp):
                    raise ValueError(f"bad exponent vector {exp!r}")
                c = Fraction(c)
                if c:
                    clean[tuple(exp)] = c
            self._terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, value) -> "CoeffPoly":
        if isinstance(value, CoeffPoly):
            return value
        value = Fraction(value)
        return cls({ZERO_EXP: value} if value else {}, _canonical=True)

    @classmethod
    def symbol(cls, name: str, power: int = 1) -> "CoeffPoly":
        exp = [0] * NVARS
        exp[symbol_index(name)] = power
        return cls({tuple(exp): Fraction(1)}, _canonical=True)

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> Dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and ZERO_EXP in self._terms)

    def constant_value(self) -> Fraction:
        """Value of a constant polynomial; raises if the polynomial is not constant."""
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self._terms.get(ZERO_EXP, Fraction(0))

    def constant_term(self) -> Fraction:
        return self._terms.get(ZERO_EXP, Fraction(0))

    def degree(self, name: str | None = None) -> int:
        """Total degree, or degree in one symbol; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        if name is None:
            return max(sum(e) for e in self._terms)
        i = symbol_index(name)
        return max(e[i] for e in self._terms)

    def coefficient(self, name: str, power: int) -> "CoeffPoly":
        """Coefficient of ``name**power`` viewed as a polynomial in the other symbols."""
        i = symbol_index(name)
        out = {}
        for exp, c in self._terms.items():
            if exp[i] == power:
                e = list(exp)
                e[i] = 0
                out[tuple(e)] = c
        return CoeffPoly(out, _canonical=True)

    def symbols(self) -> Tuple[str, ...]:
        used = set()
        for exp in self._terms:
            used.update(i for i, e in enumerate(exp) if e)
        return tuple(SYMBOLS[i] for i in sorted(used))

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other) -> "CoeffPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for exp, c in other._terms.items():
            v = out.get(exp)
            if v is None:
                out[exp] = c
            else:
                v += c
                if v:
                    out[exp] = v
                else:
                    del out[exp]
        return CoeffPoly(out, _canonical=True)

    __radd__ = __add__

    def __neg__(self) -> "CoeffPoly":
        return CoeffPoly({e: -c for e, c in self._terms.items()}, _canonical=True)

    def __sub__(self, other) -> "CoeffPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "CoeffPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def scale(self, q) -> "CoeffPoly":
        q = Fraction(q)
        if not q:
            return ZERO
        if q == 1:
            return self
        return CoeffPoly({e: c * q for e, c in self._terms.items()}, _canonical=True)

    def __mul__(self, other) -> "CoeffPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, CoeffPoly):
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return ZERO
        if len(b) == 1 and ZERO_EXP in b:
            return self.scale(b[ZERO_EXP])
        if len(a) == 1 and ZERO_EXP in a:
            return other.scale(a[ZERO_EXP])
        out: Dict[Exponent, Fraction] = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                v = out.get(e)
                out[e] = c1 * c2 if v is None else v + c1 * c2
        return CoeffPoly({e: c for e, c in out.items() if c}, _canonical=True)

    __rmul__ = __mul__

    def __truediv__(self, q) -> "CoeffPoly":
        if isinstance(q, CoeffPoly):
            q = q.constant_value()
        q = Fraction(q)
        if not q:
            raise ZeroDivisionError("division of CoeffPoly by zero")
        return self.scale(1 / q)

    def __pow__(self, n: int) -> "CoeffPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("CoeffPoly powers must be non-negative integers")
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def specialize(self, bindings: Mapping[str, object]) -> "CoeffPoly":
        """Substitute rationals for a subset of symbols."""
        subs = {symbol_index(k): Fraction(v) for k, v in bindings.items()}
        if not subs:
            return self
        out: Dict[Exponent, Fraction] = {}
        for exp, c in self._terms.items():
            e = list(exp)
            for i, val in subs.items():
                if e[i]:
                    c = c * val ** e[i]
                    e[i] = 0
            if c:
                key = tuple(e)
                out[key] = out.get(key, Fraction(0)) + c
        return CoeffPoly({e: c for e, c in out.items() if c}, _canonical=True)

    def evaluate(self, values: Mapping[str, object]) -> Fraction:
        """Full evaluation; every symbol in use must be bound."""
        return self.specialize(values).constant_value()

    # -- comparison / hashing ----------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_term() == other
        if not isinstance(other, CoeffPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant_term())
            else:
                self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- rendering ----------------------------------------------------
    def sorted_terms(self):
        """Terms in graded-lexicographic order, highest first."""
        return sorted(self._terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for k, (exp, c) in enumerate(self.sorted_terms()):
            mono = "*".join(
                SYMBOLS[i] if e == 1 else f"{SYMBOLS[i]}^{e}" for i, e in enumerate(exp) if e
            )
            mag = abs(c)
            if mono:
                if mag == 1:
                    body = mono
                elif mag.denominator == 1:
                    body = f"{mag.numerator}*{mono}"
                else:
                    body = f"({mag})*{mono}"
            else:
                body = str(mag)
            if k == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"CoeffPoly({str(self)!r})"


def _coerce(value):
    if isinstance(value, CoeffPoly):
        return value
    if isinstance(value, (int, Fraction)):
        return CoeffPoly.const(value)
    return NotImplemented


def as_poly(value: Scalar) -> CoeffPoly:
    """Coerce an int, Fraction, rational string or CoeffPoly to a CoeffPoly."""
    if isinstance(value, str):
        return CoeffPoly.const(Fraction(value))
    out = _coerce(value)
    if out is NotImplemented:
        raise TypeError(f"cannot coerce {value!r} to CoeffPoly")
    return out


def poly_arith(op: str, p: Scalar, q: Scalar | None = None) -> CoeffPoly:
    """Dispatch ``add``, ``sub``, ``mul``, ``neg`` or ``scale`` on coefficient polynomials.

    ``scale`` takes the rational factor as ``p`` and the polynomial as ``q``.
    """
    if op == "neg":
        return -as_poly(p)
    if op == "scale":
        return as_poly(q).scale(p)  # type: ignore[arg-type]
    a, b = as_poly(p), as_poly(q)  # type: ignore[arg-type]
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def poly_specialize(p: CoeffPoly, bindings: Mapping[str, object]) -> CoeffPoly:
    return as_poly(p).specialize(bindings)


def sum_polys(items: Iterable[CoeffPoly]) -> CoeffPoly:
    out: Dict[Exponent, Fraction] = {}
    for p in items:
        for e, c in p.items():
            out[e] = out.get(e, Fraction(0)) + c
    return CoeffPoly({e: c for e, c in out.items() if c}, _canonical=True)


ZERO = CoeffPoly()
ONE = CoeffPoly.const(1)
B = CoeffPoly.symbol("b")
CHI0 = CoeffPoly.symbol("chi0")
LAMBDA = CoeffPoly.symbol("lambda")
MU = CoeffPoly.symbol("mu")
NU = CoeffPoly.symbol("nu")
KAPPA = CoeffPoly.symbol("kappa")
