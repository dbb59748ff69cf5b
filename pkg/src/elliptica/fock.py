"""Polynomial Fock states, the oscillator representations and the elliptic
Heisenberg module.

A state is a finite sum of ``coeff * monomial (x) v_i``.  Variables are
``x_n``, ``x1_n`` (n in Z) for the oscillator sector and ``y_-m``, ``y1_-m``
(m >= 1) for the Heisenberg sector; ``v_0, v_1`` span the two-dimensional
module V.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .pollaczek import ORACLE_PARAMS, PAPER_PARAMS, pollaczek_pq
from .scalars import B, CHI0, KAPPA, LAMBDA, MU, NU, ONE, ZERO, CoeffPoly, as_poly

KINDS = ("x", "x1", "y", "y1")
X, X1, Y, Y1 = range(4)

Var = Tuple[int, int]  # (kind, index)
Monomial = Tuple[Tuple[Var, int], ...]
Key = Tuple[Monomial, int]


def var_name(v: Var) -> str:
    return f"{KINDS[v[0]]}_{v[1]}"


def _check_var(v: Var) -> Var:
    kind, n = v
    if kind not in (X, X1, Y, Y1):
        raise ValueError(f"unknown variable kind {kind!r}")
    if kind in (Y, Y1) and n > -1:
        raise ValueError(f"{var_name(v)}: Heisenberg variables have index <= -1")
    return (kind, int(n))


def _mono_mul(mono: Monomial, v: Var, k: int = 1) -> Monomial:
    d = dict(mono)
    d[v] = d.get(v, 0) + k
    return tuple(sorted(d.items()))


class FockState:
    """Immutable finitely supported state with CoeffPoly coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Key, object] | None = None):
        clean: Dict[Key, CoeffPoly] = {}
        for (mono, vc), c in (terms or {}).items():
            c = as_poly(c)
            if c:
                clean[(tuple(sorted((v, e) for v, e in mono if e)), vc)] = c
        self.terms = clean

    @classmethod
    def _raw(cls, terms: Dict[Key, CoeffPoly]) -> "FockState":
        s = cls.__new__(cls)
        s.terms = terms
        return s

    @classmethod
    def vacuum(cls, vcomp: int = 0) -> "FockState":
        if vcomp not in (0, 1):
            raise ValueError("vcomp must be 0 or 1")
        return cls._raw({((), vcomp): ONE})

    @classmethod
    def monomial(cls, variables: Mapping[Var, int] | Iterable[Tuple[Var, int]], vcomp: int = 0,
                 coeff=1) -> "FockState":
        items = variables.items() if isinstance(variables, Mapping) else variables
        mono: Monomial = ()
        for v, e in items:
            if e < 0:
                raise ValueError("negative exponent")
            mono = _mono_mul(mono, _check_var(v), e)
        return cls({(mono, vcomp): coeff})

    # -- linear structure ----------------------------------------------
    def __add__(self, o: "FockState") -> "FockState":
        out = dict(self.terms)
        for k, c in o.terms.items():
            v = out.get(k)
            v = c if v is None else v + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return FockState._raw(out)

    def __neg__(self) -> "FockState":
        return FockState._raw({k: -c for k, c in self.terms.items()})

    def __sub__(self, o: "FockState") -> "FockState":
        return self + (-o)

    def scale(self, c) -> "FockState":
        c = as_poly(c)
        if not c:
            return ZERO_STATE
        return FockState._raw({k: v * c for k, v in self.terms.items() if v * c})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, o) -> bool:
        return isinstance(o, FockState) and self.terms == o.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __len__(self) -> int:
        return len(self.terms)

    # -- variable operators --------------------------------------------
    def mul_var(self, v: Var, coeff=1) -> "FockState":
        c = as_poly(coeff)
        return FockState._raw({(_mono_mul(m, v), vc): x * c for (m, vc), x in self.terms.items()}) if c else ZERO_STATE

    def d_var(self, v: Var, coeff=1) -> "FockState":
        c = as_poly(coeff)
        out: Dict[Key, CoeffPoly] = {}
        if not c:
            return ZERO_STATE
        for (m, vc), x in self.terms.items():
            d = dict(m)
            e = d.get(v, 0)
            if not e:
                continue
            if e == 1:
                del d[v]
            else:
                d[v] = e - 1
            k = (tuple(sorted(d.items())), vc)
            val = x * c * e
            prev = out.get(k)
            out[k] = val if prev is None else prev + val
        return FockState._raw({k: x for k, x in out.items() if x})

    def map_v(self, matrix: "VEndo") -> "FockState":
        out = ZERO_STATE
        for (m, vc), x in self.terms.items():
            for tgt in (0, 1):
                c = matrix.entry(tgt, vc) * x
                if c:
                    out = out + FockState._raw({(m, tgt): c})
        return out

    # -- inspection -----------------------------------------------------
    def support_vars(self) -> set:
        return {v for (m, _), _c in self.terms.items() for v, _e in m}

    def max_degree(self) -> int:
        return max((sum(e for _, e in m) for (m, _) in self.terms), default=0)

    def specialize(self, bindings: Mapping[str, object]) -> "FockState":
        return FockState({k: c.specialize(bindings) for k, c in self.terms.items()})

    def sorted_items(self):
        return sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (m, vc), c in self.sorted_items():
            mono = "*".join(var_name(v) + (f"^{e}" if e > 1 else "") for v, e in m)
            parts.append(f"({c})" + (f"*{mono}" if mono else "") + f"*v{vc}")
        return " + ".join(parts)

    __repr__ = __str__

    def to_json(self) -> List[list]:
        return [[str(c), [[var_name(v), e] for v, e in m], vc] for (m, vc), c in self.sorted_items()]


ZERO_STATE = FockState._raw({})


def degree_eigenvalue(mono: Monomial) -> int:
    """D = sum of index * exponent over all variables."""
    return sum(v[1] * e for v, e in mono)


# ---------------------------------------------------------------------------
# oscillator representations

OSC_GENS = ("a", "a*", "a1", "a1*")


def osc_apply(gen: str, m: int, s: FockState, r: int) -> FockState:
    """Action of a_m, a*_m, a1_m, a1*_m under rho_r.

    r=0: a_m is d/dx_m for m >= 0 and x_m otherwise; a*_m is x_-m for m <= 0
    and -d/dx_-m otherwise.  r=1: a_m = x_m and a*_m = -d/dx_-m for all m.
    """
    if r not in (0, 1):
        raise ValueError("r must be 0 or 1")
    if gen not in OSC_GENS:
        raise ValueError(f"unknown oscillator generator {gen!r}")
    kind = X1 if gen.startswith("a1") else X
    if gen.endswith("*"):
        if r == 0 and m <= 0:
            return s.mul_var((kind, -m))
        return s.d_var((kind, -m), -1)
    if r == 0 and m >= 0:
        return s.d_var((kind, m))
    return s.mul_var((kind, m))


def osc_creation_set(gen: str, r: int) -> Tuple[Optional[int], Optional[int]]:
    """Modes acting by multiplication, as an interval (lo, hi); None is unbounded.

    The empty set is returned as (1, 0).
    """
    if gen.endswith("*"):
        return (None, 0) if r == 0 else (1, 0)
    return (None, -1) if r == 0 else (None, None)


# ---------------------------------------------------------------------------
# Heisenberg module

HEIS_VARIANTS = ("original", "sigma_twisted_b", "mixed")
HEIS_GENS = ("b", "b1", "one0", "one+", "one-")


class UnsupportedCombination(ValueError):
    """A generator/mode/variant combination outside the module's formulas."""


@dataclass(frozen=True)
class VEndo:
    """2x2 matrix on (v0, v1); column j is the image of v_j."""

    rows: Tuple[Tuple[CoeffPoly, CoeffPoly], Tuple[CoeffPoly, CoeffPoly]]

    @classmethod
    def from_action(cls, mu, nu, kappa) -> "VEndo":
        # B v0 = mu v0 + nu v1,  B v1 = kappa v0 + mu v1
        mu, nu, kappa = as_poly(mu), as_poly(nu), as_poly(kappa)
        return cls(((mu, kappa), (nu, mu)))

    def entry(self, i: int, j: int) -> CoeffPoly:
        return self.rows[i][j]

    def det(self) -> CoeffPoly:
        (a, b), (c, d) = self.rows
        return a * d - b * c

    def __str__(self) -> str:
        return "[[" + ", ".join(map(str, self.rows[0])) + "], [" + ", ".join(map(str, self.rows[1])) + "]]"


@dataclass(frozen=True)
class ModuleParams:
    r: int = 1
    heis_variant: str = "original"
    chi0: CoeffPoly = CHI0
    lam: CoeffPoly = LAMBDA
    mu: CoeffPoly = CoeffPoly.const(1)
    nu: CoeffPoly = CoeffPoly.const(2)
    kappa: CoeffPoly = CoeffPoly.const(3)
    level: Optional[CoeffPoly] = None  # Heisenberg level; None means chi0

    def __post_init__(self):
        if self.r not in (0, 1):
            raise ValueError("r must be 0 or 1")
        if self.heis_variant not in HEIS_VARIANTS:
            raise ValueError(f"heis_variant must be one of {HEIS_VARIANTS}")
        for name in ("chi0", "lam", "mu", "nu", "kappa", "level"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, as_poly(v))

    @classmethod
    def symbolic_v(cls, **kw) -> "ModuleParams":
        return cls(mu=MU, nu=NU, kappa=KAPPA, **kw)

    @property
    def L(self) -> CoeffPoly:
        return self.chi0 if self.level is None else self.level

    @property
    def chi_plus(self) -> CoeffPoly:
        return ZERO

    @property
    def chi_minus(self) -> CoeffPoly:
        return ZERO

    @property
    def b_twisted(self) -> bool:
        return self.heis_variant in ("sigma_twisted_b", "mixed")

    @property
    def b1_twisted(self) -> bool:
        return self.heis_variant == "sigma_twisted_b"

    def B1(self) -> VEndo:
        return VEndo.from_action(self.mu, self.nu, self.kappa)

    def with_(self, **kw) -> "ModuleParams":
        d = dict(self.__dict__)
        d.update(kw)
        return ModuleParams(**d)

    def to_json(self) -> dict:
        return {"r": self.r, "heis_variant": self.heis_variant, "chi0": str(self.chi0),
                "lambda": str(self.lam), "mu": str(self.mu), "nu": str(self.nu),
                "kappa": str(self.kappa), "level": str(self.L)}


def _orig_b(m: int, s: FockState, p: ModuleParams) -> FockState:
    if m > 0:
        return s.mul_var((Y, -m), -1)
    if m < 0:
        return s.d_var((Y, m), p.L * (2 * m))  # -2k L d/dy_-k with k = -m
    return s.scale(p.lam)


def _orig_b1(m: int, s: FockState, p: ModuleParams) -> FockState:
    if m >= 0:
        k = m
        out = s.d_var((Y1, -k - 1), 2 * k + 1)
        out = out + s.d_var((Y1, -k - 2), B * (-4 * (k + 1)))
        out = out + s.d_var((Y1, -k - 3), 2 * k + 3)
        return out.scale(-p.L)
    if m == -1:
        return s.mul_var((Y1, -1)) + s.d_var((Y1, -2), -p.L) + s.map_v(p.B1())
    return s.mul_var((Y1, m))


def heis_apply(gen: str, m: int, s: FockState, params: ModuleParams) -> FockState:
    """Action of b_m, b1_m, one0, one+, one- on the Heisenberg module.

    The twisted sectors use rho'(b_n) = rho(b_-n) and rho'(b1_n) = rho(b1_{-n-2}).
    """
    if gen == "b":
        return _orig_b(-m if params.b_twisted else m, s, params)
    if gen == "b1":
        return _orig_b1(-m - 2 if params.b1_twisted else m, s, params)
    if gen in ("one0", "one+", "one-"):
        if m != 0:
            raise UnsupportedCombination(f"{gen} has only mode 0, got {m}")
        return s.scale(params.L) if gen == "one0" else ZERO_STATE
    raise UnsupportedCombination(f"unknown Heisenberg generator {gen!r}")


def heis_creation_set(gen: str, params: ModuleParams) -> Tuple[Optional[int], Optional[int]]:
    """Modes acting with a multiplication part, as an interval (lo, hi)."""
    if gen == "b":
        return (None, 0) if params.b_twisted else (0, None)
    if gen == "b1":
        return (-1, None) if params.b1_twisted else (None, -1)
    raise UnsupportedCombination(gen)


def heis_expected(g: str, m: int, h: str, n: int, params: ModuleParams,
                  constants=PAPER_PARAMS) -> CoeffPoly:
    """Scalar by which [rho(g_m), rho(h_n)] should act.

    Twisted sectors carry the level with the opposite sign.
    """
    L = params.L
    if g == "b" and h == "b":
        lev = -L if params.b_twisted else L
        return lev * (2 * n) if m + n == 0 else ZERO
    if g == "b1" and h == "b1":
        lev = -L if params.b1_twisted else L
        s = m + n + 2
        if s in (1, -1):
            return lev * (n - m)
        if s == 0:
            return lev * B * (-2 * (n - m))
        return ZERO
    # cross terms are multiples of chi+- = 0
    return ZERO


@dataclass
class HeisReport:
    window: int
    params: ModuleParams
    passed: bool = True
    checked: int = 0
    failure: Optional[dict] = None

    def to_json(self) -> dict:
        return {"window": self.window, "params": self.params.to_json(), "passed": self.passed,
                "checked": self.checked, "failure": self.failure}


def heis_relation_check(W: int, params: ModuleParams, states: Sequence[FockState]) -> HeisReport:
    """[rho(g_m), rho(h_n)] s == expected * s for g, h in {b, b1}, |m|, |n| <= W."""
    if W < 1:
        raise ValueError("W must be >= 1")
    rep = HeisReport(W, params)
    modes = range(-W, W + 1)
    for g, h in (("b", "b"), ("b1", "b1"), ("b1", "b")):
        for m, n in itertools.product(modes, modes):
            want = heis_expected(g, m, h, n, params)
            for s in states:
                got = heis_apply(g, m, heis_apply(h, n, s, params), params) - \
                    heis_apply(h, n, heis_apply(g, m, s, params), params)
                rep.checked += 1
                if got != s.scale(want):
                    rep.passed = False
                    rep.failure = {"pair": [f"{g}_{m}", f"{h}_{n}"], "state": str(s),
                                   "got": str(got), "expected": str(s.scale(want))}
                    return rep
    return rep


# ---------------------------------------------------------------------------
# constraints on chi+-

@dataclass
class ConstraintVerdict:
    rows: List[Tuple[CoeffPoly, CoeffPoly]]
    pairs: List[Tuple[int, int]]
    rank: int
    determinant: Optional[CoeffPoly]
    basis: List[Tuple[CoeffPoly, CoeffPoly]] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return 2 - self.rank

    @property
    def forces_zero(self) -> bool:
        return self.rank == 2

    def to_json(self) -> dict:
        return {"pairs": [list(p) for p in self.pairs],
                "rows": [[str(a), str(b)] for a, b in self.rows],
                "rank": self.rank, "dimension": self.dimension,
                "determinant_p2q3_minus_p3q2": None if self.determinant is None else str(self.determinant),
                "solution_basis": [[str(a), str(b)] for a, b in self.basis],
                "verdict": "chi+ = chi- = 0" if self.forces_zero else f"{self.dimension}-dimensional"}


DEFAULT_PAIRS = ((0, 1), (0, 2), (1, 1), (1, 2))


def twodim_constraints(params: Optional[ModuleParams] = None, pairs: Sequence[Tuple[int, int]] = DEFAULT_PAIRS,
                       overrides: Optional[Mapping[int, Tuple[object, object]]] = None,
                       constants: str = "paper") -> ConstraintVerdict:
    """Solution space of chi+ p_k + chi- q_k = 0 from [b1_m, b_n] on V, k = m+n+1.

    Rank is over Q(b): a 2x2 minor that is a nonzero polynomial counts.
    ``overrides`` replaces (p_k, q_k) for chosen k (degenerate controls).
    """
    del params  # the constraints do not depend on lambda, mu, nu, kappa, chi0
    prm = PAPER_PARAMS if constants == "paper" else ORACLE_PARAMS
    overrides = dict(overrides or {})

    def pq(k: int):
        if k in overrides:
            a, b = overrides[k]
            return as_poly(a), as_poly(b)
        pr = pollaczek_pq(k, prm)
        return pr.p, pr.q

    rows = []
    for m, n in pairs:
        p, q = pq(m + n + 1)
        rows.append((p * (2 * n), q * (2 * n)))
    rank = 0
    if any(a or b for a, b in rows):
        rank = 1
    for (a, b), (c, d) in itertools.combinations(rows, 2):
        if a * d - b * c:
            rank = 2
            break
    p2, q2 = pq(2)
    p3, q3 = pq(3)
    det = p2 * q3 - p3 * q2
    basis: List[Tuple[CoeffPoly, CoeffPoly]] = []
    if rank == 1:
        a, b = next((a, b) for a, b in rows if a or b)
        basis = [(-b, a)]
    elif rank == 0:
        basis = [(ONE, ZERO), (ZERO, ONE)]
    return ConstraintVerdict(rows, [tuple(p) for p in pairs], rank, det, basis)
