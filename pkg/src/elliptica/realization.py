"""Free-field realization theta of the elliptic affine algebra.

Fields are expanded to terms ``c * z^s * :F_1^(d_1) ... F_L^(d_L):`` and the
mode ``k`` of a term is the coefficient of ``z^(-k-1)``.  With field weights
``w`` (1 for alpha, alpha1, beta, beta1 and 0 for alpha*, alpha1*), the mode
indices satisfy ``sum n_l = k + 1 + s - sum (w_l + d_l)`` and carry the
falling-factorial factor ``prod ff(-n_l - w_l, d_l)``.

Normal ordering applies annihilation-class factors first, then the
diagonal Heisenberg modes, then creation-class factors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .algebra import bracket_basis
from .fock import (X, X1, Y, Y1, ZERO_STATE, FockState, ModuleParams, degree_eigenvalue,
                   heis_apply, osc_apply)
from .report import Report
from .ring import PLAIN, USECT
from .scalars import B, CHI0, ONE, ZERO, CoeffPoly, as_poly

FIELDS = ("alpha", "alpha*", "alpha1", "alpha1*", "beta", "beta1")
WEIGHT = {"alpha": 1, "alpha*": 0, "alpha1": 1, "alpha1*": 0, "beta": 1, "beta1": 1}
HEIS_FIELDS = ("beta", "beta1")
_OSC_NAME = {"alpha": "a", "alpha*": "a*", "alpha1": "a1", "alpha1*": "a1*"}


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Gen:
    g: str

    def __post_init__(self):
        if self.g not in FIELDS:
            raise ValueError(f"unknown field {self.g!r}")

    def __str__(self) -> str:
        return self.g


@dataclass(frozen=True)
class NormProd:
    left: "FieldExpr"
    right: "FieldExpr"

    def __str__(self) -> str:
        return f":{self.left} {self.right}:"


@dataclass(frozen=True)
class ZPolyMul:
    poly: Tuple[Tuple[int, CoeffPoly], ...]
    expr: "FieldExpr"

    def __str__(self) -> str:
        p = " + ".join(f"({c})*z^{e}" for e, c in self.poly)
        return f"({p})*{self.expr}"


@dataclass(frozen=True)
class Dz:
    expr: "FieldExpr"

    def __str__(self) -> str:
        return f"d({self.expr})"


@dataclass(frozen=True)
class Scale:
    c: CoeffPoly
    expr: "FieldExpr"

    def __str__(self) -> str:
        return f"({self.c})*{self.expr}"


@dataclass(frozen=True)
class Sum:
    items: Tuple["FieldExpr", ...]

    def __str__(self) -> str:
        return " + ".join(str(i) for i in self.items)


FieldExpr = Union[Gen, NormProd, ZPolyMul, Dz, Scale, Sum]


def norm_prod(*factors: FieldExpr) -> FieldExpr:
    """Right-nested normal-ordered product of two or more factors."""
    if len(factors) == 1:
        return factors[0]
    return NormProd(factors[0], norm_prod(*factors[1:]))


def zpoly(coeffs: Mapping[int, object]) -> Tuple[Tuple[int, CoeffPoly], ...]:
    return tuple(sorted((int(e), as_poly(c)) for e, c in coeffs.items() if as_poly(c)))


# z(1 - 2bz + z^2) and its z-derivative
P_CURVE = zpoly({1: 1, 2: B * -2, 3: 1})
DP_CURVE = zpoly({0: 1, 1: B * -4, 2: 3})

GENERATORS = ("f", "f1", "h", "h1", "e", "e1")
GEN_BASIS = {"e": ("e", PLAIN), "f": ("f", PLAIN), "h": ("h", PLAIN),
             "e1": ("e", USECT), "f1": ("f", USECT), "h1": ("h", USECT)}


def build_theta(gen: str, r: int = 1, chi0=CHI0) -> FieldExpr:
    """theta of a current as a field expression (independent of r)."""
    if r not in (0, 1):
        raise ValueError("r must be 0 or 1")
    chi0 = as_poly(chi0)
    a, a_, a1, a1_, be, be1 = (Gen(g) for g in FIELDS)
    if gen == "f":
        return Scale(-ONE, a)
    if gen == "f1":
        return Scale(-ONE, a1)
    if gen == "h":
        return Sum((Scale(CoeffPoly.const(2), norm_prod(a, a_)),
                    Scale(CoeffPoly.const(2), norm_prod(a1, a1_)), be))
    if gen == "h1":
        return Sum((Scale(CoeffPoly.const(2), norm_prod(a1, a_)),
                    Scale(CoeffPoly.const(2), ZPolyMul(P_CURVE, norm_prod(a, a1_))), be1))
    if gen == "e":
        return Sum((norm_prod(a, a_, a_),
                    ZPolyMul(P_CURVE, norm_prod(a, a1_, a1_)),
                    Scale(CoeffPoly.const(2), norm_prod(a1, a_, a1_)),
                    norm_prod(be, a_),
                    norm_prod(be1, a1_),
                    Scale(chi0, Dz(a_))))
    if gen == "e1":
        return Sum((norm_prod(a1, a_, a_),
                    ZPolyMul(P_CURVE, norm_prod(a1, a1_, a1_)),
                    ZPolyMul(P_CURVE, Scale(CoeffPoly.const(2), norm_prod(a, a_, a1_))),
                    norm_prod(be1, a_),
                    ZPolyMul(P_CURVE, norm_prod(be, a1_)),
                    Scale(chi0, ZPolyMul(P_CURVE, Dz(a1_))),
                    Scale(chi0 / 2, ZPolyMul(DP_CURVE, a1_))))
    raise ValueError(f"unknown generator {gen!r}; expected one of {GENERATORS}")


# ---------------------------------------------------------------------------
# expansion to terms

Factor = Tuple[str, int]  # (field, derivative order)
TermKey = Tuple[int, Tuple[Factor, ...]]  # (z-shift, factors in written order)


@lru_cache(maxsize=None)
def expand(expr: FieldExpr) -> Tuple[Tuple[TermKey, CoeffPoly], ...]:
    """Flatten an expression to ``((zshift, factors), coeff)`` pairs."""
    out: Dict[TermKey, CoeffPoly] = {}

    def add(k, c):
        v = out.get(k, ZERO) + c
        if v:
            out[k] = v
        else:
            out.pop(k, None)

    if isinstance(expr, Gen):
        add((0, ((expr.g, 0),)), ONE)
    elif isinstance(expr, NormProd):
        for (s1, f1), c1 in expand(expr.left):
            for (s2, f2), c2 in expand(expr.right):
                add((s1 + s2, f1 + f2), c1 * c2)
    elif isinstance(expr, ZPolyMul):
        for (s, fs), c in expand(expr.expr):
            for e, pc in expr.poly:
                add((s + e, fs), c * pc)
    elif isinstance(expr, Scale):
        for k, c in expand(expr.expr):
            add(k, c * expr.c)
    elif isinstance(expr, Sum):
        for item in expr.items:
            for k, c in expand(item):
                add(k, c)
    elif isinstance(expr, Dz):
        for (s, fs), c in expand(expr.expr):
            if s:
                add((s - 1, fs), c * s)
            for i, (g, d) in enumerate(fs):
                add((s, fs[:i] + ((g, d + 1),) + fs[i + 1:]), c)
    else:
        raise TypeError(f"not a FieldExpr: {expr!r}")
    return tuple(sorted(out.items(), key=lambda kv: repr(kv[0])))


def term_str(key: TermKey) -> str:
    s, fs = key
    body = " ".join(("d" * d) + g for g, d in fs)
    return f"z^{s} :{body}:"


def _ff(x: int, d: int) -> int:
    out = 1
    for i in range(d):
        out *= x - i
    return out


# ---------------------------------------------------------------------------
# mode classification

Interval = Tuple[Optional[int], Optional[int]]
EMPTY: Interval = (1, 0)


def _is_empty(iv: Interval) -> bool:
    lo, hi = iv
    return lo is not None and hi is not None and lo > hi


def _in(iv: Interval, n: int) -> bool:
    lo, hi = iv
    return not _is_empty(iv) and (lo is None or n >= lo) and (hi is None or n <= hi)


def creation_interval(g: str, params: ModuleParams) -> Interval:
    """Modes of ``g`` acting by pure multiplication."""
    r = params.r
    if g in ("alpha", "alpha1"):
        return (None, -1) if r == 0 else (None, None)
    if g in ("alpha*", "alpha1*"):
        return (None, 0) if r == 0 else EMPTY
    if g == "beta":
        return (None, -1) if params.b_twisted else (1, None)
    if g == "beta1":
        return (0, None) if params.b1_twisted else (None, -2)
    raise ValueError(g)


def diagonal_modes(g: str, params: ModuleParams) -> Tuple[int, ...]:
    """Heisenberg modes that act without a pure creation/annihilation type."""
    if g == "beta":
        return (0,)
    if g == "beta1":
        return (-1,)
    return ()


def classify(g: str, n: int, params: ModuleParams) -> str:
    """'c' creation, 'd' diagonal or 'a' annihilation."""
    if n in diagonal_modes(g, params):
        return "d"
    return "c" if _in(creation_interval(g, params), n) else "a"


def _touch_modes(g: str, var, params: ModuleParams) -> Tuple[int, ...]:
    """Modes of ``g`` whose derivative part can hit ``var``."""
    kind, j = var
    if g in ("alpha", "alpha1"):
        return (j,) if kind == (X if g == "alpha" else X1) else ()
    if g in ("alpha*", "alpha1*"):
        return (-j,) if kind == (X if g == "alpha*" else X1) else ()
    if g == "beta":
        if kind != Y:
            return ()
        return (-j,) if params.b_twisted else (j,)
    if g == "beta1":
        if kind != Y1:
            return ()
        orig = tuple(-j - 1 - i for i in range(3))
        return tuple(-m - 2 for m in orig) if params.b1_twisted else orig
    raise ValueError(g)


def annihilation_candidates(g: str, support, params: ModuleParams) -> List[int]:
    out = set()
    for v in support:
        for n in _touch_modes(g, v, params):
            if classify(g, n, params) == "a":
                out.add(n)
    return sorted(out)


def apply_factor(g: str, n: int, s: FockState, params: ModuleParams) -> FockState:
    if g in _OSC_NAME:
        return osc_apply(_OSC_NAME[g], n, s, params.r)
    return heis_apply("b" if g == "beta" else "b1", n, s, params)


# ---------------------------------------------------------------------------
# finiteness

class InfiniteModeSum(ValueError):
    """Mode extraction would need an infinite sum of creation operators."""

    def __init__(self, verdict: "FinitenessVerdict"):
        super().__init__(f"infinite mode sum: {verdict.witness}")
        self.verdict = verdict


@dataclass
class FinitenessVerdict:
    finite: bool
    monomials: List[dict] = field(default_factory=list)
    witness: Optional[dict] = None

    def to_json(self) -> dict:
        return {"finite": self.finite, "monomials": self.monomials, "witness": self.witness}


def _iv_json(iv: Interval):
    return None if _is_empty(iv) else [iv[0], iv[1]]


@lru_cache(maxsize=None)
def analyze_finiteness(expr: FieldExpr, params: ModuleParams) -> FinitenessVerdict:
    """Static check that each monomial has finitely many creation-only index tuples.

    Factors with a nonempty creation interval are collected; the family at a
    fixed index sum is finite when there is at most one, or when all their
    intervals are bounded on the same side.
    """
    verdict = FinitenessVerdict(True)
    for (s, fs), _c in expand(expr):
        ivs = [(g, creation_interval(g, params)) for g, _d in fs]
        crea = [(i, g, iv) for i, (g, iv) in enumerate(ivs) if not _is_empty(iv)]
        above = all(iv[1] is not None for _, _, iv in crea)
        below = all(iv[0] is not None for _, _, iv in crea)
        finite = len(crea) <= 1 or above or below
        verdict.monomials.append({"term": term_str((s, fs)),
                                  "creation": {f"{i}:{g}": _iv_json(iv) for i, (g, iv) in enumerate(ivs)},
                                  "finite": finite})
        if not finite and verdict.finite:
            verdict.finite = False
            up = next((i, g) for i, g, iv in crea if iv[1] is None)
            down = next((i, g) for i, g, iv in crea if iv[0] is None and (i, g) != up)
            verdict.witness = {"term": term_str((s, fs)),
                               "unbounded_above": f"{up[1]} (factor {up[0]})",
                               "unbounded_below": f"{down[1]} (factor {down[0]})",
                               "family": f"{up[1]}_n {down[1]}_(T-n), n -> +infinity, all creation"}
    return verdict


# ---------------------------------------------------------------------------
# mode application

@dataclass(frozen=True)
class ModeOperator:
    expr: FieldExpr
    k: int
    params: ModuleParams


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _index_tuples(fs: Tuple[Factor, ...], T: int, support, params: ModuleParams):
    """Index tuples with sum T on which the monomial can act nontrivially."""
    finite_opts = []
    ivs = []
    for g, _d in fs:
        finite_opts.append(annihilation_candidates(g, support, params) + list(diagonal_modes(g, params)))
        ivs.append(creation_interval(g, params))
    choices = [opts + (["free"] if not _is_empty(iv) else []) for opts, iv in zip(finite_opts, ivs)]
    for pick in itertools.product(*choices):
        free = [i for i, p in enumerate(pick) if p == "free"]
        rest = T - sum(p for p in pick if p != "free")
        if not free:
            if rest == 0:
                yield pick
            continue
        if len(free) == 1:
            i = free[0]
            if _in(ivs[i], rest):
                yield pick[:i] + (rest,) + pick[i + 1:]
            continue
        fiv = [ivs[i] for i in free]
        if all(iv[1] is not None for iv in fiv):
            bound = sum(iv[1] for iv in fiv) - rest
            sign, edge = -1, [iv[1] for iv in fiv]
        elif all(iv[0] is not None for iv in fiv):
            bound = rest - sum(iv[0] for iv in fiv)
            sign, edge = 1, [iv[0] for iv in fiv]
        else:
            raise RuntimeError("unbounded creation family reached enumeration")
        if bound < 0:
            continue
        for comp in _compositions(bound, len(free)):
            vals = [e + sign * c for e, c in zip(edge, comp)]
            out = list(pick)
            for i, v in zip(free, vals):
                out[i] = v
            yield tuple(out)


def _apply_ordered(fs, idx, s: FockState, params: ModuleParams) -> FockState:
    order = {"a": 0, "d": 1, "c": 2}
    seq = sorted(range(len(fs)), key=lambda i: order[classify(fs[i][0], idx[i], params)])
    for i in seq:
        s = apply_factor(fs[i][0], idx[i], s, params)
        if not s:
            break
    return s


def _check_heis_count(fs) -> None:
    if sum(1 for g, _ in fs if g in HEIS_FIELDS) > 1:
        raise NotImplementedError("at most one Heisenberg factor per normal-ordered monomial")


@lru_cache(maxsize=200000)
def _mode_on_basis(expr: FieldExpr, k: int, key, params: ModuleParams) -> FockState:
    s = FockState._raw({key: ONE})
    support = s.support_vars()
    out = ZERO_STATE
    for (zs, fs), c in expand(expr):
        _check_heis_count(fs)
        T = k + 1 + zs - sum(WEIGHT[g] + d for g, d in fs)
        for idx in _index_tuples(fs, T, support, params):
            coeff = 1
            for (g, d), n in zip(fs, idx):
                coeff *= _ff(-n - WEIGHT[g], d)
            if not coeff:
                continue
            r = _apply_ordered(fs, idx, s, params)
            if r:
                out = out + r.scale(c * coeff)
    return out


def mode_apply(op: ModeOperator, s: FockState) -> FockState:
    """Exact action of mode ``op.k`` of ``op.expr`` on ``s``."""
    verdict = analyze_finiteness(op.expr, op.params)
    if not verdict.finite:
        raise InfiniteModeSum(verdict)
    out = ZERO_STATE
    for key, c in s.terms.items():
        r = _mode_on_basis(op.expr, op.k, key, op.params)
        if r:
            out = out + r.scale(c)
    return out


def naive_window(expr: FieldExpr, k: int, s: FockState) -> int:
    span = max((abs(v[1]) for v in s.support_vars()), default=0)
    zspan = max((abs(zs) for (zs, _), _ in expand(expr)), default=0)
    return abs(k) + 2 * span + zspan + 6


def naive_mode_apply(expr: FieldExpr, k: int, s: FockState, params: ModuleParams,
                     window: Optional[int] = None) -> FockState:
    """Box enumeration over all index tuples with |n| <= window; test oracle only."""
    W = naive_window(expr, k, s) if window is None else window
    out = ZERO_STATE
    for (zs, fs), c in expand(expr):
        T = k + 1 + zs - sum(WEIGHT[g] + d for g, d in fs)
        L = len(fs)
        for head in itertools.product(range(-W, W + 1), repeat=L - 1):
            last = T - sum(head)
            if abs(last) > W:
                continue
            idx = head + (last,)
            coeff = 1
            for (g, d), n in zip(fs, idx):
                coeff *= _ff(-n - WEIGHT[g], d)
            if not coeff:
                continue
            order = {"a": 0, "d": 1, "c": 2}
            st = s
            for i in sorted(range(L), key=lambda i: order[classify(fs[i][0], idx[i], params)]):
                st = apply_factor(fs[i][0], idx[i], st, params)
                if not st:
                    break
            if st:
                out = out + st.scale(c * coeff)
    return out


# ---------------------------------------------------------------------------
# relations

def theta_mode(gen: str, m: int, s: FockState, params: ModuleParams) -> FockState:
    return mode_apply(ModeOperator(build_theta(gen, params.r, params.chi0), m, params), s)


def theta_lie_body(body: Mapping, s: FockState, params: ModuleParams) -> FockState:
    """theta of the non-central part of a LieElement applied to s."""
    out = ZERO_STATE
    for (x, n, sec), c in body.items():
        gen = x + ("1" if sec == USECT else "")
        out = out + theta_mode(gen, n, s, params).scale(c)
    return out


def _scalar_ratio(R: FockState, s: FockState) -> Optional[CoeffPoly]:
    """sigma with R == sigma * s, or None when R is not a scalar multiple of s."""
    if not R:
        return ZERO
    for key, c in s.sorted_items():
        if c.is_constant():
            sigma = R.terms.get(key, ZERO) / c.constant_value()
            return sigma if R == s.scale(sigma) else None
    return None


@dataclass
class RelationRecord:
    X: str
    Y: str
    m: int
    n: int
    c0: CoeffPoly
    cplus: CoeffPoly
    cminus: CoeffPoly
    scalar: Optional[CoeffPoly]

    def to_json(self) -> dict:
        return {"pair": [f"{self.X}_{self.m}", f"{self.Y}_{self.n}"], "w0_coeff": str(self.c0),
                "wplus_coeff": str(self.cplus), "wminus_coeff": str(self.cminus),
                "scalar": None if self.scalar is None else str(self.scalar)}


@dataclass
class RelationReport:
    X: str
    Y: str
    window: int
    params: ModuleParams
    passed: bool = True
    checked: int = 0
    records: List[RelationRecord] = field(default_factory=list)
    failure: Optional[dict] = None

    def to_json(self, full: bool = False) -> dict:
        out = {"pair": [self.X, self.Y], "window": self.window, "passed": self.passed,
               "checked": self.checked, "failure": self.failure,
               "nonzero_scalars": [r.to_json() for r in self.records if r.scalar]}
        if full:
            out["records"] = [r.to_json() for r in self.records]
        return out


def relation_check(X: str, Y: str, W: int, params: ModuleParams, states: Sequence[FockState],
                   constants: str = "oracle") -> RelationReport:
    """[theta X_m, theta Y_n] s - theta([X_m, Y_n] body) s == scalar * s for |m|, |n| <= W."""
    rep = RelationReport(X, Y, W, params)
    for e in (build_theta(X, params.r, params.chi0), build_theta(Y, params.r, params.chi0)):
        v = analyze_finiteness(e, params)
        if not v.finite:
            rep.passed = False
            rep.failure = {"reason": "finiteness", "witness": v.witness}
            return rep
    x, sx = GEN_BASIS[X]
    y, sy = GEN_BASIS[Y]
    for m in range(-W, W + 1):
        for n in range(-W, W + 1):
            br = bracket_basis((x, m, sx), (y, n, sy), constants)
            sigma_seen: Optional[CoeffPoly] = None
            ok = True
            for s in states:
                lhs = theta_mode(X, m, theta_mode(Y, n, s, params), params) - \
                    theta_mode(Y, n, theta_mode(X, m, s, params), params)
                R = lhs - theta_lie_body(br.body, s, params)
                sigma = _scalar_ratio(R, s)
                rep.checked += 1
                if sigma is None or (sigma_seen is not None and sigma != sigma_seen):
                    rep.passed = False
                    rep.failure = {"modes": [m, n], "state": str(s), "residual": str(R),
                                   "reason": "non-scalar residual" if sigma is None else "state-dependent scalar"}
                    ok = False
                    break
                sigma_seen = sigma
            if not ok:
                return rep
            rep.records.append(RelationRecord(X, Y, m, n, br.center.c0, br.center.cplus,
                                              br.center.cminus, sigma_seen))
    return rep


ALL_PAIRS = tuple(itertools.combinations_with_replacement(GENERATORS, 2))
NILPOTENT_PAIRS = (("f", "f"), ("f", "f1"), ("f1", "f1"), ("e", "e"), ("e", "e1"), ("e1", "e1"))


# ---------------------------------------------------------------------------
# calibration of theta(w0)

@dataclass
class CalibrationReport:
    r: int
    heis_variant: str
    window: int
    split_level: bool
    consistent: bool
    assignment: Optional[str]
    level_offset: Optional[str] = None
    implied: List[dict] = field(default_factory=list)
    conflict: Optional[dict] = None
    non_scalar: List[dict] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _implied_values(reports: Sequence[RelationReport]):
    """Per relation with a constant nonzero w0 coefficient: scalar / coeff."""
    out = {}
    for rep in reports:
        for rec in rep.records:
            if rec.c0 and rec.c0.is_constant() and rec.scalar is not None:
                out[(rec.X, rec.Y, rec.m, rec.n)] = rec.scalar / rec.c0.constant_value()
    return out


def _residuals(reports, T0: CoeffPoly):
    """Relations violating scalar == c0 * T0 (w+- map to 0)."""
    bad = []
    for rep in reports:
        for rec in rep.records:
            if rec.scalar is None or rec.scalar != rec.c0 * T0:
                bad.append(rec)
    return bad


def calibrate_center(params: ModuleParams, W: int, states: Sequence[FockState],
                     pairs: Sequence[Tuple[str, str]] = ALL_PAIRS, split_level: bool = False,
                     reports: Optional[Sequence[RelationReport]] = None) -> CalibrationReport:
    """Find theta(w0) consistent with every relation scalar (theta(w+-) = 0).

    With ``split_level`` the Heisenberg level L is varied independently of the
    chi0 appearing inside theta: scalars are affine in L, so the sweep runs at
    L = chi0 and L = chi0 + 1 and solves for an offset L - chi0 making all
    implied values agree.
    """
    rep = CalibrationReport(params.r, params.heis_variant, W, split_level, False, None)
    base = params.with_(level=None)
    if reports is None:
        reports = [relation_check(X, Y, W, base, states) for X, Y in pairs]
    rep.non_scalar = [{"pair": [r.X, r.Y], "failure": r.failure} for r in reports if not r.passed]
    scalar_reports = [r for r in reports if r.passed]
    implied = _implied_values(scalar_reports)
    if not implied:
        rep.notes.append("no relation with a constant w0 coefficient in the window")
        return rep
    if not split_level:
        values = sorted({str(v): v for v in implied.values()}.items())
        rep.implied = [{"value": s, "relations": [f"[{k[0]}_{k[2]}, {k[1]}_{k[3]}]"
                                                   for k, v in sorted(implied.items()) if v == val][:4]}
                       for s, val in values]
        first_key = sorted(implied)[0]
        T0 = implied[first_key]
        bad = _residuals(scalar_reports, T0)
        if bad:
            rep.conflict = _conflict(first_key, T0, bad[0], implied)
        else:
            rep.assignment = str(T0)
        rep.consistent = not bad and not rep.non_scalar
        return rep
    # split level: second sweep at L = chi0 + 1
    shifted = params.with_(level=params.chi0 + 1)
    reports2 = [relation_check(r.X, r.Y, W, shifted, states) for r in scalar_reports]
    implied2 = _implied_values(reports2)
    lines = {k: (implied[k], implied2[k] - implied[k]) for k in implied if k in implied2}
    by_line: Dict[Tuple[str, str], List[str]] = {}
    for k, (a, sl) in sorted(lines.items()):
        by_line.setdefault((str(a), str(sl)), []).append(f"[{k[0]}_{k[2]}, {k[1]}_{k[3]}]")
    rep.implied = [{"at_level_chi0": a, "slope_in_level": sl, "relations": rels[:4]}
                   for (a, sl), rels in sorted(by_line.items())]
    distinct = sorted({(a, sl) for a, sl in lines.values()}, key=str)
    if len(distinct) == 1:
        a, sl = distinct[0]
        rep.assignment = str(a) if not sl else f"{a} + ({sl})*(L - chi0)"
        rep.level_offset = "0" if not sl else "free"
        rep.consistent = not rep.non_scalar
        return rep
    pair = next(((u, v) for u, v in itertools.combinations(distinct, 2)
                 if u[1] != v[1] and (u[1] - v[1]).is_constant()), None)
    if pair is None:
        rep.conflict = {"reason": "implied values differ with equal slopes",
                        "lines": [[str(a), str(sl)] for a, sl in distinct[:2]]}
        return rep
    (a1, s1), (a2, s2) = pair
    delta = (a2 - a1) / (s1 - s2).constant_value()
    T0 = a1 + s1 * delta
    for k, (a, sl) in sorted(lines.items()):
        if a + sl * delta != T0:
            rep.conflict = {"reason": "no common level offset",
                            "offset_solving_first_two": str(delta),
                            "lines": [[str(a1), str(s1)], [str(a2), str(s2)]],
                            "violating": {"relation": f"[{k[0]}_{k[2]}, {k[1]}_{k[3]}]",
                                          "at_level_chi0": str(a), "slope_in_level": str(sl)}}
            return rep
    rep.assignment = str(T0)
    rep.level_offset = str(delta)
    rep.consistent = not rep.non_scalar
    return rep


def _conflict(key, T0, rec: RelationRecord, implied) -> dict:
    other = (rec.X, rec.Y, rec.m, rec.n)
    return {"reference": {"relation": f"[{key[0]}_{key[2]}, {key[1]}_{key[3]}]", "implied_w0": str(T0)},
            "conflicting": {"relation": f"[{rec.X}_{rec.m}, {rec.Y}_{rec.n}]",
                            "w0_coeff": str(rec.c0), "scalar": str(rec.scalar),
                            "implied_w0": str(implied[other]) if other in implied else None}}


# ---------------------------------------------------------------------------
# invariants

def grading_invariant_check(params: ModuleParams, W: int, states: Sequence[FockState],
                            gens: Sequence[str] = GENERATORS) -> Report:
    """Each output monomial of theta(X_m) s has D - D(s) - m in {0, 1, 2, 3}.

    D is the sum of variable indices weighted by exponent.
    """
    rep = Report("grading_invariant")
    for gen in gens:
        for m in range(-W, W + 1):
            for s in states:
                for (mono, vc), _c in s.terms.items():
                    d0 = degree_eigenvalue(mono)
                    out = theta_mode(gen, m, FockState._raw({(mono, vc): ONE}), params)
                    for (om, _), _oc in out.terms.items():
                        rep.checked += 1
                        shift = degree_eigenvalue(om) - d0 - m
                        if shift not in (0, 1, 2, 3):
                            rep.fail(generator=gen, mode=m, state=str(s), output_monomial=str(om),
                                     shift=shift)
                            return rep
    return rep


def same_class_commutation_check(params: ModuleParams, W: int, states: Sequence[FockState]) -> Report:
    """Creation/creation and annihilation/annihilation mode pairs commute exactly."""
    rep = Report("same_class_commutation")
    modes = range(-W, W + 1)
    for g1, g2 in itertools.combinations_with_replacement(FIELDS, 2):
        for n1, n2 in itertools.product(modes, modes):
            c1, c2 = classify(g1, n1, params), classify(g2, n2, params)
            if c1 != c2 or c1 == "d":
                continue
            for s in states:
                rep.checked += 1
                ab = apply_factor(g1, n1, apply_factor(g2, n2, s, params), params)
                ba = apply_factor(g2, n2, apply_factor(g1, n1, s, params), params)
                if ab != ba:
                    rep.fail(pair=[f"{g1}_{n1}", f"{g2}_{n2}"], cls=c1, state=str(s))
                    return rep
    return rep
