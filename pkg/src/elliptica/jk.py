"""Jakobsen-Kac differential-operator realization of sl2 (x) R on C[x_n, x1_n].

Two engines are provided.  :func:`jk_apply` follows the explicit elliptic
formulas with three switchable readings of the u*u terms; :func:`jk_apply_generic`
builds the operators from the ring structure constants only.  The variable
``x_n`` stands for ``t^n`` and ``x1_n`` for ``t^n u``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .fock import X, X1, Y, Y1, ZERO_STATE, FockState, ModuleParams
from .realization import theta_mode
from .report import Report
from .ring import PLAIN, USECT, RingElement, monomial_product
from .scalars import B, ONE, ZERO, CoeffPoly

_KIND = {PLAIN: X, USECT: X1}
_SECTOR = {X: PLAIN, X1: USECT}


@dataclass(frozen=True)
class TypoFlags:
    """Readings of the printed u*u terms.

    uu_coeff: "printed" keeps -2 in the middle term of rho(t^m u h); "b" uses -2b.
    uu_shift: "printed" keeps indices (+2, +1, 0); "curve" uses (+3, +2, +1).
    phi_uu: "printed" uses phi(t^(m+p) (t^2 - 2bt - 1)); "curve" uses
    phi(t^(m+p+1) (t^2 - 2bt + 1)).
    """

    uu_coeff: str = "printed"
    uu_shift: str = "printed"
    phi_uu: str = "printed"

    def __post_init__(self):
        if self.uu_coeff not in ("printed", "b") or self.uu_shift not in ("printed", "curve") \
                or self.phi_uu not in ("printed", "curve"):
            raise ValueError(f"bad typo flags {self}")

    @property
    def name(self) -> str:
        return f"uu_coeff={self.uu_coeff},uu_shift={self.uu_shift},phi_uu={self.phi_uu}"


ALL_FLAGS = tuple(TypoFlags(a, b, c) for a in ("printed", "b") for b in ("printed", "curve")
                  for c in ("printed", "curve"))
CORRECTED = TypoFlags("b", "curve", "curve")


class TraceFunctional:
    """Finitely supported linear functional on R, keyed by (n, sector)."""

    def __init__(self, values: Mapping[Tuple[int, int], object] | None = None):
        self.values: Dict[Tuple[int, int], Fraction] = {
            (int(n), s): Fraction(v) for (n, s), v in (values or {}).items() if Fraction(v)}

    @classmethod
    def from_json(cls, obj: Mapping[str, str]) -> "TraceFunctional":
        """Parse ``{"t^0": "1", "u t^-1": "2/3"}``."""
        vals = {}
        for key, v in obj.items():
            parts = key.replace("*", " ").split()
            sector = PLAIN
            n = 0
            for p in parts:
                if p == "u":
                    sector = USECT
                elif p.startswith("t^"):
                    n = int(p[2:])
                elif p == "t":
                    n = 1
                elif p == "1":
                    n = 0
                else:
                    raise ValueError(f"cannot parse ring monomial {key!r}")
            vals[(n, sector)] = Fraction(v)
        return cls(vals)

    def to_json(self) -> Dict[str, str]:
        return {("u " if s else "") + f"t^{n}": str(v) for (n, s), v in sorted(self.values.items())}

    def __call__(self, f: RingElement) -> CoeffPoly:
        out = ZERO
        for key, c in f.terms.items():
            v = self.values.get(key)
            if v:
                out = out + c * v
        return out

    def of(self, n: int, sector: int) -> CoeffPoly:
        return CoeffPoly.const(self.values.get((n, sector), 0))

    def __bool__(self) -> bool:
        return bool(self.values)


PHI_ZERO = TraceFunctional()


@dataclass(frozen=True)
class JKOperator:
    X: str
    n: int
    sector: int
    flags: TypoFlags = CORRECTED


def _check_x_only(s: FockState) -> None:
    for v in s.support_vars():
        if v[0] in (Y, Y1):
            raise ValueError(f"JK operators act on x-sector states only; found {v}")


def _support(s: FockState, kind: int) -> List[int]:
    return sorted({n for k, n in s.support_vars() if k == kind})


def _uu(shift: str, coeff: str) -> Dict[int, CoeffPoly]:
    """Offsets and coefficients used for a u*u product."""
    base = 1 if shift == "curve" else 0
    mid = B * -2 if coeff == "b" else CoeffPoly.const(-2)
    return {base + 2: ONE, base + 1: mid, base: ONE}


def _mul_d(s: FockState, target: Tuple[int, int], d1: Tuple[int, int], d2: Optional[Tuple[int, int]],
           c) -> FockState:
    r = s.d_var(d1)
    if d2 is not None:
        r = r.d_var(d2)
    return r.mul_var(target, c) if r else ZERO_STATE


def jk_apply(op: JKOperator, s: FockState, phi: TraceFunctional = PHI_ZERO) -> FockState:
    """The printed elliptic operators with the u*u readings in ``op.flags``."""
    _check_x_only(s)
    m, fl = op.n, op.flags
    uu_e = _uu(fl.uu_shift, "b")  # the e-operators print -2b already
    uu_h = _uu(fl.uu_shift, fl.uu_coeff)
    xs, x1s = _support(s, X), _support(s, X1)
    out = ZERO_STATE
    if op.X == "f":
        return s.mul_var((_KIND[op.sector], m))
    if op.X == "h":
        if op.sector == PLAIN:
            for p in xs:
                out = out + _mul_d(s, (X, m + p), (X, p), None, -2)
            for p in x1s:
                out = out + _mul_d(s, (X1, m + p), (X1, p), None, -2)
        else:
            for p in xs:
                out = out + _mul_d(s, (X1, m + p), (X, p), None, -2)
            for p in x1s:
                for off, c in uu_h.items():
                    out = out + _mul_d(s, (X, m + p + off), (X1, p), None, c * -2)
        return out + s.scale(phi.of(m, op.sector))
    if op.X != "e":
        raise ValueError(f"unknown generator {op.X!r}")
    if op.sector == PLAIN:
        for n, q in itertools.product(xs, xs):
            out = out + _mul_d(s, (X, m + n + q), (X, n), (X, q), -1)
        for n, q in itertools.product(xs, x1s):
            out = out + _mul_d(s, (X1, m + n + q), (X, n), (X1, q), -1)
        for n, q in itertools.product(x1s, xs):
            out = out + _mul_d(s, (X1, m + n + q), (X1, n), (X, q), -1)
        for n, q in itertools.product(x1s, x1s):
            for off, c in uu_e.items():
                out = out + _mul_d(s, (X, m + n + q + off), (X1, n), (X1, q), -c)
        for p in xs:
            out = out + s.d_var((X, p), phi.of(m + p, PLAIN))
        for p in x1s:
            out = out + s.d_var((X1, p), phi.of(m + p, USECT))
        return out
    for n, q in itertools.product(xs, xs):
        out = out + _mul_d(s, (X1, m + n + q), (X, n), (X, q), -1)
    for n, q in itertools.product(xs, x1s):
        for off, c in uu_e.items():
            out = out + _mul_d(s, (X, m + n + q + off), (X, n), (X1, q), -c)
    for n, q in itertools.product(x1s, xs):
        for off, c in uu_e.items():
            out = out + _mul_d(s, (X, m + n + q + off), (X1, n), (X, q), -c)
    for n, q in itertools.product(x1s, x1s):
        for off, c in uu_e.items():
            out = out + _mul_d(s, (X1, m + n + q + off), (X1, n), (X1, q), -c)
    for p in xs:
        out = out + s.d_var((X, p), phi.of(m + p, USECT))
    for p in x1s:
        if fl.phi_uu == "curve":
            val = phi.of(m + p + 3, PLAIN) - phi.of(m + p + 2, PLAIN) * B * 2 + phi.of(m + p + 1, PLAIN)
        else:
            val = phi.of(m + p + 2, PLAIN) - phi.of(m + p + 1, PLAIN) * B * 2 - phi.of(m + p, PLAIN)
        out = out + s.d_var((X1, p), val)
    return out


# ---------------------------------------------------------------------------
# generic engine from structure constants

def jk_apply_generic(X_: str, a0: Tuple[int, int], s: FockState, phi: TraceFunctional = PHI_ZERO) -> FockState:
    """rho(a0 X) from c^gamma_{alpha beta} of R:

    f: x_{a0};  h: -2 c^g_{a0 a} x_g d_a + phi(a0);
    e: -c^g_{a0 a} c^d_{g b} x_d d_a d_b + phi(a_g) c^g_{a0 a} d_a.
    """
    _check_x_only(s)
    n0, s0 = a0
    basis = sorted((_SECTOR[k], n) for k, n in s.support_vars())
    out = ZERO_STATE
    if X_ == "f":
        return s.mul_var((_KIND[s0], n0))
    if X_ == "h":
        for sa, na in basis:
            for (ng, sg), c in monomial_product(n0, s0, na, sa).items():
                out = out + _mul_d(s, (_KIND[sg], ng), (_KIND[sa], na), None, c * -2)
        return out + s.scale(phi.of(n0, s0))
    if X_ != "e":
        raise ValueError(f"unknown generator {X_!r}")
    for sa, na in basis:
        for (ng, sg), c in monomial_product(n0, s0, na, sa).items():
            for sb, nb in basis:
                for (nd, sd), c2 in monomial_product(ng, sg, nb, sb).items():
                    out = out + _mul_d(s, (_KIND[sd], nd), (_KIND[sa], na), (_KIND[sb], nb), -(c * c2))
            out = out + s.d_var((_KIND[sa], na), c * phi.of(ng, sg))
    return out


# ---------------------------------------------------------------------------
# relation check

_SL2 = {("e", "f"): {"h": 1}, ("f", "e"): {"h": -1}, ("h", "e"): {"e": 2}, ("e", "h"): {"e": -2},
        ("h", "f"): {"f": -2}, ("f", "h"): {"f": 2}}


def _rho_ring(X_: str, f: Mapping[Tuple[int, int], CoeffPoly], s: FockState, phi, flags) -> FockState:
    out = ZERO_STATE
    for (n, sec), c in f.items():
        out = out + jk_apply(JKOperator(X_, n, sec, flags), s, phi).scale(c)
    return out


def jk_relation_check(W: int, phi: TraceFunctional, states: Sequence[FockState],
                      flags: TypoFlags = CORRECTED) -> Report:
    """[rho(X f), rho(Y g)] == rho([X, Y] fg) on monomials |n| <= W (no central terms)."""
    rep = Report(f"jk_relation[{flags.name}]")
    items = [(X_, (n, sec)) for X_ in ("e", "h", "f") for sec in (PLAIN, USECT) for n in range(-W, W + 1)]
    for (X_, a), (Y_, b) in itertools.combinations_with_replacement(items, 2):
        prod = monomial_product(a[0], a[1], b[0], b[1])
        for s in states:
            rep.checked += 1
            A = JKOperator(X_, a[0], a[1], flags)
            Bop = JKOperator(Y_, b[0], b[1], flags)
            lhs = jk_apply(A, jk_apply(Bop, s, phi), phi) - jk_apply(Bop, jk_apply(A, s, phi), phi)
            rhs = ZERO_STATE
            for Z, c in _SL2.get((X_, Y_), {}).items():
                rhs = rhs + _rho_ring(Z, prod, s, phi, flags).scale(c)
            if lhs != rhs:
                rep.fail(pair=[f"{X_}*{_mono(a)}", f"{Y_}*{_mono(b)}"], state=str(s),
                         lhs=str(lhs), rhs=str(rhs))
                return rep
    return rep


def _mono(a) -> str:
    return f"t^{a[0]}" + ("*u" if a[1] else "")


def typo_sweep(W: int, phis: Sequence[TraceFunctional], states: Sequence[FockState]) -> dict:
    """Run the relation check for every flag configuration and each phi."""
    rows = []
    for fl in ALL_FLAGS:
        reps = [jk_relation_check(W, phi, states, fl) for phi in phis]
        rows.append({"flags": fl.name, "closes": all(r.passed for r in reps),
                     "failure": next((r.failure for r in reps if not r.passed), None)})
    closing = [r["flags"] for r in rows if r["closes"]]
    return {"window": W, "configurations": rows, "closing": closing}


def engines_agree(W: int, phi: TraceFunctional, states: Sequence[FockState], flags: TypoFlags = CORRECTED) -> Report:
    """Printed-formula engine (with ``flags``) against the structure-constant engine."""
    rep = Report(f"jk_engines[{flags.name}]")
    for X_ in ("e", "h", "f"):
        for sec in (PLAIN, USECT):
            for n in range(-W, W + 1):
                for s in states:
                    rep.checked += 1
                    a = jk_apply(JKOperator(X_, n, sec, flags), s, phi)
                    b = jk_apply_generic(X_, (n, sec), s, phi)
                    if a != b:
                        rep.fail(op=f"{X_}*{_mono((n, sec))}", state=str(s), printed=str(a), generic=str(b))
                        return rep
    return rep


# ---------------------------------------------------------------------------
# comparison with the r = 1 free-field realization

QUOTIENT_PARAMS = ModuleParams(r=1, heis_variant="original", chi0=0, lam=0, mu=0, nu=0, kappa=0)


def y_degree(key) -> int:
    mono, _ = key
    return sum(e for v, e in mono if v[0] in (Y, Y1))


def project_y0(s: FockState) -> FockState:
    return FockState._raw({k: c for k, c in s.terms.items() if y_degree(k) == 0})


def quotient_invariance_check(W: int, states: Sequence[FockState]) -> Report:
    """Every theta mode maps the y-degree >= 1 span into itself at chi0 = lambda = 0, B = 0."""
    rep = Report("quotient_invariance")
    for gen in ("e", "f", "h", "e1", "f1", "h1"):
        for m in range(-W, W + 1):
            for s in states:
                if not s:
                    continue
                low = min(y_degree(k) for k in s.terms)
                if low < 1:
                    continue
                out = theta_mode(gen, m, s, QUOTIENT_PARAMS)
                rep.checked += 1
                if any(y_degree(k) < 1 for k in out.terms):
                    rep.fail(generator=f"{gen}_{m}", state=str(s), image=str(out))
                    return rep
    return rep


@dataclass
class ComparisonReport:
    window: int
    characters: List[dict] = field(default_factory=list)
    found: Optional[Dict[str, int]] = None
    per_component: Dict[str, Optional[Dict[str, int]]] = field(default_factory=dict)
    invariance: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return self.found is not None

    def to_json(self) -> dict:
        return {"window": self.window, "passed": self.passed, "found": self.found,
                "per_component": self.per_component, "characters": self.characters,
                "quotient_invariance": self.invariance}


def _sign_name(eps: Dict[str, int]) -> str:
    return "(" + ", ".join(("-" if eps[x] < 0 else "") + x for x in ("e", "h", "f")) + ")"


def jk_compare(W: int, states: Sequence[FockState], flags: TypoFlags = CORRECTED) -> ComparisonReport:
    """Search sign characters eps with proj(theta(X_m)) == rho_JK(eps(X) t^m) at phi = 0.

    ``states`` must be x-only; each is tried on both V components.
    """
    rep = ComparisonReport(W)
    for s in states:
        _check_x_only(s)
    lifted = {vc: [FockState._raw({(m, vc): c for (m, _), c in s.terms.items()}) for s in states]
              for vc in (0, 1)}
    gens = [(g, g.rstrip("1"), USECT if g.endswith("1") else PLAIN) for g in ("e", "h", "f", "e1", "h1", "f1")]
    # theta images computed once per component
    images: Dict[Tuple[int, str, int, int], FockState] = {}
    for vc in (0, 1):
        for g, _, _ in gens:
            for m in range(-W, W + 1):
                for i, s in enumerate(lifted[vc]):
                    images[(vc, g, m, i)] = project_y0(theta_mode(g, m, s, QUOTIENT_PARAMS))
    for vc in (0, 1):
        found = None
        for signs in itertools.product((1, -1), repeat=3):
            eps = dict(zip(("e", "h", "f"), signs))
            ok, witness = True, None
            for g, X_, sec in gens:
                for m in range(-W, W + 1):
                    for i, s in enumerate(states):
                        jk = jk_apply(JKOperator(X_, m, sec, flags), s).scale(eps[X_])
                        jk = FockState._raw({(mo, vc): c for (mo, _), c in jk.terms.items()})
                        if images[(vc, g, m, i)] != jk:
                            ok, witness = False, {"generator": f"{g}_{m}", "state": str(s)}
                            break
                    if not ok:
                        break
                if not ok:
                    break
            if vc == 0:
                rep.characters.append({"epsilon": _sign_name(eps), "matches": ok, "first_mismatch": witness})
            if ok and found is None:
                found = eps
        rep.per_component[f"v{vc}"] = None if found is None else {k: v for k, v in found.items()}
    v0, v1 = rep.per_component.get("v0"), rep.per_component.get("v1")
    rep.found = v0 if v0 is not None and v0 == v1 else None
    return rep
