"""Configuration, deterministic state sampling and suite orchestration.

Every suite is a list of independent cases.  Cases are described by plain
data and rebuilt inside the worker, so they run identically in-process or in
a process pool; results are collected in submission order and the document
is serialized with sorted keys, which makes it byte-identical across runs
and parallelism widths.
"""

from __future__ import annotations

import json
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import __version__
from . import algebra, fock, jk, pollaczek, realization, ring
from .fock import KINDS, Y, Y1, FockState, ModuleParams
from .scalars import CHI0, KAPPA, LAMBDA, MU, NU, CoeffPoly

SUITES = ("pollaczek", "cocycle", "jacobi", "grading", "borel", "heisenberg", "twodim",
          "realize", "calibrate", "jk", "jk-compare")
ALL = "all"

DEFAULT_WINDOWS = {"pollaczek": 10, "cocycle": 4, "jacobi": 4, "grading": 4, "borel": 4,
                   "heisenberg": 8, "twodim": 1, "realize": 3, "calibrate": 3, "jk": 3,
                   "jk-compare": 3}
DEFAULT_DEGREES = {"heisenberg": 3}
SYMBOLIC = {"chi0": CHI0, "lambda": LAMBDA, "mu": MU, "nu": NU, "kappa": KAPPA}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class HarnessConfig:
    seed: int = 0
    windows: Tuple[Tuple[str, int], ...] = ()
    degree: Optional[int] = None  # None: per-suite default
    degrees: Tuple[Tuple[str, int], ...] = ()
    count: int = 4
    index_window: int = 2
    r: int = 1
    heis_variant: Optional[str] = None  # None: mixed for r = 0, original for r = 1
    constants_source: str = "oracle"
    bindings: Tuple[Tuple[str, str], ...] = ()
    split_level: bool = False
    ode_order: int = 8
    engine_cases: int = 200
    phi: Tuple[Tuple[str, str], ...] = ()  # empty: a random functional from the seed
    threads: int = 1

    def __post_init__(self):
        if self.degree is not None and self.degree < 1:
            raise ConfigError("field 'degree': must be >= 1")
        for name in ("count", "index_window", "ode_order", "engine_cases", "threads"):
            if getattr(self, name) < 1:
                raise ConfigError(f"field '{name}': must be >= 1")
        for suite, w in self.windows + self.degrees:
            if suite not in SUITES and suite != "*":
                raise ConfigError(f"unknown suite {suite!r}")
            if w < 1:
                raise ConfigError(f"bound for suite {suite!r} must be >= 1")
        if self.r not in (0, 1):
            raise ConfigError("field 'r': must be 0 or 1")
        if self.heis_variant is not None and self.heis_variant not in fock.HEIS_VARIANTS:
            raise ConfigError(f"field 'variant': must be one of {', '.join(fock.HEIS_VARIANTS)}")
        if self.constants_source not in ("paper", "oracle"):
            raise ConfigError("field 'constants': must be paper or oracle")
        for key, value in self.bindings:
            if key not in SYMBOLIC and key != "level":
                raise ConfigError(f"field '{key}': not a bindable parameter")
            if value != "symbolic":
                _rational(key, value)

    def window(self, suite: str) -> int:
        d = dict(self.windows)
        return d.get(suite, d.get("*", DEFAULT_WINDOWS[suite]))

    def degree_for(self, suite: str) -> int:
        d = dict(self.degrees)
        if suite in d:
            return d[suite]
        return self.degree if self.degree is not None else DEFAULT_DEGREES.get(suite, 2)

    @property
    def variant(self) -> str:
        if self.heis_variant is not None:
            return self.heis_variant
        return "mixed" if self.r == 0 else "original"

    def module_params(self) -> ModuleParams:
        kw = {"r": self.r, "heis_variant": self.variant}
        names = {"chi0": "chi0", "lambda": "lam", "mu": "mu", "nu": "nu", "kappa": "kappa", "level": "level"}
        for key, value in self.bindings:
            if value == "symbolic":
                kw[names[key]] = SYMBOLIC.get(key)
            else:
                kw[names[key]] = CoeffPoly.const(_rational(key, value))
        return ModuleParams(**kw)

    def to_json(self) -> dict:
        # threads is deliberately absent: the document must not depend on it
        return {"seed": self.seed, "windows": {s: self.window(s) for s in SUITES},
                "degrees": {s: self.degree_for(s) for s in SUITES}, "count": self.count,
                "index_window": self.index_window, "r": self.r, "heis_variant": self.variant,
                "constants_source": self.constants_source, "bindings": dict(self.bindings),
                "split_level": self.split_level, "ode_order": self.ode_order,
                "engine_cases": self.engine_cases, "phi": dict(self.phi) or "random"}

    def with_(self, **kw) -> "HarnessConfig":
        return replace(self, **kw)


def _rational(key: str, value: str) -> Fraction:
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"field '{key}': invalid rational {value!r}") from None


_INT_FIELDS = {"seed": "seed", "degree": "degree", "count": "count", "index_window": "index_window",
               "r": "r", "ode_order": "ode_order", "engine_cases": "engine_cases", "threads": "threads"}


def parse_config(text: str, source: str = "<config>") -> HarnessConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Keys: seed, threads, degree, count, index_window, r, variant, constants,
    split_level, ode_order, engine_cases, window, window.<suite>,
    degree.<suite>, chi0, lambda, mu, nu, kappa, level, phi.<monomial>.
    """
    kw: dict = {}
    windows, degrees, bindings, phi = [], [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected key = value, got {line!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        try:
            if key in _INT_FIELDS:
                kw[_INT_FIELDS[key]] = _int(key, value)
            elif key == "variant":
                kw["heis_variant"] = value
            elif key == "constants":
                kw["constants_source"] = value
            elif key == "split_level":
                if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise ConfigError(f"field '{key}': expected a boolean, got {value!r}")
                kw["split_level"] = value.lower() in ("true", "1", "yes")
            elif key == "window" or key.startswith("window."):
                windows.append((key.partition(".")[2] or "*", _int(key, value)))
            elif key.startswith("degree."):
                degrees.append((key.partition(".")[2], _int(key, value)))
            elif key in SYMBOLIC or key == "level":
                bindings.append((key, value))
            elif key.startswith("phi."):
                _rational(key, value)
                phi.append((key.partition(".")[2], value))
            else:
                raise ConfigError(f"unknown key {key!r}")
            HarnessConfig(**dict(kw, windows=tuple(windows), degrees=tuple(degrees),
                                 bindings=tuple(bindings), phi=tuple(phi)))
        except ConfigError as exc:
            raise ConfigError(f"{where}: {exc}") from None
    return HarnessConfig(**dict(kw, windows=tuple(windows), degrees=tuple(degrees),
                                bindings=tuple(bindings), phi=tuple(phi)))


def _int(key: str, value: str) -> int:
    try:
        return int(value, 0)
    except ValueError:
        raise ConfigError(f"field '{key}': invalid integer {value!r}") from None


def resolve_threads(cfg: HarnessConfig) -> int:
    env = os.environ.get("ELLIPTICA_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"ELLIPTICA_THREADS: invalid integer {env!r}") from None
        if n < 1:
            raise ConfigError("ELLIPTICA_THREADS: must be >= 1")
        return n
    return cfg.threads


# ---------------------------------------------------------------------------
# states

_KIND_BY_NAME = {name: i for i, name in enumerate(KINDS)}


def sample_states(seed: int, count: int, degree: int, index_window: int,
                  sectors: Sequence[str] = KINDS, vcomps: Sequence[int] = (0, 1)) -> List[FockState]:
    """vacuum_0, vacuum_1, then ``count`` random monomials.

    Each monomial has between 1 and ``degree`` variables (with multiplicity)
    drawn from ``sectors``; x indices lie in [-w, w], y indices in [-w, -1];
    the coefficient is a nonzero integer in [-3, 3].
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if degree < 1 or index_window < 1:
        raise ValueError("degree and index_window must be >= 1")
    kinds = [_KIND_BY_NAME[s] for s in sectors]
    rng = random.Random(seed)
    out = [FockState.vacuum(0), FockState.vacuum(1)]
    for _ in range(count):
        variables: Dict[Tuple[int, int], int] = {}
        for _ in range(rng.randint(1, degree)):
            kind = rng.choice(kinds)
            if kind in (Y, Y1):
                n = rng.randint(-index_window, -1)
            else:
                n = rng.randint(-index_window, index_window)
            variables[(kind, n)] = variables.get((kind, n), 0) + 1
        coeff = rng.choice((-3, -2, -1, 1, 2, 3))
        out.append(FockState.monomial(variables, rng.choice(list(vcomps)), coeff))
    return out


def random_phi(seed: int, support: int = 3, index_window: int = 2) -> jk.TraceFunctional:
    rng = random.Random(seed ^ 0x5F1)
    vals = {}
    for _ in range(support):
        key = (rng.randint(-index_window, index_window), rng.randint(0, 1))
        vals[key] = Fraction(rng.choice((-3, -2, -1, 1, 2, 3)), rng.randint(1, 3))
    return jk.TraceFunctional(vals)


def _states(cfg: HarnessConfig, suite: str, x_only: bool = False) -> List[FockState]:
    if x_only:
        return sample_states(cfg.seed, cfg.count, cfg.degree_for(suite), cfg.index_window,
                             ("x", "x1"), vcomps=(0,))
    return sample_states(cfg.seed, cfg.count, cfg.degree_for(suite), cfg.index_window)


def _phis(cfg: HarnessConfig) -> List[jk.TraceFunctional]:
    if cfg.phi:
        return [jk.PHI_ZERO, jk.TraceFunctional.from_json(dict(cfg.phi))]
    return [jk.PHI_ZERO, random_phi(cfg.seed)]


# ---------------------------------------------------------------------------
# cases

def _record(name: str, asserted: bool, passed: bool, inputs=None, expected=None, got=None) -> dict:
    verdict = ("pass" if passed else "fail") if asserted else "report"
    return {"case": name, "asserted": asserted, "inputs": inputs or {}, "expected": expected,
            "got": got, "verdict": verdict}


def _from_report(name: str, rep, asserted: bool = True, inputs=None, expected="pass") -> dict:
    return _record(name, asserted, rep.passed, inputs, expected, rep.to_json())


PRINTED_INITIAL = {
    "p0": "0", "p1": "1", "q0": "1", "q1": "0",
    "p2": "4/5*b - 4/5", "q2": "1/5",
    "p3": "32/35*b^2 - 48/35*b + 11/35", "q3": "8/35*b - 4/35",
}


def _printed_poly(key: str) -> CoeffPoly:
    b = CoeffPoly.symbol("b")
    table = {"p0": CoeffPoly.const(0), "p1": CoeffPoly.const(1), "q0": CoeffPoly.const(1),
             "q1": CoeffPoly.const(0), "p2": (b - 1).scale(Fraction(4, 5)), "q2": CoeffPoly.const(Fraction(1, 5)),
             "p3": (b * b * 32 - b * 48 + 11).scale(Fraction(1, 35)), "q3": (b * 2 - 1).scale(Fraction(4, 35))}
    return table[key]


def _pollaczek_case(cfg: HarnessConfig, case: str) -> dict:
    kmax = cfg.window("pollaczek")
    if case == "initial_values":
        got, ok = {}, True
        for k in range(4):
            pr = pollaczek.pollaczek_pq(k)
            for name, val in ((f"p{k}", pr.p), (f"q{k}", pr.q)):
                got[name] = str(val)
                ok &= val == _printed_poly(name)
        return _record(case, True, ok, {"k": [0, 3]}, {k: str(_printed_poly(k)) for k in PRINTED_INITIAL}, got)
    if case == "degree_bounds":
        rows = [pollaczek.pollaczek_pq(k) for k in range(kmax + 1)]
        bad = [r.k for r in rows if not r.degree_bounds_hold()]
        return _record(case, True, not bad, {"kmax": kmax}, "deg p_k <= k-1, deg q_k <= k-2", {"violations": bad})
    if case == "determinant":
        p2, p3 = pollaczek.pollaczek_pq(2), pollaczek.pollaczek_pq(3)
        det = p2.p * p3.q - p3.p * p2.q
        return _record(case, True, det == CoeffPoly.const(Fraction(1, 35)), {}, "1/35", str(det))
    if case == "crosscheck":
        return _record(case, False, True, {"kmax": kmax},
                       None, {"printed_parameters": pollaczek.crosscheck_oracle(kmax).to_json(),
                              "oracle_parameters": pollaczek.crosscheck_oracle(kmax, pollaczek.ORACLE_PARAMS).to_json()})
    if case == "gf_ode":
        N = cfg.ode_order
        got = {}
        for label, prm in (("printed", pollaczek.PAPER_PARAMS), ("oracle", pollaczek.ORACLE_PARAMS)):
            for c in (-1, 1):
                for which in ("P", "Q"):
                    res = pollaczek.gf_ode_residual(which, N, prm, cubic_constant=c)
                    got[f"{label}/cubic={c:+d}/{which}"] = {"zero": res.is_zero(),
                                                             "nonzero_orders": res.nonzero_orders(),
                                                             "first": str(res[res.nonzero_orders()[0]])
                                                             if not res.is_zero() else None}
        return _record(case, False, True, {"order": N}, None, got)
    if case == "spotcheck":
        got = {}
        for label, prm in (("printed", pollaczek.PAPER_PARAMS), ("oracle", pollaczek.ORACLE_PARAMS)):
            rep = pollaczek.numeric_gf_spotcheck(Fraction(1, 10), Fraction(1, 3), params=prm)
            d = rep.to_json()
            got[label] = {k: (None if v is None else (round(v, 12) if isinstance(v, float) else v))
                          for k, v in d.items()}
        return _record(case, False, True, {"x0": "1/10", "b0": "1/3"}, None, got)
    raise KeyError(case)


def _cocycle_case(cfg: HarnessConfig, case: str) -> dict:
    W = cfg.window("cocycle")
    checks = {"tau_negation": ring.tau_negation_check, "cocycle_identity": ring.cocycle_identity_check,
              "leibniz": ring.leibniz_check}
    if case in checks:
        return _from_report(case, checks[case](W), inputs={"window": W})
    if case == "confluence":
        return _from_report(case, ring.confluence_check(W, range(4)), inputs={"window": W, "seeds": 4})
    if case == "cocycle_form":
        src = cfg.constants_source
        return _from_report(case, algebra.cocycle_form_check(W, src), src == "oracle",
                            {"window": W, "constants": src})
    raise KeyError(case)


def _algebra_case(suite: str, cfg: HarnessConfig, case: str) -> dict:
    W, src = cfg.window(suite), cfg.constants_source
    inputs = {"window": W, "constants": src}
    if case == "skew":
        return _from_report(case, algebra.skew_check(W, src), src == "oracle", inputs)
    if case == "jacobi":
        return _from_report(case, algebra.jacobi_check(W, src), src == "oracle", inputs,
                            "pass" if src == "oracle" else None)
    if case == "grading":
        return _from_report(case, algebra.grading_check(W, src), True, inputs)
    if case == "borel":
        return _from_report(case, algebra.borel_check(W, src), True, inputs)
    raise KeyError(case)


def _heisenberg_case(cfg: HarnessConfig, case: str) -> dict:
    W = cfg.window("heisenberg")
    if case == "relations":
        params = cfg.module_params()
        states = _states(cfg, "heisenberg")
        rep = fock.heis_relation_check(W, params, states)
        return _record(case, True, rep.passed, {"window": W, "degree": cfg.degree_for("heisenberg"),
                                                "states": [str(s) for s in states]}, "pass", rep.to_json())
    if case == "image":
        return _from_report(case, algebra.heisenberg_image_check(W), inputs={"window": W})
    raise KeyError(case)


DEGENERATE_CONTROLS = (
    ("p3=q3=0, pairs (0,1),(0,2)", {3: (0, 0)}, ((0, 1), (0, 2))),
    ("p3=q3=0, pairs (0,2),(1,1)", {3: (0, 0)}, ((0, 2), (1, 1))),
)


def _twodim_case(cfg: HarnessConfig, case: str) -> dict:
    if case == "constraints":
        v = fock.twodim_constraints()
        ok = v.forces_zero and v.determinant == CoeffPoly.const(Fraction(1, 35))
        return _record(case, True, ok, {"pairs": [list(p) for p in fock.DEFAULT_PAIRS]},
                       {"verdict": "chi+ = chi- = 0", "determinant_p2q3_minus_p3q2": "1/35"}, v.to_json())
    if case == "degenerate_controls":
        got = {}
        for label, over, pairs in DEGENERATE_CONTROLS:
            got[label] = fock.twodim_constraints(pairs=pairs, overrides=over).to_json()
        return _record(case, False, True, {}, None, got)
    raise KeyError(case)


FH_PAIRS = (("f", "h"), ("f", "h1"), ("f1", "h"), ("f1", "h1"))


def _pair_key(X: str, Y: str) -> Tuple[str, str]:
    order = {g: i for i, g in enumerate(realization.GENERATORS)}
    return (X, Y) if order[X] <= order[Y] else (Y, X)


def relation_asserted(params: ModuleParams, X: str, Y: str) -> bool:
    """Which generator pairs the realize suite treats as asserted."""
    if params.r == 1:
        return True
    if params.heis_variant != "mixed":
        return False
    key = _pair_key(X, Y)
    return key in {_pair_key(*p) for p in realization.NILPOTENT_PAIRS + FH_PAIRS}


def _realize_case(suite: str, cfg: HarnessConfig, case: str) -> dict:
    W = cfg.window(suite)
    params = cfg.module_params()
    if case == "finiteness":
        got = {}
        for g in realization.GENERATORS:
            v = realization.analyze_finiteness(realization.build_theta(g, params.r, params.chi0), params)
            got[g] = {"finite": v.finite, "witness": v.witness}
        expect_finite = params.r == 1 or params.heis_variant == "mixed"
        ok = all(v["finite"] for v in got.values()) if expect_finite else \
            any(not v["finite"] for v in got.values())
        return _record(case, True, ok, params.to_json(),
                       "all finite" if expect_finite else "infinite witness", got)
    states = _states(cfg, suite)
    if case.startswith("relation:"):
        X, Y = case.split(":", 1)[1].split(",")
        rep = realization.relation_check(X, Y, W, params, states)
        return _record(case, relation_asserted(params, X, Y), rep.passed,
                       {"window": W, "pair": [X, Y]}, "scalar residuals", rep.to_json())
    if case == "engine":
        return _engine_case(cfg, params, W)
    if case == "grading_invariant":
        rep = realization.grading_invariant_check(params, W, states)
        asserted = params.r == 1 and params.heis_variant == "mixed"
        return _from_report(case, rep, asserted, {"window": W})
    if case == "calibration" or case == "calibration_split":
        split = case == "calibration_split"
        rep = realization.calibrate_center(params, W, states, split_level=split)
        return _record(case, False, True, {"window": W, "split_level": split, "params": params.to_json()},
                       None, rep.to_json())
    raise KeyError(case)


def _engine_case(cfg: HarnessConfig, params: ModuleParams, W: int) -> dict:
    """mode_apply against the naive box enumerator, plus window widening."""
    rng = random.Random(cfg.seed + 17)
    states = sample_states(cfg.seed + 1, cfg.engine_cases, 2, cfg.index_window)
    gens = [g for g in realization.GENERATORS
            if realization.analyze_finiteness(realization.build_theta(g, params.r, params.chi0), params).finite]
    checked, failure = 0, None
    for i in range(cfg.engine_cases if gens else 0):
        g = rng.choice(gens)
        k = rng.randint(-W, W)
        s = states[2 + i]
        expr = realization.build_theta(g, params.r, params.chi0)
        fast = realization.mode_apply(realization.ModeOperator(expr, k, params), s)
        slow = realization.naive_mode_apply(expr, k, s, params)
        wide = realization.naive_mode_apply(expr, k, s, params,
                                            window=realization.naive_window(expr, k, s) + 3)
        checked += 1
        if not (fast == slow == wide):
            failure = {"generator": g, "k": k, "state": str(s), "mode_apply": str(fast),
                       "naive": str(slow), "naive_widened": str(wide)}
            break
    ok = failure is None and checked > 0
    return _record("engine", True, ok, {"cases": cfg.engine_cases, "window": W},
                   "mode_apply == naive == widened", {"checked": checked, "failure": failure,
                                                      "generators": gens})


def _jk_case(cfg: HarnessConfig, case: str) -> dict:
    W = cfg.window("jk")
    states = _states(cfg, "jk", x_only=True)
    phis = _phis(cfg)
    if case.startswith("typo:"):
        flags = next(f for f in jk.ALL_FLAGS if f.name == case[5:])
        reps = [jk.jk_relation_check(W, phi, states, flags) for phi in phis]
        closes = all(r.passed for r in reps)
        return _record(case, False, True, {"window": W, "phis": [p.to_json() for p in phis]}, None,
                       {"closes": closes, "checked": sum(r.checked for r in reps),
                        "failure": next((r.failure for r in reps if not r.passed), None)})
    if case == "engines_agree":
        reps = [jk.engines_agree(W, phi, states) for phi in phis]
        return _record(case, True, all(r.passed for r in reps), {"window": W, "flags": jk.CORRECTED.name},
                       "pass", [r.to_json() for r in reps])
    raise KeyError(case)


def _jk_compare_case(cfg: HarnessConfig, case: str) -> dict:
    W = cfg.window("jk-compare")
    if case == "compare":
        states = _states(cfg, "jk-compare", x_only=True)
        rep = jk.jk_compare(W, states)
        return _record(case, True, rep.passed, {"window": W, "states": [str(s) for s in states]},
                       {"e": -1, "h": 1, "f": -1}, rep.to_json())
    if case == "quotient_invariance":
        states = _states(cfg, "jk-compare")
        return _from_report(case, jk.quotient_invariance_check(W, states), inputs={"window": W})
    raise KeyError(case)


def suite_cases(suite: str, cfg: HarnessConfig) -> List[str]:
    if suite == "pollaczek":
        return ["initial_values", "degree_bounds", "determinant", "crosscheck", "gf_ode", "spotcheck"]
    if suite == "cocycle":
        return ["tau_negation", "cocycle_identity", "leibniz", "confluence", "cocycle_form"]
    if suite == "jacobi":
        return ["skew", "jacobi"]
    if suite in ("grading", "borel"):
        return [suite]
    if suite == "heisenberg":
        return ["relations", "image"]
    if suite == "twodim":
        return ["constraints", "degenerate_controls"]
    if suite == "realize":
        cases = ["finiteness"] + [f"relation:{X},{Y}" for X, Y in realization.ALL_PAIRS]
        cases += ["engine", "grading_invariant", "calibration"]
        if cfg.split_level:
            cases.append("calibration_split")
        return cases
    if suite == "calibrate":
        return ["calibration", "calibration_split"]
    if suite == "jk":
        return [f"typo:{f.name}" for f in jk.ALL_FLAGS] + ["engines_agree"]
    if suite == "jk-compare":
        return ["compare", "quotient_invariance"]
    raise ConfigError(f"unknown suite {suite!r}")


def run_case(task: Tuple[str, str, HarnessConfig]) -> dict:
    suite, case, cfg = task
    if suite == "pollaczek":
        return _pollaczek_case(cfg, case)
    if suite == "cocycle":
        return _cocycle_case(cfg, case)
    if suite in ("jacobi", "grading", "borel"):
        return _algebra_case(suite, cfg, case)
    if suite == "heisenberg":
        return _heisenberg_case(cfg, case)
    if suite == "twodim":
        return _twodim_case(cfg, case)
    if suite in ("realize", "calibrate"):
        return _realize_case(suite, cfg, case)
    if suite == "jk":
        return _jk_case(cfg, case)
    if suite == "jk-compare":
        return _jk_compare_case(cfg, case)
    raise ConfigError(f"unknown suite {suite!r}")


def _finish_jk(records: List[dict]) -> List[dict]:
    closing = [r["case"][5:] for r in records if r["case"].startswith("typo:") and r["got"]["closes"]]
    records.append(_record("some_configuration_closes", True, bool(closing), {},
                           "at least one typo configuration closes", {"closing": closing}))
    return records


_FINISHERS: Dict[str, Callable[[List[dict]], List[dict]]] = {"jk": _finish_jk}


# ---------------------------------------------------------------------------
# documents

@dataclass
class ReportDocument:
    suite: str
    config: dict
    cases: List[dict] = field(default_factory=list)

    @property
    def summary(self) -> dict:
        asserted = [c for c in self.cases if c["asserted"]]
        failed = [c["case"] for c in asserted if c["verdict"] != "pass"]
        return {"asserted": len(asserted), "passed": len(asserted) - len(failed), "failed": len(failed),
                "report_only": len(self.cases) - len(asserted), "failed_cases": failed}

    @property
    def ok(self) -> bool:
        return self.summary["failed"] == 0

    def to_json(self) -> dict:
        return {"tool": "elliptica", "version": __version__, "suite": self.suite, "config": self.config,
                "cases": self.cases, "summary": self.summary,
                "certificates": [c["case"] for c in self.cases if not c["asserted"]]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    def summary_line(self) -> str:
        s = self.summary
        return (f"SUMMARY suite={self.suite} asserted={s['asserted']} passed={s['passed']} "
                f"failed={s['failed']} report_only={s['report_only']} status={'ok' if self.ok else 'fail'}")


def run_suite(name: str, cfg: HarnessConfig, threads: Optional[int] = None,
              cases: Optional[Sequence[str]] = None) -> ReportDocument:
    """Run a suite (or ``all``); ``cases`` restricts to named cases of one suite."""
    if name != ALL and name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITES + (ALL,))}")
    suites = SUITES if name == ALL else (name,)
    tasks = []
    for s in suites:
        names = suite_cases(s, cfg)
        if cases is not None:
            unknown = [c for c in cases if c not in names]
            if unknown:
                raise ConfigError(f"unknown case(s) for {s}: {', '.join(unknown)}")
            names = [c for c in names if c in cases]
        tasks.extend((s, c, cfg) for c in names)
    width = resolve_threads(cfg) if threads is None else threads
    if width <= 1 or len(tasks) <= 1:
        results = [run_case(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=width) as pool:
            results = list(pool.map(run_case, tasks))
    doc = ReportDocument(name, cfg.to_json())
    for s in suites:
        recs = [r for (ts, _, _), r in zip(tasks, results) if ts == s]
        if s in _FINISHERS and cases is None:
            recs = _FINISHERS[s](recs)
        if name == ALL:
            recs = [dict(r, case=f"{s}/{r['case']}") for r in recs]
        doc.cases.extend(recs)
    return doc
