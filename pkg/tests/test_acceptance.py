"""Acceptance criteria 1 to 11, each timed against its runtime limit."""
from fractions import Fraction

from elliptica import fock, pollaczek, realization
from elliptica.fock import ModuleParams
from elliptica.harness import FH_PAIRS, SUITES, HarnessConfig, run_suite
from elliptica.realization import NILPOTENT_PAIRS
from elliptica.scalars import B, CoeffPoly

PRINTED = {
    0: (CoeffPoly.const(0), CoeffPoly.const(1)),
    1: (CoeffPoly.const(1), CoeffPoly.const(0)),
    2: ((B - 1) * Fraction(4, 5), CoeffPoly.const(Fraction(1, 5))),
    3: ((B * B * 32 - B * 48 + 11) * Fraction(1, 35), (B * 2 - 1) * Fraction(4, 35)),
}


def cases_by_name(doc):
    return {c["case"]: c for c in doc.cases}


def test_criterion_1_pollaczek_exactness(criterion):
    with criterion(1, 1):
        for k, (p, q) in PRINTED.items():
            got = pollaczek.pollaczek_pq(k)
            assert (got.p, got.q) == (p, q), k
        assert run_suite("pollaczek", HarnessConfig(), cases=["initial_values"]).ok


def test_criterion_2_two_dimensional_constraints(criterion):
    with criterion(2, 1):
        p2, p3 = pollaczek.pollaczek_pq(2), pollaczek.pollaczek_pq(3)
        assert p2.p * p3.q - p3.p * p2.q == CoeffPoly.const(Fraction(1, 35))
        v = fock.twodim_constraints()
        assert v.forces_zero and v.dimension == 0
        assert v.to_json()["verdict"] == "chi+ = chi- = 0"


def test_criterion_3_differential_oracle(criterion):
    with criterion(3, 30):
        doc = run_suite("cocycle", HarnessConfig(windows=(("cocycle", 4),)))
        got = cases_by_name(doc)
        for name in ("confluence", "leibniz", "tau_negation", "cocycle_identity"):
            assert got[name]["asserted"] and got[name]["verdict"] == "pass", name


def test_criterion_4_algebra_structure(criterion):
    with criterion(4, 300):
        cfg = HarnessConfig(windows=(("*", 4),))
        for suite in ("jacobi", "grading"):
            doc = run_suite(suite, cfg)
            assert doc.ok and doc.summary["asserted"] >= 1 and doc.summary["report_only"] == 0, suite
        printed = run_suite("jacobi", HarnessConfig(windows=(("*", 4),), constants_source="paper"))
        jac = cases_by_name(printed)["jacobi"]
        assert not jac["asserted"]
        # definitive verdict: either a clean pass or a failing triple
        assert jac["got"]["passed"] or len(jac["got"]["failure"]["triple"]) == 3


def test_criterion_5_heisenberg(criterion):
    with criterion(5, 120):
        cfg = HarnessConfig(windows=(("heisenberg", 8),), degrees=(("heisenberg", 3),), r=1,
                            heis_variant="original")
        doc = run_suite("heisenberg", cfg, cases=["relations"])
        assert doc.ok and doc.summary["asserted"] == 1


def test_criterion_6_realization_r1(criterion):
    with criterion(6, 600):
        cfg = HarnessConfig(r=1, windows=(("realize", 3),), degrees=(("realize", 2),))
        names = [f"relation:{X},{Y}" for X, Y in realization.ALL_PAIRS] + ["calibration"]
        doc = run_suite("realize", cfg, cases=names)
        got = cases_by_name(doc)
        assert len(realization.ALL_PAIRS) == 21
        failed = [n for n in names[:-1] if got[n]["verdict"] != "pass" or not got[n]["asserted"]]
        assert not failed, failed
        cal = got["calibration"]["got"]
        assert cal["consistent"] and cal["assignment"] == "chi0"


def test_criterion_7_realization_r0(criterion):
    with criterion(7, 600):
        orig = ModuleParams(r=0, heis_variant="original")
        witness = realization.analyze_finiteness(realization.build_theta("e", 0), orig)
        assert not witness.finite and witness.witness["term"] == "z^0 :beta alpha*:"
        mixed = ModuleParams(r=0, heis_variant="mixed")
        assert all(realization.analyze_finiteness(realization.build_theta(g, 0), mixed).finite
                   for g in realization.GENERATORS)

        cfg = HarnessConfig(r=0, heis_variant="mixed", windows=(("realize", 3),), degrees=(("realize", 2),))
        pairs = NILPOTENT_PAIRS + FH_PAIRS
        names = [f"relation:{X},{Y}" for X, Y in pairs] + ["calibration"]
        got = cases_by_name(run_suite("realize", cfg, cases=names))
        cal = got["calibration"]["got"]
        assert cal["consistent"] or cal["conflict"] is not None
        # the e-sector pairs leave a non-scalar residual for symbolic chi0; only chi0 = 4, level 0 closes
        failed = [n for n in names[:-1] if got[n]["verdict"] != "pass"]
        assert not failed, f"non-closing r = 0 relations: {failed}"


def test_criterion_8_jk_typo_sweep(criterion):
    with criterion(8, 300):
        cfg = HarnessConfig(windows=(("jk", 3),), degrees=(("jk", 2),))
        got = cases_by_name(run_suite("jk", cfg))
        closes = got["some_configuration_closes"]
        assert closes["verdict"] == "pass"
        assert closes["got"]["closing"] == ["uu_coeff=b,uu_shift=curve,phi_uu=curve"]
        assert len(cfg.phi) == 0 and len(got["typo:" + closes["got"]["closing"][0]]["inputs"]["phis"]) == 2


def test_criterion_9_jk_comparison(criterion):
    with criterion(9, 300):
        cfg = HarnessConfig(windows=(("jk-compare", 3),), degrees=(("jk-compare", 2),))
        doc = run_suite("jk-compare", cfg)
        assert doc.ok
        assert cases_by_name(doc)["compare"]["got"]["found"] == {"e": -1, "h": 1, "f": -1}


def test_criterion_10_mode_engine(criterion):
    with criterion(10, 300):
        for r in (1, 0):
            cfg = HarnessConfig(r=r, engine_cases=200, windows=(("realize", 3),))
            case = cases_by_name(run_suite("realize", cfg, cases=["engine"]))["engine"]
            assert case["verdict"] == "pass" and case["got"]["checked"] == 200, r


def test_criterion_11_determinism(criterion):
    with criterion(11):
        configs = [HarnessConfig(seed=3), HarnessConfig(seed=3, r=0)]
        for cfg in configs:
            for suite in SUITES:
                if cfg.r == 0 and suite not in ("realize", "calibrate"):
                    continue
                first = run_suite(suite, cfg, threads=1).dumps()
                assert run_suite(suite, cfg, threads=1).dumps() == first, suite
                assert run_suite(suite, cfg, threads=3).dumps() == first, suite
