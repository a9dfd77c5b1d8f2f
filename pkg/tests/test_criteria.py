from helidiag.criteria import (INDETERMINATE, NOT_SATISFIED, SATISFIED, criteria_evaluator,
                               render_table)


def verdict(summary, theorem, clause):
    return next(v for v in criteria_evaluator(summary)
                if v.theorem == theorem and v.clause == clause)


def besov(s, p, time, cls):
    return {"besov": {"s": s, "p": p, "time": time, "class": cls}}


def test_worked_example_equality_case():
    s = {"dim": 3, "v": besov(1 / 3, 3, 3, "cN"), "omega": besov(1 / 3, 3, 3, "inf")}
    v = verdict(s, "incompressible", 1)
    assert v.verdict == SATISFIED
    assert any("2/3 + 1/3 = 1" in line for line in v.arithmetic)
    # the same numbers with the cN label on omega instead satisfy clause 2 only
    assert verdict(s, "incompressible", 2).verdict == NOT_SATISFIED


def test_equality_needs_cN():
    s = {"dim": 3, "v": besov(1 / 3, 3, 3, "inf"), "omega": besov(1 / 3, 3, 3, "inf")}
    assert verdict(s, "incompressible", 1).verdict == NOT_SATISFIED
    s["v"] = besov(0.4, 3, 3, "inf")  # strict slack makes the class irrelevant
    assert verdict(s, "incompressible", 1).verdict == SATISFIED


def test_fraction_strings_and_aliases():
    s = {"dim": 3, "v": besov("1/3", "3", "3", "decaying"), "omega": besov("1/3", 3, 3, "flat")}
    assert verdict(s, "incompressible", 1).verdict == SATISFIED


def test_corollaries():
    s = {"dim": 3, "omega": {"lebesgue": [{"q": 9 / 4, "time": 3}]}}
    assert verdict(s, "corollary", 1).verdict == SATISFIED
    s2 = {"dim": 3, "omega": {"lebesgue": [{"q": 2, "time": 3}]}}
    assert verdict(s2, "corollary", 1).verdict == NOT_SATISFIED
    s3 = {"dim": 2, "omega": {"lebesgue": [{"q": 3, "time": 3}]}}
    assert verdict(s3, "corollary", 1).verdict == NOT_SATISFIED
    s4 = {"dim": 3, "curl_omega": {"lebesgue": [{"q": 9 / 7, "time": 3}]}}
    assert verdict(s4, "corollary", 2).verdict == SATISFIED


def test_lebesgue_pairs():
    s = {"dim": 3, "v": {"lebesgue": [{"q": 3, "time": 3}]},
         "omega": {"lebesgue": [{"q": 3, "time": 3}]}}
    assert verdict(s, "incompressible", 4).verdict == SATISFIED
    s["v"] = {"lebesgue": [{"q": 2.5, "time": 3}]}
    assert verdict(s, "incompressible", 4).verdict == NOT_SATISFIED


def test_compressible_needs_standing_hypotheses():
    base = {"dim": 3, "omega": {"lebesgue": [{"q": 3, "time": 3}]}}
    assert verdict(base, "compressible", 2).verdict == INDETERMINATE
    full = dict(base, density_bounds=[0.5, 2.0], rho=besov(1 / 3, 3, 3, "cN"),
                rho_v=besov(1 / 3, 3, 3, "inf"), v=besov(1 / 3, 3, 3, "cN"))
    assert verdict(full, "compressible", 2).verdict == SATISFIED
    full["density_bounds"] = [0.0, 2.0]
    assert verdict(full, "compressible", 2).verdict == NOT_SATISFIED


def test_sqg_clause():
    s = {"grad_theta": besov(1 / 3, 1.5, 3, "cN")}
    assert verdict(s, "sqg", 1).verdict == SATISFIED
    s = {"grad_theta": besov(1 / 3, 1.5, 3, "inf")}
    assert verdict(s, "sqg", 1).verdict == NOT_SATISFIED


def test_empty_summary_and_table():
    out = criteria_evaluator({})
    assert len(out) == 12 and all(v.verdict == INDETERMINATE for v in out)
    assert all(v.reasons for v in out)
    table = render_table(out)
    assert table.count(INDETERMINATE) >= 12
    assert criteria_evaluator(None)[0].to_dict()["verdict"] == INDETERMINATE
