"""Hypothesis arithmetic for the helicity conservation criteria.

The evaluator takes a regularity summary of measured exponents and checks
each sufficient condition clause by clause.  It never claims a proof: a
``SATISFIED`` verdict only says the measured numbers meet the stated
exponent relations.

Summary layout (every key optional)::

    {
      "dim": 3,
      "density_bounds": [c1, c2],
      "v":     {"besov": {"s": 1/3, "p": 3, "time": 3, "class": "cN"},
                "lebesgue": [{"q": 3, "time": 3}]},
      "omega": {...}, "curl_omega": {...}, "div_v": {...},
      "rho": {...}, "rho_v": {...}, "grad_theta": {...},
    }

``besov`` may also be a list of such blocks.  ``class`` is ``cN`` or
``inf`` (trend verdicts ``decaying`` / ``flat`` are accepted as aliases).
``time`` is the time integrability exponent; a single snapshot is a
constant-in-time field and may be entered as ``"inf"``.

On the torus over a finite time interval every integrability exponent may
be lowered, and a Besov smoothness index may be lowered; lowering it
strictly turns an ``inf``-type bound into a ``cN``-type one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

SATISFIED = "SATISFIED"
NOT_SATISFIED = "NOT SATISFIED"
INDETERMINATE = "INDETERMINATE"

TOL = 1e-9

CLASS_ALIASES = {"cn": "cN", "c(n)": "cN", "decaying": "cN", "vanishing": "cN",
                 "inf": "inf", "infinity": "inf", "infinity_type": "inf", "flat": "inf"}

QUANTITIES = ("v", "omega", "curl_omega", "div_v", "rho", "rho_v", "grad_theta")


@dataclass
class ClauseVerdict:
    theorem: str
    clause: int
    statement: str
    verdict: str
    arithmetic: list = field(default_factory=list)
    reasons: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"theorem": self.theorem, "clause": self.clause, "statement": self.statement,
                "verdict": self.verdict, "arithmetic": list(self.arithmetic),
                "reasons": list(self.reasons)}


class _Missing(Exception):
    pass


def fmt(x) -> str:
    """Short exact-looking rendering: ``1/3`` rather than ``0.3333333333``."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    fr = Fraction(x).limit_denominator(64)
    if abs(float(fr) - x) <= TOL:
        return str(fr)
    return f"{x:.6g}"


def _num(x, what: str) -> float:
    if x is None:
        raise _Missing(f"{what} not given")
    if isinstance(x, str):
        x = x.strip().lower()
        if x in ("inf", "infinity", "+inf"):
            return math.inf
    try:
        val = float(Fraction(x)) if isinstance(x, str) and "/" in x else float(x)
    except (TypeError, ValueError):
        raise _Missing(f"{what} = {x!r} is not a number")
    if math.isnan(val):
        raise _Missing(f"{what} is NaN")
    return val


def _inv(x: float) -> float:
    return 0.0 if math.isinf(x) else 1.0 / x


def _besov_blocks(summary: dict, name: str) -> list[dict]:
    q = summary.get(name)
    if not q or "besov" not in q:
        raise _Missing(f"no Besov measurement for {name}")
    b = q["besov"]
    blocks = b if isinstance(b, list) else [b]
    out = []
    for blk in blocks:
        cls = CLASS_ALIASES.get(str(blk.get("class", "")).lower())
        if cls is None:
            raise _Missing(f"{name}: unknown Besov class {blk.get('class')!r}")
        out.append({"s": _num(blk.get("s"), f"{name} Besov s"),
                    "p": _num(blk.get("p"), f"{name} Besov p"),
                    "time": _num(blk.get("time"), f"{name} time exponent"),
                    "class": cls})
    return out


def _lebesgue(summary: dict, name: str) -> list[dict]:
    q = summary.get(name)
    if not q or not q.get("lebesgue"):
        raise _Missing(f"no Lebesgue measurement for {name}")
    return [{"q": _num(e.get("q"), f"{name} space exponent"),
             "time": _num(e.get("time"), f"{name} time exponent")} for e in q["lebesgue"]]


def _dim(summary: dict) -> int:
    if "dim" not in summary:
        raise _Missing("dimension not given")
    return int(summary["dim"])


# --- single requirements ----------------------------------------------------

def _besov_member(summary, name, s, p, time, cls):
    """Does a measured Besov block of ``name`` embed in ``L^time B^s_{p,cls}``?"""
    lines, best = [], False
    for m in _besov_blocks(summary, name):
        ok_t = m["time"] >= time - TOL
        ok_p = m["p"] >= p - TOL
        if m["s"] > s + TOL:
            ok_s, why = True, f"{fmt(m['s'])} > {fmt(s)}"
        elif m["s"] >= s - TOL:
            ok_s = cls == "inf" or m["class"] == "cN"
            why = f"{fmt(m['s'])} = {fmt(s)} with class {m['class']} (need {cls})"
        else:
            ok_s, why = False, f"{fmt(m['s'])} < {fmt(s)}"
        ok = ok_t and ok_p and ok_s
        lines.append(f"{name} in L^{fmt(m['time'])} B^{fmt(m['s'])}_{{{fmt(m['p'])},{m['class']}}}"
                     f" vs L^{fmt(time)} B^{fmt(s)}_{{{fmt(p)},{cls}}}: time {fmt(m['time'])}"
                     f" {'>=' if ok_t else '<'} {fmt(time)}, p {fmt(m['p'])} {'>=' if ok_p else '<'}"
                     f" {fmt(p)}, s {why} -> {'ok' if ok else 'fails'}")
        best = best or ok
    return best, lines


def _lebesgue_member(summary, name, q, time):
    lines, best = [], False
    for m in _lebesgue(summary, name):
        ok = m["time"] >= time - TOL and m["q"] >= q - TOL
        lines.append(f"{name} in L^{fmt(m['time'])} L^{fmt(m['q'])} vs L^{fmt(time)} L^{fmt(q)}"
                     f" -> {'ok' if ok else 'fails'}")
        best = best or ok
    return best, lines


def _dual_pair(a_meas: float, b_meas: float, weight: float, b_finite: bool, label: str):
    """Exists ``b <= b_meas`` (finite if required) with
    ``1/a_meas + weight/b <= 1``, i.e. a partner exponent of the form
    ``b/(b - weight)`` fits under ``a_meas``."""
    lhs = _inv(a_meas) + weight * _inv(b_meas)
    if math.isinf(b_meas) and b_finite:
        ok = _inv(a_meas) < 1 - TOL
        return ok, f"{label}: 1/{fmt(a_meas)} = {fmt(_inv(a_meas))} {'<' if ok else '>='} 1 (partner exponent may be any large finite value)"
    ok = lhs <= 1 + TOL
    return ok, f"{label}: 1/{fmt(a_meas)} + {fmt(weight)}/{fmt(b_meas)} = {fmt(lhs)} {'<=' if ok else '>'} 1"


# --- clause evaluation -------------------------------------------------------

def _run(theorem, clause, statement, check, summary) -> ClauseVerdict:
    cv = ClauseVerdict(theorem, clause, statement, INDETERMINATE)
    try:
        ok = check(summary, cv.arithmetic)
    except _Missing as exc:
        cv.reasons.append(str(exc))
        return cv
    cv.verdict = SATISFIED if ok else NOT_SATISFIED
    return cv


def _incomp_besov(summary, lines, rough):
    """Clauses (1)/(2): ``rough`` is the quantity that must carry ``cN``."""
    vb, wb = _besov_blocks(summary, "v"), _besov_blocks(summary, "omega")
    found = False
    for v in vb:
        for w in wb:
            k, l, p, q = v["time"], w["time"], v["p"], w["p"]
            a, b = v["s"], w["s"]
            t = 2 * _inv(k) + _inv(l)
            sp = 2 * _inv(p) + _inv(q)
            slack = 2 * a + b - 1
            ok_t, ok_p = t <= 1 + TOL, sp <= 1 + TOL
            lines.append(f"2/k + 1/l = 2/{fmt(k)} + 1/{fmt(l)} = {fmt(t)} {'<=' if ok_t else '>'} 1")
            lines.append(f"2/p + 1/q = 2/{fmt(p)} + 1/{fmt(q)} = {fmt(sp)} {'<=' if ok_p else '>'} 1")
            lines.append(f"2*alpha + beta - 1 = 2*{fmt(a)} + {fmt(b)} - 1 = {fmt(slack)}")
            need = v if rough == "v" else w
            if slack > TOL:
                ok_s = True
                lines.append("strict slack: the cN class follows by lowering an index")
            elif slack >= -TOL:
                ok_s = need["class"] == "cN"
                lines.append(f"equality case needs {rough} of class cN; measured {need['class']}")
            else:
                ok_s = False
            if ok_t and ok_p and ok_s:
                found = True
    return found


def _incomp_3(summary, lines):
    d = _dim(summary)
    p = 3 * d / (d + 2)
    lines.append(f"3d/(d+2) = {fmt(p)} for d = {d}")
    ok, ls = _besov_member(summary, "omega", 1 / 3, p, 3, "cN")
    lines.extend(ls)
    return ok


def _incomp_4(summary, lines):
    # v in L^{p/(p-2)} L^{q/(q-2)}, omega in L^p L^q with 2 < p, q < inf.
    return _pq_clause(summary, lines, "omega")


def _pq_clause(summary, lines, name):
    found = False
    for a in _lebesgue(summary, "v"):
        for b in _lebesgue(summary, name):
            if not (b["time"] > 2 + TOL and b["q"] > 2 + TOL):
                lines.append(f"{name} exponents must exceed 2; measured time {fmt(b['time'])},"
                             f" space {fmt(b['q'])}")
                continue
            ok_t, lt = _dual_pair(a["time"], b["time"], 2, True, "time")
            ok_x, lx = _dual_pair(a["q"], b["q"], 2, True, "space")
            lines.extend([f"v L^{fmt(a['time'])} L^{fmt(a['q'])}, "
                          f"{name} L^{fmt(b['time'])} L^{fmt(b['q'])}", lt, lx])
            found = found or (ok_t and ok_x)
    return found


def _incomp_5(summary, lines):
    # v in L^{2p/(p-1)} L^{2q/(q-1)}, curl omega in L^p L^q, 1 <= p <= inf, 1 <= q < inf.
    found = False
    for a in _lebesgue(summary, "v"):
        for b in _lebesgue(summary, "curl_omega"):
            if b["time"] < 1 - TOL or b["q"] < 1 - TOL:
                lines.append("curl omega exponents must be at least 1")
                continue
            lt = _inv(b["time"]) + 2 * _inv(a["time"])
            ok_t = lt <= 1 + TOL
            # 2q/(q-1) <= B  <=>  1/q + 2/B <= 1, with q finite.
            lx_val = _inv(b["q"]) + 2 * _inv(a["q"])
            if math.isinf(b["q"]):
                ok_x = 2 * _inv(a["q"]) < 1 - TOL
                lx = f"space: 2/{fmt(a['q'])} = {fmt(2 * _inv(a['q']))} {'<' if ok_x else '>='} 1 (q may be any large finite value)"
            else:
                ok_x = lx_val <= 1 + TOL
                lx = f"space: 1/{fmt(b['q'])} + 2/{fmt(a['q'])} = {fmt(lx_val)} {'<=' if ok_x else '>'} 1"
            lines.extend([f"v L^{fmt(a['time'])} L^{fmt(a['q'])}, curl omega "
                          f"L^{fmt(b['time'])} L^{fmt(b['q'])}",
                          f"time: 1/{fmt(b['time'])} + 2/{fmt(a['time'])} = {fmt(lt)} {'<=' if ok_t else '>'} 1",
                          lx])
            found = found or (ok_t and ok_x)
    return found


def _need_dim3(summary, lines):
    d = _dim(summary)
    lines.append(f"d = {d} {'=' if d == 3 else '!='} 3")
    return d == 3


def _coro_1(summary, lines):
    if not _need_dim3(summary, lines):
        return False
    ok, ls = _lebesgue_member(summary, "omega", 9 / 4, 3)
    lines.extend(ls)
    return ok


def _coro_2(summary, lines):
    if not _need_dim3(summary, lines):
        return False
    ok, ls = _lebesgue_member(summary, "curl_omega", 9 / 7, 3)
    lines.extend(ls)
    return ok


def _standing_compressible(summary, lines):
    b = summary.get("density_bounds")
    if not b or len(b) != 2:
        raise _Missing("density bounds c1, c2 not given")
    c1, c2 = _num(b[0], "c1"), _num(b[1], "c2")
    ok = 0 < c1 <= c2 < math.inf
    lines.append(f"0 < c1 = {fmt(c1)} <= c2 = {fmt(c2)} < inf -> {'ok' if ok else 'fails'}")
    for name, cls in (("rho", "cN"), ("rho_v", "inf"), ("v", "cN")):
        m, ls = _besov_member(summary, name, 1 / 3, 3, 3, cls)
        lines.extend(ls)
        ok = ok and m
    lines.append("pi in C^2[c1, c2]: power law with c1 > 0, assumed")
    return ok


def _with_standing(clause):
    def check(summary, lines):
        # Evaluate both parts so missing data in either is reported.
        errors, results = [], []
        for part in (_standing_compressible, clause):
            try:
                results.append(part(summary, lines))
            except _Missing as exc:
                errors.append(str(exc))
        if any(r is False for r in results):
            return False
        if errors:
            raise _Missing("; ".join(errors))
        return True
    return check


def _comp_1(summary, lines):
    ok, ls = _besov_member(summary, "omega", 1 / 3, 3, 3, "inf")
    lines.extend(ls)
    return ok


def _comp_2(summary, lines):
    ok, ls = _lebesgue_member(summary, "omega", 3, 3)
    lines.extend(ls)
    return ok


def _comp_4(summary, lines):
    if not _need_dim3(summary, lines):
        return False
    ok1, l1 = _lebesgue_member(summary, "div_v", 9 / 4, 3)
    ok2, l2 = _lebesgue_member(summary, "omega", 9 / 4, 3)
    lines.extend(l1 + l2)
    return ok1 and ok2


def _sqg(summary, lines):
    ok, ls = _besov_member(summary, "grad_theta", 1 / 3, 1.5, 3, "cN")
    lines.extend(ls)
    return ok


CLAUSES = [
    ("incompressible", 1, "v in L^k B^alpha_{p,cN}, omega in L^l B^beta_{q,inf}, "
     "2/k+1/l=1, 2/p+1/q=1, 2 alpha+beta>=1", lambda s, l: _incomp_besov(s, l, "v")),
    ("incompressible", 2, "v in L^k B^alpha_{p,inf}, omega in L^l B^beta_{q,cN}, "
     "2/k+1/l=1, 2/p+1/q=1, 2 alpha+beta>=1", lambda s, l: _incomp_besov(s, l, "omega")),
    ("incompressible", 3, "omega in L^3 B^{1/3}_{3d/(d+2),cN}", _incomp_3),
    ("incompressible", 4, "v in L^{p/(p-2)} L^{q/(q-2)}, omega in L^p L^q, 2<p,q<inf", _incomp_4),
    ("incompressible", 5, "v in L^{2p/(p-1)} L^{2q/(q-1)}, curl omega in L^p L^q, "
     "1<=p<=inf, 1<=q<inf", _incomp_5),
    ("corollary", 1, "d=3, omega in L^3 L^{9/4}", _coro_1),
    ("corollary", 2, "d=3, curl omega in L^3 L^{9/7}", _coro_2),
    ("compressible", 1, "standing hypotheses and omega in L^3 B^{1/3}_{3,inf}",
     _with_standing(_comp_1)),
    ("compressible", 2, "standing hypotheses and omega in L^3 L^3", _with_standing(_comp_2)),
    ("compressible", 3, "standing hypotheses and v in L^{p/(p-2)} L^{q/(q-2)}, "
     "omega in L^p L^q, 2<p,q<inf", _with_standing(lambda s, l: _pq_clause(s, l, "omega"))),
    ("compressible", 4, "standing hypotheses and d=3, div v, omega in L^3 L^{9/4}",
     _with_standing(_comp_4)),
    ("sqg", 1, "grad theta in L^3 B^{1/3}_{3/2,cN}", _sqg),
]

ASSUMED = {
    "incompressible": "omega in C([0,T]; L^{2d/(d+1)}) has no discrete analog; assumed",
    "corollary": "omega in C([0,T]; L^{3/2}) assumed",
    "compressible": "div v, curl v in C([0,T]; L^{2d/(d+1)}) assumed",
    "sqg": "grad theta in C([0,T]; L^{4/3}) assumed",
}


def criteria_evaluator(measured: dict | None) -> list[ClauseVerdict]:
    """Check every clause against a regularity summary; see the module docstring."""
    summary = dict(measured or {})
    out = []
    for theorem, clause, statement, check in CLAUSES:
        cv = _run(theorem, clause, statement, check, summary)
        cv.reasons.append(ASSUMED[theorem])
        out.append(cv)
    return out


def render_table(verdicts) -> str:
    """Plain-text summary, one clause per line followed by its arithmetic."""
    rows = [f"{'theorem':<15} {'clause':>6}  {'verdict':<14} statement"]
    for v in verdicts:
        rows.append(f"{v.theorem:<15} {v.clause:>6}  {v.verdict:<14} {v.statement}")
        for line in v.arithmetic:
            rows.append(f"{'':<24}| {line}")
        for r in v.reasons:
            rows.append(f"{'':<24}* {r}")
    return "\n".join(rows) + "\n"
