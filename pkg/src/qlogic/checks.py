"""Randomized verification suites behind ``qlogic verify``.

Each suite returns a list of :class:`CheckResult`; a check passes only if
every trial in it passes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from . import subspace as sp
from .dbar import alpha_conditions, alpha_witness, estimate_dbar, witness_alpha, witness_alpha_chain, witness_beta
from .formula import mk_alpha, mk_alpha_chain, mk_beta, mk_P, nnf, parse, random_formula, to_text, variables
from .subspace import DEFAULT_TOL, Tolerance
from .valuation import Environment, check_restriction_lemma, evaluate

__all__ = ["CheckResult", "SUITES", "run_suite", "random_env", "sub_of"]

PROJ_ATOL = 1e-8


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    trials: int
    failures: int = 0
    detail: str = ""

    def to_json(self):
        return {
            "suite": self.suite,
            "check": self.name,
            "passed": self.passed,
            "trials": self.trials,
            "failures": self.failures,
            "detail": self.detail,
        }


def _rng(seed, *stream):
    return np.random.default_rng([seed, *stream])


def _rand(n, rng, dim=None):
    d = int(rng.integers(0, n + 1)) if dim is None else dim
    return sp.random_subspace(n, d, rng)


def sub_of(u: sp.Subspace, rng) -> sp.Subspace:
    """Random subspace contained in ``u``."""
    inner = sp.random_subspace(u.dim, int(rng.integers(0, u.dim + 1)), rng)
    return sp.pushforward(sp.isometry_onto(u), inner)


def random_env(names, n, rng) -> Environment:
    return Environment(n, [(v, _rand(n, rng)) for v in names])


def _tally(suite, name, trials, predicate) -> CheckResult:
    failures = 0
    first = ""
    for i in range(trials):
        ok = predicate(i)
        if not ok:
            failures += 1
            first = first or f"first failure at trial {i}"
    return CheckResult(suite, name, failures == 0, trials, failures, first)


def ortholattice_suite(trials=200, seed=0, tol: Tolerance = DEFAULT_TOL):
    n = 4
    eq = sp.equal
    S = "ortholattice"

    def pair(i):
        rng = _rng(seed, 1, i)
        return _rand(n, rng), _rand(n, rng)

    def modular(i):
        rng = _rng(seed, 2, i)
        u = _rand(n, rng)
        s = sub_of(u, rng)
        t = _rand(n, rng)
        lhs = sp.join(s, sp.meet(t, u, tol), tol)
        rhs = sp.meet(sp.join(s, t, tol), u, tol)
        return eq(lhs, rhs)

    def dim_formula(i):
        s, t = pair(i)
        return sp.join(s, t, tol).dim + sp.meet(s, t, tol).dim == s.dim + t.dim

    def meet_contained(i):
        s, t = pair(i)
        m = sp.meet(s, t, tol)
        return sp.contains(s, m) and sp.contains(t, m)

    return [
        _tally(S, "idempotent meet S&S=S", trials, lambda i: eq(sp.meet(pair(i)[0], pair(i)[0], tol), pair(i)[0])),
        _tally(S, "excluded middle S|~S=top", trials,
               lambda i: eq(sp.join(pair(i)[0], sp.complement(pair(i)[0]), tol), sp.top(n))),
        _tally(S, "contradiction S&~S=bot", trials,
               lambda i: sp.meet(pair(i)[0], sp.complement(pair(i)[0]), tol).dim == 0),
        _tally(S, "involution ~~S=S", trials, lambda i: eq(sp.complement(sp.complement(pair(i)[0])), pair(i)[0])),
        _tally(S, "De Morgan ~(S|T)=~S&~T", trials, lambda i: (lambda s, t: eq(
            sp.complement(sp.join(s, t, tol)), sp.meet(sp.complement(s), sp.complement(t), tol)))(*pair(i))),
        _tally(S, "modular law", trials, modular),
        _tally(S, "dimension formula", trials, dim_formula),
        _tally(S, "meet contained in both", trials, meet_contained),
    ]


def p_lemma_suite(trials=200, seed=0, tol: Tolerance = DEFAULT_TOL):
    n = 5
    S = "p-lemma"
    P_ab, P_ba = mk_P("a", "b"), mk_P("b", "a")

    def values(i):
        rng = _rng(seed, 3, i)
        s, t = _rand(n, rng), _rand(n, rng)
        env = Environment(n, {"a": s, "b": t})
        return s, t, evaluate(P_ab, env, tol), evaluate(P_ba, env, tol)

    def part1(i):
        s, t, pst, pts = values(i)
        return pst.dim == pts.dim <= min(s.dim, t.dim)

    def part2(i):
        s, t, pst, pts = values(i)
        st = sp.meet(s, t, tol)
        return all(sp.equal(x, st) for x in (sp.meet(s, pst, tol), sp.meet(t, pts, tol), sp.meet(pst, pts, tol)))

    def image(i):
        s, t, pst, _ = values(i)
        composed = sp.projector(t) @ sp.projector(s)
        return sp.equal(sp.from_spanning(composed.T, n, tol), pst)

    return [
        _tally(S, "dim P(S,T) = dim P(T,S) <= min dims", trials, part1),
        _tally(S, "S&P(S,T) = T&P(T,S) = P(S,T)&P(T,S) = S&T", trials, part2),
        _tally(S, "P(S,T) is the image of proj_T proj_S", trials, image),
    ]


def restriction_suite(trials=100, seed=0, tol: Tolerance = DEFAULT_TOL):
    n = 6
    beta = mk_alpha("v", "w")
    worst = 0.0

    def one(i):
        nonlocal worst
        pyrng = random.Random(seed * 1_000_003 + i)
        alpha = random_formula(pyrng, 10, ("a", "b", "c"))
        rng = _rng(seed, 4, i)
        env = random_env(variables(alpha) + ["v", "w"], n, rng)
        rep = check_restriction_lemma(alpha, beta, env, tol)
        worst = max(worst, rep.distance)
        return rep.holds

    res = _tally("restriction-lemma", "restricted formula = formula inside Xi(beta)", trials, one)
    return [CheckResult(res.suite, res.name, res.passed, res.trials, res.failures,
                        (res.detail + "; " if res.detail else "") + f"max projector distance {worst:.2e}")]


def alpha_lemma_suite(trials=2000, seed=0, tol: Tolerance = DEFAULT_TOL):
    S = "alpha-lemma"
    f = mk_alpha("a", "b")
    out = []
    attained = [alpha_witness(n).achieved == n // 2 for n in range(2, 9)]
    out.append(CheckResult(S, "witness attains n//2 for n=2..8", all(attained), 7, attained.count(False)))
    over = [estimate_dbar(f, n, trials, seed=seed, tol=tol).max_dim > n // 2 for n in range(2, 9)]
    out.append(CheckResult(S, "sampling never exceeds n//2 for n=2..8", not any(over), 7 * trials, sum(over)))

    def equivalence(i):
        n = (2, 4, 6)[i % 3]
        rng = _rng(seed, 5, i)
        h = n // 2
        if i % 2:
            s, t = _rand(n, rng, h), _rand(n, rng, h)
        else:
            s, t = _rand(n, rng), _rand(n, rng)
        val = evaluate(f, Environment(n, {"a": s, "b": t}), tol)
        conds = all(alpha_conditions(s, t, tol).values())
        return (val.dim == h) == conds

    out.append(_tally(S, "dim n/2 iff the four conditions (sampled pairs)", 300, equivalence))

    def constructed(n):
        w = witness_alpha(n)
        s, t = w.env["a"], w.env["b"]
        p_ts = evaluate(mk_P("b", "a"), w.env, tol)
        return (all(alpha_conditions(s, t, tol).values()) and w.achieved == n // 2
                and sp.projector_distance(w.value(tol), p_ts) < PROJ_ATOL)

    ok = [constructed(n) for n in (2, 4, 6)]
    out.append(CheckResult(S, "constructed witnesses satisfy conditions and alpha=P(T,S)", all(ok), 3, ok.count(False)))

    chain = mk_alpha_chain(2)
    comp = []
    for n in range(4, 9):
        w = witness_alpha_chain(2, n)
        est = estimate_dbar(chain, n, trials, seed=seed, tol=tol)
        comp.append(w.achieved == n // 4 and w.verify(tol) and est.max_dim <= n // 4)
    out.append(CheckResult(S, "alpha|alpha reaches exactly n//4 for n=4..8", all(comp), 5, comp.count(False)))
    return out


def beta_lemma_suite(trials=10000, seed=0, tol: Tolerance = DEFAULT_TOL):
    S = "beta-lemma"
    out = []
    for l in (1, 2, 3):
        lo, hi = witness_beta(l, 2 * l, tol=tol), witness_beta(l, 2 * l + 1, tol=tol)
        ok = lo.achieved == l and hi.achieved == l + 1 and lo.verify(tol) and hi.verify(tol)
        out.append(CheckResult(S, f"beta({l}) witnesses reach {l} and {l + 1}", ok, 2, 0 if ok else 1))
        est = estimate_dbar(mk_beta(l), 2 * l, trials, seed=seed, tol=tol)
        out.append(CheckResult(S, f"beta({l}) sampling in C^{2 * l} never exceeds {l}", est.max_dim <= l, trials,
                               0 if est.max_dim <= l else 1, f"max seen {est.max_dim}"))
    return out


def formula_suite(trials=200, seed=0, tol: Tolerance = DEFAULT_TOL):
    S = "formula"
    n = 4

    def roundtrip(i):
        f = random_formula(random.Random(seed * 7919 + i), 12)
        return parse(to_text(f)) == f

    def nnf_sound(i):
        f = random_formula(random.Random(seed * 7919 + i), 12)
        env = random_env(["a", "b", "c", "d"], n, _rng(seed, 6, i))
        return sp.projector_distance(evaluate(f, env, tol), evaluate(nnf(f), env, tol)) < PROJ_ATOL

    return [
        _tally(S, "parse(print(f)) = f", trials, roundtrip),
        _tally(S, "nnf preserves valuation", trials, nnf_sound),
    ]


SUITES = {
    "ortholattice": lambda trials, seed, tol: ortholattice_suite(200, seed, tol),
    "formula": lambda trials, seed, tol: formula_suite(200, seed, tol),
    "p-lemma": lambda trials, seed, tol: p_lemma_suite(200, seed, tol),
    "restriction-lemma": lambda trials, seed, tol: restriction_suite(100, seed, tol),
    "alpha-lemma": lambda trials, seed, tol: alpha_lemma_suite(min(trials, 2000), seed, tol),
    "beta-lemma": lambda trials, seed, tol: beta_lemma_suite(trials, seed, tol),
}


def run_suite(name: str, trials: int = 10000, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> list[CheckResult]:
    if name == "all":
        return [r for key in SUITES for r in SUITES[key](trials, seed, tol)]
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    return SUITES[name](trials, seed, tol)
