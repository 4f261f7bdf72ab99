import json
import math

import numpy as np
import pytest

from conftest import e, span
from qlogic import subspace as sp
from qlogic.dbar import (
    CERTIFIED_NON_TAUTOLOGY, CERTIFIED_TAUTOLOGY, INCONCLUSIVE, STATISTICAL_TAUTOLOGY,
    WitnessError, alpha_conditions, alpha_witness, check_tautology, estimate_dbar, separate, witness_alpha,
    witness_alpha_chain, witness_alpha_odd, witness_beta, witness_gamma, witness_restrict, witness_separator,
)
from qlogic.formula import TOP, mk_alpha, mk_alpha_chain, mk_beta, mk_gamma, mk_P, mk_separator, parse, restrict
from qlogic.profile import (
    ALPHA_PROFILE, CertificateError, Composition, FloorHalfPower, PointTable, ProfileLookupError, Stage,
    beta_profile, gamma_profile, profile_eval,
)
from qlogic.valuation import Environment, evaluate


class TestProfiles:
    def test_floor_half(self):
        assert profile_eval(FloorHalfPower(1), 5) == 2

    def test_composition(self):
        assert profile_eval(Composition((FloorHalfPower(1), FloorHalfPower(1))), 8) == 2

    def test_composition_order(self):
        p = Composition((beta_profile(1), FloorHalfPower(1)))
        # floor-half first: 5 -> 2, then beta(1) table: 2 -> 1
        assert p(5) == 1

    def test_beta_table(self):
        assert profile_eval(beta_profile(2), 5) == 3
        assert profile_eval(beta_profile(2), 4) == 2

    def test_out_of_table(self):
        with pytest.raises(ProfileLookupError):
            profile_eval(beta_profile(2), 6)

    @pytest.mark.parametrize("l", [1, 2, 3, 4, 5, 8, 11])
    def test_gamma_reaches_one(self, l):
        assert gamma_profile(l)(2 * l) == gamma_profile(l)(2 * l + 1) == 1

    def test_gamma_values(self):
        assert gamma_profile(1) == FloorHalfPower(1)
        assert gamma_profile(2) == FloorHalfPower(2)
        assert gamma_profile(4) == FloorHalfPower(3)


class TestCertificate:
    def test_verify_good(self):
        for m, n in [(2, 3), (4, 5), (4, 8), (5, 7)]:
            mk_separator(m, n)[1].verify()

    def test_tampered_pair(self):
        _, cert = mk_separator(4, 5)
        bad = type(cert)(cert.m, cert.n, (Stage("beta", 2, (2, 4)),) + cert.stages[1:])
        with pytest.raises(CertificateError):
            bad.verify()

    def test_wrong_stage_kind(self):
        _, cert = mk_separator(2, 3)
        bad = type(cert)(2, 3, (Stage("alpha", None, (1, 1)),))
        with pytest.raises(CertificateError):
            bad.verify()

    def test_predict(self):
        _, cert = mk_separator(2, 3)
        assert cert.predict(2) == 0 and cert.predict(3) == 1

    def test_json(self):
        _, cert = mk_separator(2, 3)
        data = cert.to_json()
        assert [s["stage"] for s in data["stages"]] == ["beta(1)", "alpha"]
        assert data["claims"] == {"dbar_m": 0, "dbar_n": 1}


def _independent_conditions(s, t):
    # dim(S & T) from ranks; dim(S & ~T) = dim S - rank(P_T restricted to S)
    n = s.ambient
    meet = s.dim + t.dim - np.linalg.matrix_rank(np.vstack([s.basis, t.basis]), tol=1e-8)
    meet_perp = s.dim - np.linalg.matrix_rank(sp.projector(t) @ s.basis.T, tol=1e-8)
    return n % 2 == 0 and 2 * s.dim == n == 2 * t.dim and meet == 0 and meet_perp == 0


class TestAlphaWitness:
    def test_n2(self):
        w = witness_alpha(2)
        assert sp.equal(w.env["a"], span(2, e(2, 0)))
        assert sp.equal(w.env["b"], span(2, e(2, 0, 1)))
        assert w.achieved == 1 and w.verify()

    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    def test_even(self, n):
        w = witness_alpha(n)
        assert w.achieved == n // 2
        assert all(alpha_conditions(w.env["a"], w.env["b"]).values())
        assert _independent_conditions(w.env["a"], w.env["b"])
        # alpha(S, T) = P(T, S)
        p_ts = evaluate(mk_P("b", "a"), w.env)
        assert sp.projector_distance(w.value(), p_ts) < 1e-8

    def test_odd_rejected(self):
        with pytest.raises(ValueError):
            witness_alpha(3)

    @pytest.mark.parametrize("n, dim", [(3, 1), (5, 2), (7, 3)])
    def test_odd(self, n, dim):
        w = witness_alpha_odd(n)
        assert w.achieved == dim and w.verify()

    def test_odd_n3_coordinates(self):
        w = witness_alpha_odd(3)
        assert sp.equal(w.env["a"], span(3, e(3, 0)))
        assert sp.equal(w.env["b"], span(3, e(3, 0, 1)))

    def test_small(self):
        assert alpha_witness(1).achieved == 0
        assert alpha_witness(0).achieved == 0


class TestRestrictWitness:
    def test_top_beta(self):
        inner = witness_alpha(4)
        top = type(inner)(TOP, 4, Environment(4), 4, {})
        rec = witness_restrict(inner.formula, inner, TOP, top)
        assert rec.achieved == 2
        assert list(rec.env) == ["a", "b"]

    def test_alpha_alpha_n8(self):
        beta = witness_alpha(8, "c", "d")
        outer = witness_alpha(4)
        rec = witness_restrict(outer.formula, outer, beta.formula, beta)
        assert rec.achieved == 2 == 8 // 4
        assert rec.formula == restrict(mk_alpha("a", "b"), mk_alpha("c", "d"))

    def test_dimension_mismatch(self):
        with pytest.raises(WitnessError):
            witness_restrict(mk_alpha("a", "b"), witness_alpha(2), mk_alpha("c", "d"), witness_alpha(8, "c", "d"))

    def test_gamma_l2_n4(self):
        w = witness_gamma(2, 4)
        assert w.formula == mk_gamma(2)
        assert w.achieved == 1

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_chain(self, k):
        for n in range(1, 9):
            w = witness_alpha_chain(k, n)
            assert w.formula == mk_alpha_chain(k)
            assert w.achieved == n >> k and w.verify()


class TestBetaWitness:
    @pytest.mark.parametrize("l, n, dim", [(1, 2, 1), (1, 3, 2), (2, 4, 2), (2, 5, 3), (3, 6, 3), (3, 7, 4)])
    def test_attains(self, l, n, dim):
        w = witness_beta(l, n)
        assert w.formula == mk_beta(l)
        assert w.achieved == dim and w.verify()

    def test_bad_n(self):
        with pytest.raises(ValueError):
            witness_beta(2, 6)

    def test_equal_pair_kills_alpha_part(self, rng):
        # with S = T the alpha disjunct vanishes and beta sits inside beta-tilde
        s = sp.random_subspace(4, 2, rng)
        g = witness_gamma(2, 4)
        env = Environment(4, {"a": s, "b": s}).merged(g.env)
        val = evaluate(mk_beta(2), env)
        tilde = mk_beta(2).left
        assert evaluate(mk_alpha("a", "b"), env).dim == 0
        assert sp.contains(evaluate(tilde, env), val)


class TestEstimate:
    def test_excluded_middle(self):
        for n in (1, 3, 5):
            assert estimate_dbar(parse("a | !a"), n, 20).max_dim == n

    def test_alpha_c4(self):
        est = estimate_dbar(mk_alpha("a", "b"), 4, 2000, seed=1)
        assert est.max_dim == 2
        assert est.witness.verify()

    def test_deterministic(self):
        f = mk_alpha("a", "b")
        e1, e2 = estimate_dbar(f, 5, 200, seed=7), estimate_dbar(f, 5, 200, seed=7)
        assert e1.histogram == e2.histogram
        assert json.dumps(e1.witness.to_json()) == json.dumps(e2.witness.to_json())

    def test_variable_free(self):
        est = estimate_dbar(parse("bot"), 3, 5)
        assert est.max_dim == 0 and len(est.witness.env) == 0

    def test_strategies(self):
        f = mk_alpha("a", "b")
        assert estimate_dbar(f, 4, 10).strategy == "exhaustive"
        assert estimate_dbar(f, 8, 10).strategy == "uniform"
        assert estimate_dbar(mk_beta(1), 3, 10).strategy == "uniform"

    def test_separator_zero(self):
        phi, _ = mk_separator(2, 3)
        est = estimate_dbar(phi, 2, 2000, seed=3)
        assert est.max_dim == 0

    def test_witness_replays(self):
        est = estimate_dbar(mk_beta(1), 3, 300, seed=2)
        assert est.witness.verify()
        assert est.witness.trace["method"] == "random"


class TestTautology:
    def test_contradiction(self):
        for n in (1, 2, 3, 4):
            v = check_tautology(parse("a & !a"), n, PointTable({n: 0}), trials=100)
            assert v.kind == CERTIFIED_TAUTOLOGY

    def test_statistical(self):
        v = check_tautology(parse("a & !a"), 3, trials=50)
        assert v.kind == STATISTICAL_TAUTOLOGY

    def test_alpha_n2(self):
        w = witness_alpha(2)
        v = check_tautology(mk_alpha("a", "b"), 2, ALPHA_PROFILE, witness=w)
        assert v.kind == CERTIFIED_NON_TAUTOLOGY
        assert v.witness.achieved == 1

    def test_contradiction_reported(self):
        # a deliberately wrong profile must surface as inconclusive
        v = check_tautology(mk_alpha("a", "b"), 2, PointTable({2: 0}), witness=witness_alpha(2))
        assert v.kind == INCONCLUSIVE

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_alpha_chain(self, k):
        f = mk_alpha_chain(k)
        for n in range(1, 9):
            w = witness_alpha_chain(k, n)
            v = check_tautology(f, n, FloorHalfPower(k), trials=100, witness=w if w.achieved else None)
            assert v.is_tautology == (math.log2(n) < k)
            assert v.kind in (CERTIFIED_TAUTOLOGY, CERTIFIED_NON_TAUTOLOGY)


class TestSeparate:
    def test_2_3(self):
        rep = separate(2, 3, trials=2000)
        assert rep.witness.achieved == 1 and rep.zero_test.max_dim == 0
        assert len(rep.certificate.stages) == 2

    def test_prior_result_2_4(self):
        rep = separate(2, 4, trials=1000)
        assert [s.name for s in rep.certificate.stages] == ["alpha", "alpha"]
        assert rep.witness.achieved == 1

    @pytest.mark.parametrize("m, n", [(m, n) for n in range(2, 10) for m in range(1, n)])
    def test_witnesses(self, m, n):
        w = witness_separator(m, n)
        _, cert = mk_separator(m, n)
        assert w.achieved == cert.final_pair[1] >= 1
        assert w.verify()

    def test_json_replayable(self):
        a = json.dumps(separate(2, 3, trials=200, seed=5).to_json())
        b = json.dumps(separate(2, 3, trials=200, seed=5).to_json())
        assert a == b
