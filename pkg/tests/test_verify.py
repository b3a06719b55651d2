import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orlicz_approx import Grid, OrliczContext, PeriodicFunction, Weight, YoungFunction
from orlicz_approx.errors import BadOrder, ConfigError, HypothesisViolated
from orlicz_approx.verify import (SLOPE_TOL, SuiteConfig, Workspace, check_bernstein, check_geo_mean,
                                  check_jackson, check_littlewood_paley, check_marchaud,
                                  check_multiplier_boundedness, check_realization,
                                  check_refined_jackson, check_rubio_modular,
                                  check_second_jackson, check_transference, closed_form_selfcheck,
                                  default_contexts, default_corpus, geometric_means, load_config,
                                  make_function, parse_phi, parse_weight, refined_sums,
                                  reports_json, run_suite, standard_multipliers, trend,
                                  write_reports)


@pytest.fixture(scope="module")
def g4():
    return Grid(4096)


@pytest.fixture(scope="module")
def ctx4(g4):
    return OrliczContext(YoungFunction.power(2), Weight.constant(g4))


# -- trend rule ----------------------------------------------------------------


@given(st.floats(0.01, 100), st.floats(-2, 2))
def test_trend_recovers_power_law(c, a):
    ns = np.arange(1, 129)
    lhs = c * ns ** a
    _, mx, slope = trend(ns, lhs, np.ones_like(lhs))
    assert slope == pytest.approx(a, abs=1e-9)
    assert mx == pytest.approx(np.max(lhs))


def test_trend_vanishing_rows():
    ns = np.arange(1, 9)
    lhs = np.array([1.0, 0.5, 0, 0, 0, 0, 0, 0])
    ratio, mx, slope = trend(ns, lhs, np.ones(8))
    assert slope == -math.inf and mx == 1.0 and np.all(ratio[2:] == 0)


def test_trend_zero_rhs_is_infinite():
    _, mx, _ = trend([1, 2, 3], [1.0, 1.0, 1.0], [1.0, 0.0, 1.0])
    assert mx == math.inf


# -- sequence arithmetic ----------------------------------------------------------


def test_geometric_mean_of_halving_sequence():
    n = np.arange(1, 61)
    gm = geometric_means(2.0 ** -n)
    np.testing.assert_allclose(gm, 2.0 ** (-(n + 1) / 2), rtol=1e-12, atol=0)


def test_geometric_mean_zero_absorbs():
    assert np.all(geometric_means([1.0, 0.0, 0.5])[1:] == 0)


@given(st.lists(st.floats(1e-6, 10), min_size=1, max_size=40), st.floats(0.5, 2.0), st.sampled_from([2.0, 2.5, 3.0]))
def test_refined_sum_single_term_lower_bound(E, k, beta):
    E = np.array(E)
    lhs = refined_sums(E, k, beta)
    n = np.arange(1, len(E) + 1, dtype=float)
    last = (n ** (2 * beta * k - 1) * E ** beta) ** (1 / beta) / n ** (2 * k)
    assert np.all(lhs >= last * (1 - 1e-12))


# -- individual checks -------------------------------------------------------------


def test_jackson_polynomial_vanishes(ctx4, g4):
    f = make_function("cos:3", g4).f
    rep = check_jackson(ctx4, f, 1, 32)
    assert all(r[1] < 1e-12 for r in rep.rows[2:])
    assert rep.passed


def test_jackson_hilbert_case_with_parseval(ctx4, g4):
    f = make_function("abs-sin-pow:1.5", g4).f
    rep = check_jackson(ctx4, f, 1, 128)
    c = f.coeffs()
    tails = np.sqrt(math.pi * np.cumsum((c.a ** 2 + c.b ** 2)[::-1])[::-1])
    np.testing.assert_allclose([r[1] for r in rep.rows], tails[2:130], rtol=1e-10)
    assert rep.passed and rep.slope <= SLOPE_TOL


def test_jackson_order_zero(ctx4, g4):
    f = make_function("sawtooth", g4).f
    rep = check_jackson(ctx4, f, 0, 64)
    assert all(r[2] == rep.rows[0][2] for r in rep.rows) and rep.max_ratio <= 1 + 1e-12


def test_second_jackson(ctx4, g4):
    f = make_function("cos:3", g4).f
    rep = check_second_jackson(ctx4, f, 1, 2, 64)
    assert math.isfinite(rep.max_ratio)
    zero = check_second_jackson(ctx4, f, 1, 0, 32)
    assert zero.max_ratio == check_jackson(ctx4, f, 1, 32).max_ratio
    smooth = check_second_jackson(ctx4, make_function("random-analytic", g4).f, 1, 1, 128)
    assert smooth.passed


def test_geo_mean_cases(ctx4, g4):
    rep = check_geo_mean(ctx4, make_function("cos:1", g4).f, 1, 32)
    assert all(r[1] == 0 for r in rep.rows)
    assert check_geo_mean(ctx4, make_function("random-analytic", g4).f, 1, 128).passed


@pytest.mark.parametrize("a", [1.0, 2.0, 3.0])
def test_geometric_mean_of_power_law_follows_stirling(a):
    # (prod j^-a)^(1/n) = (n!)^(-a/n): the ratio to n^-a climbs to e^a like (2 pi n)^(-a/2n),
    # a log-log slope of about 0.113 a over n = 1..128 with no growth in the limit
    n = np.arange(1, 129, dtype=float)
    r = geometric_means(n ** -a) * n ** a
    stirling = np.exp(a) * (2 * np.pi * n) ** (-a / (2 * n))
    np.testing.assert_allclose(r[20:], stirling[20:], rtol=1e-2 * a)
    _, mx, slope = trend(n, geometric_means(n ** -a), n ** -a)
    assert mx < np.exp(a) and slope == pytest.approx(0.1133 * a, abs=1e-3)


def test_refined_cases(ctx4, g4):
    rep = check_refined_jackson(ctx4, PeriodicFunction.constant(g4, 2.0), 1, 16)
    assert all(r[1] == 0 for r in rep.rows)
    assert check_refined_jackson(ctx4, make_function("abs-sin-pow:1.5", g4).f, 1, 128).passed
    assert rep.notes["beta"] == 2.0


def test_marchaud_cases(ctx4, g4):
    rep = check_marchaud(ctx4, PeriodicFunction.constant(g4, 1.0), 1, 2)
    assert all(r[1] == 0 and r[2] == 0 for r in rep.rows)
    rep = check_marchaud(ctx4, make_function("cos:1", g4).f, 0.5, 1)
    assert math.isfinite(rep.max_ratio)
    with pytest.raises(BadOrder):
        check_marchaud(ctx4, make_function("cos:1", g4).f, 2, 1)


def test_realization_k_below_r(ctx4, g4):
    rep = check_realization(ctx4, make_function("sawtooth", g4).f, 1, 64)
    assert rep.notes["k_le_r"]
    assert math.isfinite(rep.max_ratio)


def test_bernstein_flat_in_degree(ctx4):
    rep = check_bernstein(ctx4, 1, degrees=(4, 8, 16), per_degree=4)
    ratios = np.array([r[3] for r in rep.rows])
    assert np.all((ratios > 0.01) & (ratios < 100))
    assert rep.passed


def test_multiplier_and_lp(ctx4, g4):
    corpus = default_corpus(g4)
    lams = standard_multipliers(g4.jmax)
    for name, lam in lams.items():
        rep = check_multiplier_boundedness(ctx4, lam, corpus, name)
        assert rep.passed, name
    ones = check_multiplier_boundedness(ctx4, lams["ones"], corpus, "ones")
    assert max(r[1] for r in ones.rows) <= 1 + 1e-12  # S_jmax is a contraction in L^2
    rep = check_littlewood_paley(ctx4, corpus)
    assert rep.passed


def test_lp_single_block_exact(g4):
    ctx = OrliczContext(YoungFunction.power(3), Weight.power(g4, 0.4))
    entry = make_function("cos:5", g4)
    rep = check_littlewood_paley(ctx, [entry], lmax=6)
    assert rep.rows[0][1] == pytest.approx(1.0, abs=1e-10)
    assert rep.rows[0][2] == pytest.approx(1.0, abs=1e-10)


def test_lp_two_blocks_closed_form(ctx4, g4):
    rep = check_littlewood_paley(ctx4, [make_function("cos:1", g4)], lmax=6)
    assert rep.passed
    f = PeriodicFunction(g4, np.cos(g4.nodes) + np.cos(8 * g4.nodes))
    from orlicz_approx.operators import square_function
    sq = square_function(f, 6).samples
    np.testing.assert_allclose(sq, np.sqrt(np.cos(g4.nodes) ** 2 + np.cos(8 * g4.nodes) ** 2), atol=1e-12)


def test_rubio_modular_cases(ctx4, g4):
    zero = check_rubio_modular(ctx4, PeriodicFunction.constant(g4, 0.0))
    assert zero.passed and zero.max_ratio == 0
    one = check_rubio_modular(ctx4, PeriodicFunction.constant(g4, 1.0))
    # R1 = c / (1 - q) = 6/7 for a0 = 2; phi~ = y^2/4 so the ratio is (6/7)^2
    assert one.max_ratio == pytest.approx((6 / 7) ** 2, rel=1e-10)
    assert one.passed


def test_transference_cases(ctx4, g4):
    rep = check_transference(ctx4, PeriodicFunction.constant(g4, 0.0))
    assert all(r[1] == 0 for r in rep.rows)
    rep = check_transference(ctx4, make_function("abs-sin-pow:1.5", g4).f)
    assert rep.notes["modulus_monotone"] and rep.passed


def test_hypothesis_gate(g4):
    ctx = OrliczContext(YoungFunction.power(2), Weight.power(g4, 1.5))
    with pytest.raises(HypothesisViolated):
        check_jackson(ctx, make_function("cos:1", g4).f, 1, 8)


def test_selfcheck(g4):
    assert closed_form_selfcheck(g4) <= 1e-8


def test_falsified_jackson_rejected(ctx4, g4):
    rep = check_jackson(ctx4, make_function("abs-sin-pow:1.5", g4).f, 1, 128, rhs_power=2.0)
    assert not rep.passed and rep.slope > 0.5


# -- parsing and configs -------------------------------------------------------------


def test_parsers(g4):
    assert parse_phi("power:1.5").p == 1.5
    assert parse_phi("power-log:2").kind == "power-log"
    assert parse_weight("power:-0.4", g4).gamma == -0.4
    assert parse_weight("power:0.4@1", g4).center == 1.0
    assert len(default_contexts(g4)) == 12 and len(default_corpus(g4)) == 8
    with pytest.raises(ValueError):
        make_function("nonsense:1", g4)


def _write(tmp_path, text):
    p = tmp_path / "cfg.json"
    p.write_text(text)
    return str(p)


def test_config_errors_carry_lines(tmp_path):
    with pytest.raises(ConfigError, match=r"cfg.json:3:"):
        load_config(_write(tmp_path, '{\n "grid": 1024,\n "checks": [,]\n}'))
    with pytest.raises(ConfigError, match=r"cfg.json:3: unknown key 'colour'"):
        load_config(_write(tmp_path, '{\n "grid": 1024,\n "colour": 1\n}'))
    with pytest.raises(ConfigError, match=r"cfg.json:4: unknown check type 'jackpot'"):
        load_config(_write(tmp_path, '{\n "grid": 1024,\n "checks": [\n  {"type": "jackpot"}\n ]\n}'))
    with pytest.raises(ConfigError, match=r"cfg.json:2:"):
        load_config(_write(tmp_path, '{\n "grid": 1000\n}'))


def test_empty_suite():
    assert run_suite({"grid": 1024, "checks": []}) == []


SMALL = {"grid": 1024, "n_max": 32, "contexts": [{"phi": "power:2"}, {"phi": "power-log:2", "weight": "power:0.4"}],
         "corpus": ["cos:3", "abs-sin-pow:1.5"],
         "checks": [{"type": "jackson", "k": [1, 2]}, {"type": "geo_mean", "k": 1},
                    {"type": "realization", "k": 1, "n_max": 16}, {"type": "rubio_modular"}]}


def test_small_suite_deterministic(tmp_path):
    a = reports_json(run_suite(SMALL))
    b = reports_json(run_suite(SMALL, workers=1))
    assert a == b
    reps = run_suite(load_config(SMALL))
    out = write_reports(reps, tmp_path, ("json", "csv", "text"))
    data = json.loads((tmp_path / "reports.json").read_text())
    assert len(data) == len(reps) and {"pass", "summary", "rows"} <= set(data[0])
    assert (tmp_path / "reports.csv").read_text().startswith("inequality_id")
    assert "reports" in (tmp_path / "summary.txt").read_text()
    assert out is None or out


def test_workspace_cache_shared(ctx4, g4):
    ws = Workspace()
    f = make_function("sawtooth", g4).f
    a = check_jackson(ctx4, f, 1, 32, ws)
    b = check_geo_mean(ctx4, f, 1, 32, ws)
    assert [r[2] for r in a.rows] == [r[2] for r in b.rows]


def test_suite_config_defaults():
    cfg = SuiteConfig()
    assert cfg.opt_n_max == 0 and cfg.selfcheck


def test_corpus_reports_serialise(l2, grid):
    from orlicz_approx.verify import check_littlewood_paley, default_corpus, reports_json
    rep = check_littlewood_paley(l2, default_corpus(grid)[:3])
    out = json.loads(reports_json([rep]))[0]
    assert out["rows"][0][0] == "cos:1"
    assert out["notes"]["block_convention"].startswith("block 0")
