import math

import pytest

import infomenu as im


def test_golden_menu():
    menu = im.build_menu(im.ValueFunction.quadratic(), im.BeliefDensity.uniform())
    t = menu.thresholds
    assert t.lam == 0.5
    assert t.mu_minus == pytest.approx(0.25, abs=1e-12)
    assert t.mu_plus == pytest.approx(0.75, abs=1e-12)
    assert t.exclusion_hi == pytest.approx((4.5 + math.sqrt(4.25)) / 8, abs=1e-10)
    assert menu.revenue >= 1 / (6 * math.sqrt(3)) - 1e-9
    assert im.verify_menu(menu, im.ValueFunction.quadratic()).passed


def test_printed_posterior():
    menu = im.build_menu(im.ValueFunction.quadratic(), im.BeliefDensity.uniform())
    rec = min(menu.records, key=lambda r: abs(r.mu - 0.8))
    mu = rec.mu
    assert rec.contract.orientation == im.Orientation.reveal_l
    assert rec.posterior == pytest.approx((3.5 * mu - 2 * mu * mu - 1) / (2 * mu - 1), abs=1e-8)


def test_flat_price():
    fp = im.flat_price_optimum(im.ValueFunction.quadratic(), im.BeliefDensity.uniform())
    assert fp.price == pytest.approx(1 / 6, abs=1e-4)
    assert fp.revenue == pytest.approx(1 / (6 * math.sqrt(3)), abs=1e-4)


def test_experiments():
    e = im.SimpleExperiment.reveal_l(0.5)
    assert im.posterior(e, 1, 0.5) == pytest.approx(2 / 3)
    v = im.ValueFunction.quadratic()
    assert im.delta_v(0.8, im.SimpleExperiment.full(), v) == pytest.approx(0.16)


def test_oracle_two_types():
    m = im.oracle_optimum([(0.3, 0.5), (0.7, 0.5)], [], im.ValueFunction.quadratic())
    assert m.exhaustive
    assert m.revenue == pytest.approx(0.21)


def test_errors():
    with pytest.raises(im.UnsupportedKind):
        im.build_menu(im.ValueFunction.four_action(), im.BeliefDensity.uniform())
    with pytest.raises(im.DomainError):
        im.SimpleExperiment.reveal_h(2.0)


def test_run_command(tmp_path):
    code, log, err = im.run("solve", "value_function:\n  kind: quadratic\n", str(tmp_path))
    assert code == 0, err
    assert (tmp_path / "menu.csv").exists()
    with pytest.raises(im.ConfigError, match="tolerances.verify"):
        im.run("solve", "tolerances:\n  verify: 0\n", str(tmp_path))
    code, _, err = im.run("solve", "value_function:\n  kind: builtin\n  name: four_action\n", str(tmp_path))
    assert code == 2, err


def test_dispersion():
    u = im.BeliefDensity.uniform()
    f = im.BeliefDensity.rotation(u, 0.4)
    assert im.is_more_dispersed(f, u)
    assert not im.is_more_dispersed(u, f)
