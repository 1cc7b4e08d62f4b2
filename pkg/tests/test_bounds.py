"""Closed-form bounds, their registry, and the sharpness studies.

The unit square and every unit-side rhombus make the main bound collapse
to j01^2 exactly, which pins most tolerances here to the accuracy of the
shot radial profile (~1e-10). Cross-bound identities (domain cancellation
in the dominance ratio, width-rule equality on symmetric domains) are
checked as identities, not near-misses.
"""

import math

import numpy as np
import pytest

from spectral_bounds import bounds, geometry, special
from spectral_bounds.errors import NumericError, ParameterError

J01 = special.bessel_first_zero(0.0)


def test_classical_constant():
    assert bounds.classical_constant(2) == pytest.approx(
        2.0 * math.sqrt(math.pi), rel=1e-12)
    assert bounds.classical_constant(3) == pytest.approx(
        3.0 * (4.0 * math.pi / 3.0) ** (1.0 / 3.0), rel=1e-12)


def test_kn_registry():
    square = bounds.kn_lookup(geometry.make_rectangle(1.0, 1.0))
    assert square.value == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert square.rule == bounds.RULE_SYMMETRIC_WIDTH

    rect = bounds.kn_lookup(geometry.make_rectangle(2.0, 1.0))
    assert rect.value == pytest.approx(1.0, rel=1e-12)

    rhomb = bounds.kn_lookup(geometry.make_rhombus(8))
    assert rhomb.rule == bounds.RULE_RHOMBUS
    assert rhomb.value == pytest.approx(2.0 ** 0.25, rel=1e-12)
    # the diagonal rule and the generic symmetric-width rule agree on
    # every rhombus
    for m in (8, 16, 32):
        spec = geometry.make_rhombus(m)
        width_rule = math.sqrt(2.0 * spec.width ** 2 / spec.area)
        assert bounds.kn_lookup(spec).value == pytest.approx(width_rule,
                                                             rel=1e-12)

    with pytest.raises(ParameterError):
        bounds.kn_lookup(geometry.make_regular_polygon(5, 1.0))


def test_kn_entry_invariant():
    spec = geometry.make_rectangle(1.0, 1.0)
    too_big = bounds.classical_constant(2) * 1.01
    with pytest.raises(NumericError):
        bounds.KnEntry(spec=spec, value=too_big,
                       rule=bounds.RULE_SYMMETRIC_WIDTH)
    with pytest.raises(NumericError):
        bounds.KnEntry(spec=spec, value=0.0,
                       rule=bounds.RULE_SYMMETRIC_WIDTH)


def test_main_bound_square_and_rhombi():
    # all of these reduce to j01^2 after cancellation
    square = geometry.make_rectangle(1.0, 1.0)
    value = bounds.main_bound(2.0, 2, bounds.kn_lookup(square).value,
                              square.area)
    assert value == pytest.approx(J01 ** 2, rel=1e-9)
    for m in (8, 16, 64):
        spec = geometry.make_rhombus(m)
        value = bounds.main_bound(2.0, 2, bounds.kn_lookup(spec).value,
                                  spec.area)
        assert value == pytest.approx(J01 ** 2, rel=1e-9)


def test_main_bound_p3_square():
    # p = 3 on the square: 2^{3/2} alpha^{3/2}-free cancellation leaves
    # the cube of the p = 3 radial zero
    zero = special.psi_profile(3.0, 2).first_zero
    value = bounds.main_bound(3.0, 2, math.sqrt(2.0), 1.0)
    assert value == pytest.approx(zero ** 3, rel=1e-12)
    assert value == pytest.approx(9.8314984046, rel=1e-6)


def test_ashbaugh_mercado_and_dominance():
    assert bounds.ashbaugh_mercado(2.0, 2, math.sqrt(2.0), 1.0) \
        == pytest.approx(4.0, rel=1e-12)
    assert bounds.dominance_ratio(2.0, 2) == pytest.approx(J01 ** 2 / 4.0,
                                                           rel=1e-9)
    # the ratio of the two bounds is domain independent
    for p, n in ((2.0, 2), (3.0, 2), (2.0, 3), (5.0, 4)):
        ratio = (bounds.main_bound(p, n, 1.234, 0.77)
                 / bounds.ashbaugh_mercado(p, n, 1.234, 0.77))
        assert ratio == pytest.approx(bounds.dominance_ratio(p, n),
                                      rel=1e-12)
        assert ratio > 1.0


def test_bct_corollary():
    value = bounds.bct_corollary(2, math.sqrt(2.0), 1.0)
    assert value == pytest.approx(4.511934651818593, rel=1e-6)
    main = bounds.main_bound(2.0, 2, math.sqrt(2.0), 1.0)
    assert value < main
    assert main / value == pytest.approx(1.281753, rel=1e-4)


def test_symmetric_planar_bound():
    square = geometry.make_rectangle(1.0, 1.0)
    assert bounds.symmetric_planar_bound(1.0, 1.0) == pytest.approx(
        bounds.main_bound(2.0, 2, bounds.kn_lookup(square).value, 1.0),
        rel=1e-9)
    assert bounds.symmetric_planar_bound(1.0, 2.0) == pytest.approx(
        J01 ** 2 / 4.0, rel=1e-9)


def test_validation_errors():
    with pytest.raises(ParameterError):
        bounds.main_bound(2.0, 2, 0.0, 1.0)
    with pytest.raises(ParameterError):
        bounds.main_bound(2.0, 2, 1.0, -1.0)
    with pytest.raises(ParameterError):
        bounds.ashbaugh_mercado(1.9, 2, 1.0, 1.0)
    with pytest.raises(ParameterError):
        bounds.payne_weinberger(0.0)
    with pytest.raises(ParameterError):
        bounds.symmetric_planar_bound(0.0, 1.0)
    with pytest.raises(ParameterError):
        bounds.bct_corollary(2, -1.0, 1.0)
    with pytest.raises(ParameterError):
        bounds.compare_report(geometry.make_rectangle(1.0, 1.0), 1.5)
    with pytest.raises(ParameterError):
        bounds.compare_report(geometry.make_rectangle(1.0, 1.0), 2.0,
                              level=0)


def test_pw_improvement_square():
    square = geometry.make_rectangle(1.0, 1.0)
    report = bounds.pw_improvement_check(square, 0.75)
    assert report.hypothesis_holds
    assert report.improves
    assert report.threshold_product == pytest.approx(0.75 * math.sqrt(2.0),
                                                     rel=1e-12)
    assert report.bound_times_d2 == pytest.approx(2.0 * J01 ** 2, rel=1e-9)
    assert report.improvement_threshold == pytest.approx(J01 ** 2 / 0.75 ** 2,
                                                         rel=1e-12)
    assert report.pw_times_d2 == pytest.approx(math.pi ** 2, rel=1e-12)
    # the full chain: width bound >= j01^2/c^2 > pi^2
    assert (report.bound_times_d2 >= report.improvement_threshold
            > report.pw_times_d2)
    # c may approach j01/pi from below
    assert bounds.pw_improvement_check(square, 0.76).improves


def test_pw_improvement_rejects():
    square = geometry.make_rectangle(1.0, 1.0)
    for c in (0.77, J01 / math.pi, 0.0, -1.0):
        with pytest.raises(ParameterError):
            bounds.pw_improvement_check(square, c)
    with pytest.raises(ParameterError):
        bounds.pw_improvement_check(geometry.make_regular_polygon(5, 1.0),
                                    0.75)
    # wide rectangle: hypothesis fails, no improvement claimed, no error
    report = bounds.pw_improvement_check(geometry.make_rectangle(2.0, 1.0),
                                         0.75)
    assert not report.hypothesis_holds
    assert not report.improves


def test_compare_report_square():
    square = geometry.make_rectangle(1.0, 1.0)
    report = bounds.compare_report(square, 2.0, level=5)
    assert report.mu1 == pytest.approx(math.pi ** 2, rel=1e-5)
    names = {entry.name for entry in report.entries}
    assert names == {"main", "ashbaugh_mercado", "payne_weinberger",
                     "bct_corollary", "symmetric_planar"}
    for entry in report.entries:
        assert entry.value <= report.mu1 * 1.01
        assert entry.applicable
    assert report.value("payne_weinberger") == pytest.approx(
        math.pi ** 2 / 2.0, rel=1e-12)
    assert report.ratios["payne_weinberger"] == pytest.approx(0.5, abs=1e-4)
    # on a centrally symmetric planar domain the width bound equals the
    # main bound; they differ only through the two routes to j01
    assert report.ratios["main"] == pytest.approx(
        report.ratios["symmetric_planar"], rel=1e-9)
    assert report.value("main") == pytest.approx(J01 ** 2, rel=1e-9)
    with pytest.raises(ParameterError):
        report.value("nonexistent")


def test_compare_report_p3():
    report = bounds.compare_report(geometry.make_rhombus(8), 3.0)
    assert report.mu1 is None
    assert {entry.name for entry in report.entries} \
        == {"main", "ashbaugh_mercado"}
    assert report.ratios == {}
    assert report.value("main") > report.value("ashbaugh_mercado")


def test_rhombus_sharpness_sequence():
    expected = {8: 2.242711, 16: 2.054796, 32: 2.013231, 64: 2.003268}
    samples = [bounds.rhombus_sharpness(m, level=5) for m in (8, 16, 32, 64)]
    for sample in samples:
        assert sample.scaled_ball_value == pytest.approx(J01 ** 2 / 2.0,
                                                         rel=1e-9)
        assert sample.ratio == pytest.approx(
            sample.mu1 / sample.scaled_ball_value, rel=1e-12)
        assert sample.ratio == pytest.approx(expected[sample.m], rel=2e-4)
    ratios = [sample.ratio for sample in samples]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] <= 2.05
    # the limit factor 2 is never crossed from below
    assert all(r > 2.0 for r in ratios)


@pytest.mark.parametrize("m", [8, 16])
def test_sector_sandwich(m):
    sandwich = bounds.sector_sandwich(m, level=4)
    assert sandwich.ok
    assert sandwich.lower == pytest.approx(J01 ** 2, rel=1e-12)
    assert sandwich.upper == pytest.approx(
        J01 ** 2 / math.cos(math.pi / m) ** 2, rel=1e-12)
    assert sandwich.lower * 0.99 <= sandwich.value <= sandwich.upper * 1.01


def test_sector_sandwich_degeneration():
    # as the opening angle closes, the half-rhombus hugs the unit sector
    sandwich = bounds.sector_sandwich(64, level=4)
    assert sandwich.ok
    assert sandwich.value <= J01 ** 2 * 1.01
