"""Force operations: exact rest/oddness structure, decomposition algebra,
state specializations, and one dense-grid oracle spot check (the full
oracle battery lives in test_acceptance)."""

import math
from dataclasses import replace

import pytest

from qfriction import (
    AtomParams,
    DEFAULT_QUADRATURE,
    FORCE_UNIT,
    Model,
    REFERENCE_KINDS,
    SWEEP_QUADRATURE,
    Scenario,
    default_scenario,
    osc_force_combined,
    osc_force_free,
    osc_force_source,
    reference_force,
    tla_force_free,
    tla_force_ground,
    tla_force_source,
    tla_force_total,
)

Q = SWEEP_QUADRATURE  # rel_tol 1e-5 keeps the unit layer fast; bounds scale with it

TLA = default_scenario(Model.TLA, v=0.01)
OSC = default_scenario(Model.OSCILLATOR, v=0.01)

VALUE_OPS = (
    (tla_force_free, TLA),
    (tla_force_source, TLA),
    (tla_force_ground, TLA),
    (osc_force_free, OSC),
    (osc_force_source, OSC),
)
RESULT_OPS = ((tla_force_total, TLA), (osc_force_combined, OSC))


def test_all_forces_vanish_at_rest():
    # the kernels are built from paired differences, so v = 0 gives exact 0.0
    for op, s in VALUE_OPS:
        r = op(replace(s, v=0.0), Q)
        assert r.value == 0.0
    for op, s in RESULT_OPS:
        r = op(replace(s, v=0.0), Q)
        assert (r.f0, r.fs, r.total) == (0.0, 0.0, 0.0)


def test_oddness_in_velocity():
    for op, s in VALUE_OPS:
        plus = op(s, Q)
        minus = op(replace(s, v=-s.v), Q)
        bound = 2.0 * (plus.err_estimate + minus.err_estimate)
        assert abs(plus.value + minus.value) <= bound
    for op, s in RESULT_OPS:
        plus = op(s, Q)
        minus = op(replace(s, v=-s.v), Q)
        assert abs(plus.total + minus.total) <= 2.0 * (plus.err_estimate + minus.err_estimate)


def test_osc_negative_velocity_is_exact_mirror():
    plus = osc_force_combined(OSC, Q)
    minus = osc_force_combined(replace(OSC, v=-OSC.v), Q)
    assert (minus.f0, minus.fs, minus.total) == (-plus.f0, -plus.fs, -plus.total)
    assert minus.err_estimate == plus.err_estimate


def test_free_plus_source_equals_total():
    for op, s in RESULT_OPS:
        for v in (0.005, 0.01):
            r = op(replace(s, v=v), Q)
            assert abs(r.f0 + r.fs - r.total) <= r.err_estimate


def test_ground_state_forces_are_resistive():
    assert tla_force_total(TLA, Q).total < 0
    assert osc_force_combined(OSC, Q).total < 0
    assert tla_force_total(replace(TLA, v=-0.01), Q).total > 0


def test_total_specializes_to_ground_op():
    # identical kernel, prefactor, and quadrature: bitwise agreement
    assert tla_force_total(TLA, Q).total == tla_force_ground(TLA, Q).value


def test_total_is_affine_in_populations():
    ground = tla_force_total(TLA, Q)
    excited = tla_force_total(replace(TLA, atom=AtomParams(p_lower=0.0, p_upper=1.0)), Q)
    mixed = tla_force_total(replace(TLA, atom=AtomParams(p_lower=0.25, p_upper=0.75)), Q)
    combo = 0.25 * ground.total + 0.75 * excited.total
    bound = mixed.err_estimate + 0.25 * ground.err_estimate + 0.75 * excited.err_estimate
    assert abs(mixed.total - combo) <= bound + 1e-15 * abs(combo)


def test_free_force_is_state_independent_up_to_inversion():
    # pinning the inversion at -1 makes the oscillator free force the
    # ground-state value of the two-level one, bit for bit
    assert osc_force_free(OSC, Q).value == tla_force_free(TLA, Q).value
    # and equal populations kill it without any integration
    balanced = replace(TLA, atom=AtomParams(p_lower=0.5, p_upper=0.5))
    r = tla_force_free(balanced, Q)
    assert (r.value, r.err_estimate) == (0.0, 0.0)


def test_source_force_ignores_populations():
    excited = replace(TLA, atom=AtomParams(p_lower=0.0, p_upper=1.0))
    assert tla_force_source(excited, Q).value == tla_force_source(TLA, Q).value


def test_low_velocity_scaling_shape():
    # doubling v doubles the two-level force but multiplies the
    # oscillator force by ~8: the linear-vs-cubic contrast in miniature
    t1 = tla_force_total(replace(TLA, v=0.001), Q).total
    t2 = tla_force_total(replace(TLA, v=0.002), Q).total
    assert t2 / t1 == pytest.approx(2.0, rel=0.02)
    o1 = osc_force_combined(replace(OSC, v=0.001), Q).total
    o2 = osc_force_combined(replace(OSC, v=0.002), Q).total
    assert o2 / o1 == pytest.approx(8.0, rel=0.05)


def test_ground_op_requires_ground_state():
    excited = replace(TLA, atom=AtomParams(p_lower=0.0, p_upper=1.0))
    with pytest.raises(ValueError, match="ground state"):
        tla_force_ground(excited, Q)


def test_ops_reject_wrong_model():
    for op, name in ((tla_force_free, "tla_force_free"),
                     (tla_force_source, "tla_force_source"),
                     (tla_force_total, "tla_force_total"),
                     (tla_force_ground, "tla_force_ground")):
        with pytest.raises(ValueError, match=name):
            op(OSC, Q)
    for op, name in ((osc_force_free, "osc_force_free"),
                     (osc_force_source, "osc_force_source"),
                     (osc_force_combined, "osc_force_combined")):
        with pytest.raises(ValueError, match=name):
            op(TLA, Q)


def test_scenario_validation():
    with pytest.raises(ValueError, match="z must"):
        replace(TLA, z=0.0)
    with pytest.raises(ValueError, match="v must"):
        replace(TLA, v=math.inf)
    with pytest.raises(ValueError, match="model"):
        Scenario(atom=TLA.atom, material=TLA.material, model="tla")


def test_results_carry_unit_note_and_errors():
    r = tla_force_total(TLA, Q)
    assert r.unit_note == FORCE_UNIT
    assert r.err_estimate > 0
    v = tla_force_source(TLA, Q)
    assert v.unit_note == FORCE_UNIT
    assert v.err_estimate > 0


def test_reference_kind_validation():
    assert len(REFERENCE_KINDS) == 7
    with pytest.raises(ValueError, match="unknown force kind"):
        reference_force("bogus", TLA)
    with pytest.raises(ValueError, match="osc_free"):
        reference_force("osc_free", TLA)  # model mismatch


def test_free_force_agrees_with_dense_grid_oracle():
    # one spot check at unit level; test_acceptance runs all seven kinds
    fast = tla_force_free(TLA, DEFAULT_QUADRATURE)
    ref = reference_force("tla_free", TLA)
    assert abs(fast.value - ref) <= 1e-3 * abs(ref)
