"""Scheduling and CMOS cost models."""

import math

import pytest

from memgan.costs import (CMOS_COMPONENTS, CmosCostTable,
                          DEFAULT_CMOS_AREA_UM2, DEFAULT_CMOS_POWER_MW,
                          NET_PARALLEL_SIMULTANEOUS_WRITES, SCHEMES,
                          ScheduleConfig, cmos_cost, schedule_csv,
                          schedule_report, schedule_table, steps_per_event)
from memgan.device import DeviceSpec
from memgan.topology import reference_full

SPEC = DeviceSpec()


def cfg(scheme, w=1_700_000, layers=6, c_max=784):
    return ScheduleConfig(scheme, SPEC, w, layers, c_max)


def test_steps_per_event_by_scheme():
    assert steps_per_event(cfg("two-cycle-layer-series")) == 12
    assert steps_per_event(cfg("four-cycle-layer-series")) == 24
    assert steps_per_event(cfg("column-parallel-layer-parallel")) == 784
    assert steps_per_event(cfg("net-parallel-layer-seq")) == \
        math.ceil(1_700_000 / NET_PARALLEL_SIMULTANEOUS_WRITES)


def test_schedule_config_validation():
    with pytest.raises(ValueError):
        cfg("bogus-scheme")
    with pytest.raises(ValueError):
        cfg("two-cycle-layer-series", w=0)


def test_schedule_config_from_topologies():
    sc = ScheduleConfig.from_topologies("two-cycle-layer-series", SPEC,
                                        *reference_full())
    assert sc.n_weights == 1_673_536
    assert sc.n_layers == 6
    assert sc.c_max == 784


def test_schedule_report_times_scale_with_pulse_width():
    r = schedule_report(cfg("two-cycle-layer-series"), 50, 60_000)
    assert r.events == 3_000_000
    assert r.training_time[10e-9] == pytest.approx(0.36)
    assert r.training_time[100e-9] == pytest.approx(3.6)
    assert r.training_time[1000e-9] == pytest.approx(36.0)


def test_schedule_report_power_bounds():
    r = schedule_report(cfg("two-cycle-layer-series"), 50, 60_000)
    assert r.parallel_writes == math.ceil(1_700_000 / 12)
    assert r.power_max == pytest.approx(r.parallel_writes / 4000)
    assert r.power_min == pytest.approx(r.parallel_writes / 25000)
    assert r.power_max > r.power_min


def test_net_parallel_row_carries_note():
    r = schedule_report(cfg("net-parallel-layer-seq"), 50, 60_000)
    assert r.note
    for scheme in SCHEMES:
        if scheme != "net-parallel-layer-seq":
            assert schedule_report(cfg(scheme), 1, 1).note == ""


def test_schedule_table_and_csv_render():
    reports = [schedule_report(cfg(s), 50, 60_000) for s in SCHEMES]
    table = schedule_table(reports)
    assert "two-cycle-layer-series" in table
    assert "note:" in table
    csv_text = schedule_csv(reports)
    lines = csv_text.strip().splitlines()
    assert lines[0].startswith("scheme,")
    assert len(lines) == 1 + len(SCHEMES) * 3  # three pulse widths per scheme


def test_cmos_cost_defaults():
    counts = {k: 1 for k in CMOS_COMPONENTS}
    power_w, area_mm2 = cmos_cost(counts)
    assert power_w * 1e3 == pytest.approx(sum(DEFAULT_CMOS_POWER_MW.values()))
    assert area_mm2 * 1e6 == pytest.approx(sum(DEFAULT_CMOS_AREA_UM2.values()))


def test_cmos_cost_scales_with_counts():
    counts = {k: 2 for k in CMOS_COMPONENTS}
    p2, a2 = cmos_cost(counts)
    p1, a1 = cmos_cost({k: 1 for k in CMOS_COMPONENTS})
    assert p2 == pytest.approx(2 * p1) and a2 == pytest.approx(2 * a1)


def test_cmos_cost_validation():
    with pytest.raises(ValueError):
        cmos_cost({"flux_capacitor": 1})
    with pytest.raises(ValueError):
        cmos_cost({"opamp": -1})
    with pytest.raises(ValueError):
        CmosCostTable(power_mw={"opamp": 1.0}, area_um2={"relu": 1.0})
    with pytest.raises(ValueError):
        CmosCostTable(power_mw={"opamp": -1.0}, area_um2={"opamp": 1.0})
