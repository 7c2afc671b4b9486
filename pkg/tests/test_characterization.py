"""Loop synthesis/analysis round trips and the activation-model fit."""

import numpy as np
import pytest

from mramcoupling import (
    ConfigError,
    DataError,
    HysteresisLoop,
    RampProtocol,
    analyze_loop,
    default_field_protocol,
    fit_hk_delta0,
    ramp_switching_probability,
    read_calibration_csv,
    read_cycles_csv,
    read_loop_csv,
    switching_probability,
    synth_loop,
)

RP = 4677.206490863862
RAP = 8652.832008098145


def test_default_protocol_shape():
    h = default_field_protocol()
    assert h.size == 1001
    assert h[0] == 0.0 and h[-1] == 0.0
    assert h.max() == 3000.0 and h.min() == -3000.0
    steps = np.abs(np.diff(h))
    assert np.all(steps == 12.0)


def test_round_trip_on_grid_is_exact():
    loop = synth_loop(RP, RAP, 2496.0, -1896.0)
    s = analyze_loop(loop)
    assert s.hsw_p_oe == 2496.0
    assert s.hsw_n_oe == -1896.0
    assert s.hc_oe == 2196.0
    assert s.hoffset_oe == 300.0
    assert s.hs_intra_oe == -300.0
    assert s.rp_ohm == RP
    assert s.rap_ohm == RAP
    assert s.tmr == pytest.approx(0.85, rel=1e-12)
    assert s.ecd_nm == pytest.approx(35.0, rel=1e-12)


def test_round_trip_off_grid_within_one_step():
    s = analyze_loop(synth_loop(1000.0, 1850.0, 2501.3, -1893.7))
    assert abs(s.hsw_p_oe - 2501.3) < 12.0
    assert abs(s.hsw_n_oe - (-1893.7)) < 12.0


def test_round_trip_with_read_noise():
    # 2% of the plateau separation stays far inside the deadband
    sigma = 0.02 * (RAP - RP)
    s = analyze_loop(synth_loop(RP, RAP, 2496.0, -1896.0, noise_sigma_ohm=sigma, seed=5))
    assert abs(s.hsw_p_oe - 2496.0) < 12.0
    assert abs(s.hsw_n_oe - (-1896.0)) < 12.0
    assert s.rp_ohm == pytest.approx(RP, rel=0.01)
    assert s.rap_ohm == pytest.approx(RAP, rel=0.01)


def test_summary_identities_close():
    rng = np.random.default_rng(401)
    for _ in range(20):
        hsw_p = float(rng.uniform(500.0, 2900.0))
        hsw_n = float(rng.uniform(-2900.0, -500.0))
        s = analyze_loop(synth_loop(1000.0, 1850.0, hsw_p, hsw_n))
        assert s.hc_oe == pytest.approx(0.5 * (s.hsw_p_oe - s.hsw_n_oe), rel=1e-14)
        assert s.hoffset_oe == pytest.approx(0.5 * (s.hsw_p_oe + s.hsw_n_oe), abs=1e-10)
        assert s.hs_intra_oe == -s.hoffset_oe


def test_synth_validation():
    with pytest.raises(DataError):
        synth_loop(1850.0, 1000.0, 2496.0, -1896.0)
    with pytest.raises(DataError):
        synth_loop(1000.0, 1850.0, -1896.0, 2496.0)
    with pytest.raises(DataError):
        synth_loop(1000.0, 1850.0, 3500.0, -1896.0)


def test_flat_loop_rejected():
    h = default_field_protocol()
    with pytest.raises(DataError):
        analyze_loop(HysteresisLoop(h_oe=h, resistance_ohm=np.full(h.size, 1000.0)))


def test_multi_transition_rejected():
    loop = synth_loop(1000.0, 1850.0, 2496.0, -1896.0)
    r = loop.resistance_ohm.copy()
    # a second full excursion on the ascending branch
    r[60:80] = 1000.0
    with pytest.raises(DataError):
        analyze_loop(HysteresisLoop(h_oe=loop.h_oe, resistance_ohm=r))


def test_loop_array_validation():
    with pytest.raises(DataError):
        HysteresisLoop(h_oe=np.array([0.0, 1.0]), resistance_ohm=np.array([1.0, 2.0]))
    with pytest.raises(DataError):
        HysteresisLoop(
            h_oe=np.array([0.0, 1.0, np.nan]), resistance_ohm=np.array([1.0, 2.0, 3.0])
        )


def _stochastic_cycles(n_cycles, seed, hk=4646.8, delta0=45.5):
    # per-cycle switching fields drawn from the ramp activation model
    proto = RampProtocol()
    rng = np.random.default_rng(seed)
    grid = default_field_protocol()
    hs = np.linspace(1.0, 2999.0, 3000)
    cdf = ramp_switching_probability(hs, hk, delta0, proto)
    cycles = []
    for _ in range(n_cycles):
        hp = float(np.interp(rng.random(), cdf, hs))
        hn = -float(np.interp(rng.random(), cdf, hs))
        cycles.append(synth_loop(1000.0, 1850.0, hp, hn, h_oe=grid))
    return cycles


def test_probability_curve_is_a_cdf():
    cycles = _stochastic_cycles(40, seed=402)
    for direction in ("ascending", "descending"):
        curve = switching_probability(cycles, direction)
        assert curve.n_cycles == 40
        assert np.all(np.diff(curve.h_oe) > 0)
        assert np.all(np.diff(curve.p) >= 0)
        assert curve.p[0] == 0.0
        assert curve.p[-1] == 1.0


def test_probability_requires_shared_grid():
    cycles = _stochastic_cycles(3, seed=403)
    with pytest.raises(DataError):
        switching_probability(cycles[:1], "ascending")
    short = HysteresisLoop(
        h_oe=cycles[0].h_oe[:-1], resistance_ohm=cycles[0].resistance_ohm[:-1]
    )
    with pytest.raises(DataError):
        switching_probability([cycles[0], short], "ascending")
    with pytest.raises(ConfigError):
        switching_probability(cycles, "upward")


def test_probability_unbiased_on_grid_nodes():
    # all cycles switch at exactly 2496 Oe, so the empirical curve must
    # step from 0 to 1 between the adjacent grid nodes
    cycles = [synth_loop(1000.0, 1850.0, 2496.0, -1896.0) for _ in range(5)]
    curve = switching_probability(cycles, "ascending")
    p_at = dict(zip(curve.h_oe, curve.p))
    assert p_at[2484.0] == 0.0
    assert p_at[2496.0] == 1.0


def test_ramp_model_shape():
    proto = RampProtocol()
    h = np.linspace(0.0, 3000.0, 400)
    p = ramp_switching_probability(h, 4646.8, 45.5, proto)
    assert np.all(np.diff(p) >= 0)
    assert p[0] == 0.0
    assert 0.0 <= p[-1] <= 1.0
    # a taller barrier switches later
    p_tall = ramp_switching_probability(h, 4646.8, 80.0, proto)
    assert np.interp(0.5, p_tall, h) > np.interp(0.5, p, h)


def test_fit_recovers_noiseless_curve():
    proto = RampProtocol()
    h = np.linspace(1.0, 2999.0, 600)
    p = ramp_switching_probability(h, 4646.8, 45.5, proto)
    fit = fit_hk_delta0(h, p, proto)
    assert fit.hk_oe == pytest.approx(4646.8, rel=0.02)
    assert fit.delta0 == pytest.approx(45.5, rel=0.02)
    assert fit.residual < 1e-8


def test_fit_recovers_binomial_sampled_curve():
    proto = RampProtocol()
    rng = np.random.default_rng(404)
    h = np.linspace(1.0, 2999.0, 250)
    p_true = ramp_switching_probability(h, 4646.8, 45.5, proto)
    p_hat = rng.binomial(1000, p_true) / 1000.0
    fit = fit_hk_delta0(h, p_hat, proto)
    assert fit.hk_oe == pytest.approx(4646.8, rel=0.10)
    assert fit.delta0 == pytest.approx(45.5, rel=0.10)


def test_fit_needs_resolved_transition():
    proto = RampProtocol()
    h = np.linspace(1.0, 500.0, 100)
    p = ramp_switching_probability(h, 4646.8, 45.5, proto)
    assert p.max() < 0.9
    with pytest.raises(DataError):
        fit_hk_delta0(h, p, proto)


def test_csv_readers(tmp_path):
    loop_path = tmp_path / "loop.csv"
    loop = synth_loop(1000.0, 1850.0, 2496.0, -1896.0)
    with open(loop_path, "w") as fh:
        fh.write("h_oe,resistance_ohm\n")
        for h, r in zip(loop.h_oe, loop.resistance_ohm):
            fh.write(f"{h},{r}\n")
    back = read_loop_csv(loop_path)
    assert np.array_equal(back.h_oe, loop.h_oe)
    assert np.array_equal(back.resistance_ohm, loop.resistance_ohm)

    cyc_path = tmp_path / "cycles.csv"
    with open(cyc_path, "w") as fh:
        fh.write("cycle,h_oe,resistance_ohm\n")
        for label in ("a", "b"):
            for h, r in zip(loop.h_oe, loop.resistance_ohm):
                fh.write(f"{label},{h},{r}\n")
    cycles = read_cycles_csv(cyc_path)
    assert len(cycles) == 2
    assert np.array_equal(cycles[0].h_oe, cycles[1].h_oe)

    cal_path = tmp_path / "cal.csv"
    cal_path.write_text("ecd_nm,hs_intra_oe\n35,-318.7\n55,-232.0\n")
    assert read_calibration_csv(cal_path) == [(35.0, -318.7), (55.0, -232.0)]


def test_csv_reader_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("h_oe,volts\n1,2\n")
    with pytest.raises(DataError):
        read_loop_csv(bad)
    bad.write_text("h_oe,resistance_ohm\n1,notanumber\n")
    with pytest.raises(DataError):
        read_loop_csv(bad)
    bad.write_text("h_oe,resistance_ohm\n")
    with pytest.raises(DataError):
        read_loop_csv(bad)
    with pytest.raises(DataError):
        read_loop_csv(tmp_path / "missing.csv")
