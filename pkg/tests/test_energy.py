import math

import pytest
from hypothesis import given, strategies as st

from oracles import mrr_hand_loss, mzm_hand_loss, pcm_fraction
from photomac.catalog import MzmTechParams, SimConfig, TuningCatalog
from photomac.energy import (EnergyBreakdown, InfeasibleError, avg_tuning_power, cmos_mac_baseline,
                             cmos_ratio, energy_per_op, laser_electrical_power,
                             mrr_laser_electrical_power, mzm_laser_electrical_power,
                             pcm_average_energy, throughput_ratio)
from photomac.noise import afe_sensitivity

LOSSLESS = MzmTechParams(il_ec=0, il_wg=0, el_splitter=0, il_ps=0, il_dc=0, il_penalty=0, wpe=1.0)


@pytest.mark.parametrize("bits,pj", [(1, 186.25), (2, 231.125), (3, 165.30), (4, 121.21)])
def test_pcm_energy(bits, pj):
    assert pcm_average_energy(bits) == pytest.approx(pcm_fraction(bits) * 1e-12, rel=1e-12)
    assert pcm_average_energy(bits) * 1e12 == pytest.approx(pj, abs=0.01)


@pytest.mark.parametrize("bits", [0, 5])
def test_pcm_energy_range(bits):
    with pytest.raises(ValueError):
        pcm_average_energy(bits)


@given(st.integers(min_value=1, max_value=256), st.floats(min_value=1e-9, max_value=1e-3))
def test_lossless_laser_is_n_times_sensitivity(n, sens):
    assert mzm_laser_electrical_power(n, sens, LOSSLESS, ps_loss_db=0.0) == pytest.approx(n * sens, rel=1e-12)
    inefficient = MzmTechParams(il_ec=0, il_wg=0, el_splitter=0, il_ps=0, il_dc=0, il_penalty=0, wpe=0.1)
    assert mzm_laser_electrical_power(n, sens, inefficient, ps_loss_db=0.0) == pytest.approx(10 * n * sens, rel=1e-12)


def test_laser_matches_hand_loss():
    sens = 1e-5
    tech = MzmTechParams()
    for n in (4, 8, 16):
        loss = mzm_hand_loss(n, ps=0.01) - 10 * math.log10(n)
        assert mzm_laser_electrical_power(n, sens, tech, 0.01) == pytest.approx(
            n * sens * 10 ** (loss / 10) / 0.1, rel=1e-12)
    cfg = SimConfig(architecture="mrr", n=8, tuning_kind="TOPS_insulated")
    expected = 8 * sens * 10 ** ((mrr_hand_loss(8) - 10 * math.log10(8)) / 10) / 0.1
    assert laser_electrical_power(cfg, sens) == pytest.approx(expected, rel=1e-12)


def test_mrr_laser_ratio_16_over_8():
    sens = 1e-5
    tech = SimConfig().mrr
    ratio = mrr_laser_electrical_power(16, sens, tech) / mrr_laser_electrical_power(8, sens, tech)
    extra_db = mrr_hand_loss(16) - mrr_hand_loss(8) - 10 * math.log10(2)
    assert ratio == pytest.approx(2 * 10 ** (extra_db / 10), rel=1e-12)


def test_laser_overflow():
    with pytest.raises(InfeasibleError):
        mzm_laser_electrical_power(4000, 1e-3, MzmTechParams())


def test_avg_tuning_power_thermal():
    cat = TuningCatalog()
    plain = cat.resolve("TOPS_plain", "mzm")
    assert avg_tuning_power(plain, "mzm", 8, 10e9).total_static == pytest.approx(0.280)
    ring = cat.resolve("TOPS_plain", "mrr")
    assert avg_tuning_power(ring, "mrr", 8, 10e9).effective_power == pytest.approx(64 * 0.02)


def test_avg_tuning_power_non_volatile():
    cat = TuningCatalog()
    noems = cat.resolve("NOEMS", "mzm")
    r = avg_tuning_power(noems, "mzm", 16, 10e9)
    assert r.total_static == 0.0 and r.per_update_dynamic == pytest.approx(256e-15)
    assert r.effective_power == pytest.approx(256e-15 * 10e9 / 4096)
    huge = TuningCatalog(alpha_w=1e30).resolve("NOEMS", "mzm")
    assert avg_tuning_power(huge, "mzm", 16, 10e9).effective_power == pytest.approx(0.0, abs=1e-20)
    pcm = cat.resolve("PCM", "mzm", bits=2)
    assert avg_tuning_power(pcm, "mzm", 16, 10e9).per_update_dynamic == pytest.approx(256 * 231.125e-12)
    with pytest.raises(ValueError):
        avg_tuning_power(pcm, "mzm", 0, 10e9)


def _hand_mzm(cfg, sens):
    n, dr = cfg.n, cfg.noise.data_rate
    ops = 2 * n * n * dr
    loss = mzm_hand_loss(n, ps=cfg.tuning.insertion_loss)
    p_laser = n * sens * 10 ** ((loss - 10 * math.log10(n)) / 10) / cfg.mzm.wpe
    p_el = cfg.tuning.element_power(dr)
    return {
        "laser": p_laser / (cfg.rho_opt ** 2 * ops),
        "input_drivers": n * dr * cfg.drivers.mzm_driver(cfg.bits) / ops,
        "mem_interface": 2 * 5.77e-3 / ops,
        "matrix_tuning": 2 * (n - 1) * p_el / (2 * n * dr),
        "soa": 0.0,
        "output_afe": cfg.drivers.afe(cfg.bits) / (2 * n),
    }


@pytest.mark.parametrize("tuning", ["TOPS_plain", "TOPS_insulated", "NOEMS", "LCOS", "PCM"])
@pytest.mark.parametrize("n,bits", [(8, 1), (17, 4), (32, 2)])
def test_mzm_terms_against_hand_formula(tuning, n, bits):
    cfg = SimConfig(architecture="mzm", n=n, bits=bits, tuning_kind=tuning).with_(responsivity=1.2)
    sens = afe_sensitivity(bits, cfg.noise)
    e = energy_per_op(cfg)
    for name, value in _hand_mzm(cfg, sens).items():
        assert getattr(e, name) == pytest.approx(value, rel=1e-9, abs=1e-30), name


def test_mrr_terms():
    cfg = SimConfig(architecture="mrr", n=16, bits=1).with_(responsivity=1.2)
    e = energy_per_op(cfg)
    dr = 10e9
    p_mod = dr * cfg.drivers.mrm_driver(1) + 0.2e-3
    assert e.input_drivers == pytest.approx(16 * p_mod / (2 * 256 * dr))
    assert e.matrix_tuning == pytest.approx(16 * 1.4e-3 / (2 * 16 * dr))
    assert e.soa == 0.0


def test_rho_opt_scales_laser_only():
    a = energy_per_op(SimConfig(n=16, rho_opt=1.0))
    b = energy_per_op(SimConfig(n=16, rho_opt=math.sqrt(2)))
    assert b.laser == pytest.approx(a.laser / 2)
    assert b.input_drivers == a.input_drivers and b.matrix_tuning == a.matrix_tuning


def test_soa_count_terms():
    base = SimConfig(n=32, bits=4).with_(responsivity=1.2)
    e0, e1 = energy_per_op(base), energy_per_op(base.with_(soa_count=1))
    assert e1.soa == pytest.approx(42e-3 / (2 * 32 * 10e9))
    assert e1.laser == pytest.approx(e0.laser / 10 ** 1.7)


@given(st.sampled_from(["mzm", "mrr"]), st.integers(min_value=1, max_value=80), st.integers(min_value=1, max_value=4),
       st.sampled_from(["TOPS_plain", "TOPS_insulated", "NOEMS", "LCOS", "PCM"]))
def test_total_is_sum_and_terms_nonnegative(arch, n, bits, tuning):
    e = energy_per_op(SimConfig(architecture=arch, n=n, bits=bits, tuning_kind=tuning))
    parts = [getattr(e, p) for p in EnergyBreakdown.PARTS]
    assert all(p >= 0 for p in parts)
    assert e.total == pytest.approx(math.fsum(parts), rel=1e-14)
    assert e.as_dict()["total"] == e.total
    assert e.ops_per_second == 2 * n * n * 10e9


def test_negative_term_rejected():
    with pytest.raises(ValueError):
        EnergyBreakdown(-1.0, 0, 0, 0, 0, 0, 1.0)


def test_cmos_baseline_and_throughput():
    assert cmos_mac_baseline() == pytest.approx(28.85e-15)
    assert cmos_ratio(57.7e-15) == pytest.approx(2.0)
    assert throughput_ratio(1, 1, 1e9, 1e9) == 2.0
    assert throughput_ratio(35, 1, 10e9, 1e9) == 700.0
    with pytest.raises(ValueError):
        throughput_ratio(0, 1, 1e9, 1e9)
