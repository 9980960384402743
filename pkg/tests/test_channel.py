import math

import pytest

from ubb84.channel import (
    ChannelParams,
    apparatus_transmittance,
    default_params,
    honest_statistics,
    parse_params,
    photon_number_split,
    transmittance,
)
from ubb84.protocol import Variant, make_config


def stats_by_series(cfg, params, n_max=120):
    """Independent re-evaluation of the honest model by direct series summation."""
    eta_ch = 10.0 ** (-params.alpha_db_per_km * params.distance_km / 10.0)
    apparatus = apparatus_transmittance(cfg)
    eta = eta_ch * params.eta_det * apparatus.kept
    mu, y0, e_d = params.mu, params.y0, params.e_d

    def poisson(n):
        return math.exp(-mu) * mu**n / math.factorial(n)

    click = err = 0.0
    for n in range(n_max + 1):
        a_n = 1.0 - (1.0 - eta) ** n
        d_n = a_n + 2.0 * y0 * (1.0 - a_n)
        click += poisson(n) * d_n
        err += poisson(n) * (e_d * a_n + y0 * (1.0 - a_n))
    p_v = poisson(0) * 2.0 * y0
    p_s = poisson(1) * (eta + 2.0 * y0 * (1.0 - eta))
    return {
        "p_click_total": click,
        "p_click_v": p_v,
        "p_click_s": p_s,
        "p_click_m": click - p_v - p_s,
        "q_tot": err / click,
        "q_single": (e_d * eta + y0) / (eta + 2.0 * y0),
        "p_lost": 1.0 - eta_ch * params.eta_det * apparatus.survival,
    }


class TestTransmittance:
    def test_zero_distance(self):
        assert transmittance(default_params(distance_km=0.0)) == 1.0

    def test_twenty_km(self):
        assert transmittance(default_params(distance_km=20.0)) == pytest.approx(0.3802, abs=1e-4)

    def test_fifty_km(self):
        assert transmittance(default_params(distance_km=50.0)) == pytest.approx(0.0891, abs=1e-4)


class TestPhotonSplit:
    def test_small_mu_limit(self):
        p_v, p_s, p_m = photon_number_split(1e-8)
        assert p_s / 1e-8 == pytest.approx(1.0, abs=1e-6)
        assert p_m < 1e-15

    def test_mu_tenth(self):
        assert photon_number_split(0.1) == pytest.approx((0.9048, 0.0905, 0.0047), abs=1e-4)

    def test_mu_half(self):
        assert photon_number_split(0.5) == pytest.approx((0.6065, 0.3033, 0.0902), abs=1e-4)

    def test_sums_to_one(self):
        for mu in (0.05, 0.3, 1.5):
            assert sum(photon_number_split(mu)) == pytest.approx(1.0, abs=1e-12)


class TestApparatus:
    def test_balanced_unbalanced(self):
        model = apparatus_transmittance(make_config(1.0))
        assert model.kept == pytest.approx(0.5)
        assert model.survival == pytest.approx(1.0)

    def test_pbs_lossless_limit(self):
        assert apparatus_transmittance(make_config(1.0, Variant.PBS)).survival == pytest.approx(1.0)

    def test_half_kappa_table(self):
        assert apparatus_transmittance(make_config(0.5)).kept == pytest.approx(1 / 3)
        assert apparatus_transmittance(make_config(0.5, Variant.FIX_LOSS)).kept == pytest.approx(1 / 4)
        assert apparatus_transmittance(make_config(0.5, Variant.PBS)).kept == pytest.approx(5 / 6)
        assert apparatus_transmittance(make_config(0.5, Variant.FIX_UNEVEN_BS)).kept == pytest.approx(1 / 3)

    def test_unbalanced_middle_fraction(self):
        cfg = make_config(0.5)
        model = apparatus_transmittance(cfg)
        xi = cfg.xi
        assert model.survival == pytest.approx(1 / (2 * xi))
        assert model.middle_fraction == pytest.approx(2 * xi * (1 - xi))

    def test_unbalanced_beats_fix_loss(self):
        for kappa in (0.1, 0.4, 0.7, 0.99):
            unb = apparatus_transmittance(make_config(kappa)).kept
            fix = apparatus_transmittance(make_config(kappa, Variant.FIX_LOSS)).kept
            assert unb >= fix
        assert apparatus_transmittance(make_config(1.0)).kept == pytest.approx(
            apparatus_transmittance(make_config(1.0, Variant.FIX_LOSS)).kept
        )


class TestHonestStatistics:
    def test_noiseless_limit(self):
        params = default_params(distance_km=10.0).with_(y0=0.0, e_d=0.0)
        stats = honest_statistics(make_config(1.0), params)
        assert stats.q_single == 0.0
        assert stats.q_tot == 0.0

    def test_dark_count_dominated_limit(self):
        params = default_params(distance_km=500.0)
        stats = honest_statistics(make_config(1.0), params)
        assert stats.q_single == pytest.approx(0.5, abs=1e-3)
        assert stats.q_tot == pytest.approx(0.5, abs=1e-3)

    def test_against_series_reimplementation(self):
        for variant in Variant:
            for distance in (0.0, 20.0, 45.0):
                cfg = make_config(0.8, variant)
                params = default_params(distance_km=distance, mu=0.1)
                stats = honest_statistics(cfg, params)
                oracle = stats_by_series(cfg, params)
                for field, expected in oracle.items():
                    assert getattr(stats, field) == pytest.approx(expected, abs=1e-12), field

    def test_click_probabilities_sum(self):
        stats = honest_statistics(make_config(0.5), default_params(distance_km=25.0, mu=0.4))
        total = stats.p_click_v + stats.p_click_s + stats.p_click_m
        assert total == pytest.approx(stats.p_click_total, abs=1e-12)

    def test_qber_bounds_and_distance_monotonicity(self):
        cfg = make_config(0.7)
        params = default_params()
        prev_click, prev_q = None, None
        for distance in (0.0, 10.0, 20.0, 40.0, 80.0, 120.0):
            stats = honest_statistics(cfg, params.with_(distance_km=distance))
            assert params.e_d - 1e-12 <= stats.q_tot <= 0.5 + 1e-12
            if prev_click is not None:
                assert stats.p_click_total <= prev_click + 1e-15
                assert stats.q_tot >= prev_q - 1e-15
            prev_click, prev_q = stats.p_click_total, stats.q_tot

    def test_single_photon_accounting(self):
        for variant in Variant:
            cfg = make_config(0.45, variant)
            params = default_params(distance_km=15.0)
            stats = honest_statistics(cfg, params)
            arrived = apparatus_transmittance(cfg).survival * transmittance(params) * params.eta_det
            assert stats.p_lost + arrived == pytest.approx(1.0, abs=1e-12)


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            default_params().with_(eta_det=0.0)
        with pytest.raises(ValueError):
            default_params().with_(e_d=0.5)
        with pytest.raises(ValueError):
            default_params().with_(mu=0.0)
        with pytest.raises(ValueError):
            default_params().with_(f_ec=0.9)

    def test_parse_round_trip(self):
        text = """
        # fiber
        alpha_db_per_km = 0.18
        distance_km = 12.5
        eta_det = 0.1
        y0 = 1e-6
        e_d = 0.02
        f_ec = 1.1
        mu = 0.25
        """
        params = parse_params(text)
        assert params == ChannelParams(0.18, 12.5, 0.1, 1e-6, 0.02, 1.1, 0.25)

    def test_parse_partial_uses_defaults(self):
        params = parse_params("e_d = 0.01\n")
        assert params.e_d == 0.01
        assert params.alpha_db_per_km == default_params().alpha_db_per_km

    def test_parse_rejects_unknown_key(self):
        with pytest.raises(ValueError, match="unknown key"):
            parse_params("dark_rate = 1e-6\n")

    def test_parse_rejects_duplicates_and_garbage(self):
        with pytest.raises(ValueError, match="duplicate"):
            parse_params("mu = 0.1\nmu = 0.2\n")
        with pytest.raises(ValueError, match="key=value"):
            parse_params("just words\n")
