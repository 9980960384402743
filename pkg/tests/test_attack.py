import math

import numpy as np
import pytest

from conftest import random_density
from ubb84.attack import (
    InfeasibleError,
    chi_bar_of_params,
    constraint_set_qubit,
    constraint_set_realistic,
    grid_oracle,
    maximize_holevo_qubit,
    maximize_holevo_realistic,
    qubit_keyrate,
    qubit_keyrate_raw,
    re_f_from_Q,
)
from ubb84.protocol import Variant, make_config
from ubb84.qmath import binary_entropy
from ubb84.sifting import overall_holevo, symmetrize


class TestReFInversion:
    def test_pure_state_consistency(self):
        assert re_f_from_Q(0.5, 0.0, 0.0, 0.5, 0.0, 0.5) == pytest.approx(0.5)

    def test_fully_symmetric_errors(self):
        assert re_f_from_Q(0.5, 0.0, 0.0, 0.5, 0.5, 0.5) == pytest.approx(0.0)

    def test_direct_inversion(self):
        assert re_f_from_Q(0.5, 0.0, 0.0, 0.5, 0.1, 0.5) == pytest.approx(0.4)

    def test_roundtrip_with_error_rate(self):
        from ubb84.sifting import SymmetricState, error_rate_Q

        cfg = make_config(0.55)
        a, b, c, d = 0.5, cfg.xi - 0.5, 0.1, 1 - cfg.xi - 0.1
        re = re_f_from_Q(a, b, c, d, 0.07, cfg.xi)
        q, _ = error_rate_Q(SymmetricState(a=a, b=b, c=c, d=d, f=re), cfg)
        assert q == pytest.approx(0.07, abs=1e-12)


class TestChiBarFastPath:
    def test_matches_generic_route(self):
        # the optimizer's closed form must agree with the sift+Holevo matrix
        # route on symmetric states, for every variant
        rng = np.random.default_rng(77)
        for variant in Variant:
            for _ in range(12):
                cfg = make_config(rng.uniform(0.2, 1.0), variant)
                s = symmetrize(random_density(rng))
                fast = chi_bar_of_params(cfg, s.a, s.b, s.c, s.d, s.f)
                generic = overall_holevo(s.matrix(), cfg)
                assert fast == pytest.approx(generic, abs=1e-10)

    def test_even_in_im_f(self):
        cfg = make_config(0.7)
        up = chi_bar_of_params(cfg, 0.4, 0.15, 0.1, 0.35, 0.2 + 0.1j)
        down = chi_bar_of_params(cfg, 0.4, 0.15, 0.1, 0.35, 0.2 - 0.1j)
        assert up == pytest.approx(down, abs=1e-14)


class TestQubitOptimizer:
    def test_zero_error_balanced(self):
        assert maximize_holevo_qubit(make_config(1.0), 0.0).chi_max == pytest.approx(0.0, abs=1e-9)

    def test_zero_error_skewed(self):
        assert maximize_holevo_qubit(make_config(0.5), 0.0).chi_max == pytest.approx(0.0, abs=1e-9)

    def test_balanced_matches_binary_entropy(self):
        result = maximize_holevo_qubit(make_config(1.0), 0.05)
        assert result.chi_max == pytest.approx(binary_entropy(0.05), abs=1e-6)
        assert result.converged

    def test_chi_nondecreasing_in_error_rate(self):
        cfg = make_config(0.6)
        values = [maximize_holevo_qubit(cfg, q).chi_max for q in np.linspace(0.0, 0.25, 10)]
        for lo, hi in zip(values, values[1:]):
            assert hi >= lo - 1e-7

    def test_argmax_feasible(self):
        for kappa in (0.3, 1.0):
            cfg = make_config(kappa)
            cs = constraint_set_qubit(cfg, 0.06)
            s = maximize_holevo_qubit(cfg, 0.06).argmax
            assert cs.is_feasible(s.a, s.b, s.c, s.d, s.f, tol=1e-8)

    def test_imaginary_part_vanishes_at_optimum(self):
        # conjugation symmetry suggests Im f = 0; we optimize over it and
        # record that the optimizer lands there
        for kappa in (0.4, 0.8):
            s = maximize_holevo_qubit(make_config(kappa), 0.08).argmax
            assert abs(s.f.imag) < 1e-4

    def test_dominates_canonical_seed(self):
        cfg = make_config(0.5)
        q = 0.04
        result = maximize_holevo_qubit(cfg, q)
        xi = cfg.xi
        mix = 2 * q
        a = (1 - mix) * xi + mix * xi / 2
        b = mix * xi / 2
        c = mix * (1 - xi) / 2
        d = (1 - mix) * (1 - xi) + mix * (1 - xi) / 2
        re = re_f_from_Q(a, b, c, d, q, xi)
        if re * re <= a * d:
            assert result.chi_max >= chi_bar_of_params(cfg, a, b, c, d, re) - 1e-9

    def test_validates_inputs(self):
        with pytest.raises(ValueError):
            maximize_holevo_qubit(make_config(1.0), 0.5)
        with pytest.raises(ValueError):
            maximize_holevo_qubit(make_config(1.0), -0.01)


class TestRealisticOptimizer:
    def test_no_loss_matches_qubit(self):
        for kappa in (0.5, 1.0):
            cfg = make_config(kappa)
            qubit = maximize_holevo_qubit(cfg, 0.04).chi_max
            realistic = maximize_holevo_realistic(cfg, 0.04, 0.0).chi_max
            assert realistic == pytest.approx(qubit, abs=1e-6)

    def test_nondecreasing_in_loss(self):
        cfg = make_config(1.0)
        values = [maximize_holevo_realistic(cfg, 0.05, pl).chi_max for pl in (0.0, 0.5, 0.9)]
        for lo, hi in zip(values, values[1:]):
            assert hi >= lo - 1e-7

    def test_zero_error_still_zero(self):
        assert maximize_holevo_realistic(make_config(0.7), 0.0, 0.8).chi_max == pytest.approx(
            0.0, abs=1e-9
        )

    def test_argmax_feasible(self):
        cfg = make_config(0.5)
        cs = constraint_set_realistic(cfg, 0.03, 0.7)
        s = maximize_holevo_realistic(cfg, 0.03, 0.7).argmax
        assert cs.is_feasible(s.a, s.b, s.c, s.d, s.f, tol=1e-8)

    def test_grid_oracle_agreement(self):
        cfg = make_config(0.5)
        result = maximize_holevo_realistic(cfg, 0.02, 0.5, oracle_resolution=30)
        assert result.oracle_gap is not None
        assert result.oracle_gap >= -1e-6  # optimizer dominates the grid
        assert abs(result.oracle_gap) <= 2e-3


class TestGridOracle:
    def test_balanced_anchor(self):
        cfg = make_config(1.0)
        chi, _ = grid_oracle(cfg, constraint_set_qubit(cfg, 0.05), 50)
        assert chi == pytest.approx(binary_entropy(0.05), abs=2e-3)

    def test_never_beats_optimizer(self):
        for kappa in (0.3, 0.8):
            cfg = make_config(kappa)
            cs = constraint_set_qubit(cfg, 0.05)
            chi_grid, arg = grid_oracle(cfg, cs, 25)
            chi_opt = maximize_holevo_qubit(cfg, 0.05).chi_max
            assert chi_grid <= chi_opt + 1e-6
            assert cs.is_feasible(arg.a, arg.b, arg.c, arg.d, arg.f, tol=1e-8)

    def test_uncorrelated_point_at_full_noise(self):
        # at Q = 1/2 the balanced problem reaches chi-bar = 1 at the
        # uncorrelated state; at kappa < 1 that state evaluates to h(xi)
        # and the maximum lies slightly above it
        cfg = make_config(1.0)
        chi, _ = grid_oracle(cfg, constraint_set_qubit(cfg, 0.4999999), 25)
        assert chi == pytest.approx(1.0, abs=1e-5)
        cfg = make_config(0.5)
        xi = cfg.xi
        product_chi = chi_bar_of_params(cfg, xi / 2, xi / 2, (1 - xi) / 2, (1 - xi) / 2, 0.0)
        assert product_chi == pytest.approx(binary_entropy(xi), abs=1e-12)
        chi_skew, _ = grid_oracle(cfg, constraint_set_qubit(cfg, 0.4999999), 25)
        assert chi_skew >= product_chi - 1e-9

    def test_rejects_low_resolution(self):
        cfg = make_config(1.0)
        with pytest.raises(ValueError):
            grid_oracle(cfg, constraint_set_qubit(cfg, 0.05), 10)


class TestQubitKeyrate:
    def test_perfect_correlations(self):
        assert qubit_keyrate(make_config(1.0), 0.0) == pytest.approx(1.0, abs=1e-9)

    def test_balanced_analytic(self):
        assert qubit_keyrate(make_config(1.0), 0.05) == pytest.approx(0.4272, abs=1e-3)

    def test_threshold_region(self):
        assert qubit_keyrate(make_config(1.0), 0.11) <= 1e-3

    def test_raw_sign_preserved(self):
        raw, _ = qubit_keyrate_raw(make_config(1.0), 0.14)
        assert raw < 0.0
        assert qubit_keyrate(make_config(1.0), 0.14) == 0.0

    def test_nondecreasing_in_kappa(self):
        for q in (0.01, 0.05):
            rates = [qubit_keyrate(make_config(k), q) for k in (0.3, 0.6, 1.0)]
            for lo, hi in zip(rates, rates[1:]):
                assert hi >= lo - 1e-6
