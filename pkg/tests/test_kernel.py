"""Tests for the oscillatory kernel, its regions, and the lemma checkers."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dispmax.errors import HypothesisError
from dispmax.filters import build_filter_bank
from dispmax.kernel import (
    KernelQuery,
    PhaseSpec,
    RegionLabel,
    SpaceTimePoint,
    classify_region,
    hls_bilinear_check,
    kernel_value,
    phase_value,
    split_u1_u2,
    standard_phases,
    van_der_corput_check,
)
from dispmax.spectral import DispersionProfile

PROFILE = DispersionProfile.power(2.0)
BANK = build_filter_bank(1)


def query(w, wp, lam=4.0, sigma=0.5, profile=PROFILE):
    return KernelQuery(w, wp, lam, sigma, profile, BANK)


class TestPhase:
    def test_hand_value(self):
        w = SpaceTimePoint(x=0.7, t=0.5, theta=0.4)
        wp = SpaceTimePoint(x=-0.3, t=0.0, theta=0.9)
        # shift = (0.7 + 0.3) + 0.5*0.4 - 0 = 1.2, dt = 0.5
        val = phase_value(1.0, w, wp, PROFILE)
        assert abs(val - (1.2 * 1.0 + 0.5 * 1.0)) < 1e-12

    def test_antisymmetric_under_swap(self):
        w = SpaceTimePoint(0.2, 0.3, 0.1)
        wp = SpaceTimePoint(-0.4, -0.2, 0.05)
        xi = np.linspace(0.5, 2.0, 11)
        assert np.allclose(
            phase_value(xi, w, wp, PROFILE), -phase_value(xi, wp, w, PROFILE), atol=1e-12
        )


class TestRegions:
    def test_hand_classified_triples(self):
        lam, sigma = 16.0, 0.5  # threshold 4*lam^(-sigma) = 1
        v1 = (SpaceTimePoint(0.1, 0.9, 0.0), SpaceTimePoint(0.0, 0.0, 0.0))
        v2 = (SpaceTimePoint(1.0, 0.1, 0.0), SpaceTimePoint(-0.5, 0.0, 0.0))
        v3 = (SpaceTimePoint(0.5, 0.05, 0.0), SpaceTimePoint(0.0, 0.0, 0.0))
        assert classify_region(*v1, lam, sigma) is RegionLabel.V1
        assert classify_region(*v2, lam, sigma) is RegionLabel.V2
        assert classify_region(*v3, lam, sigma) is RegionLabel.V3

    @given(
        x=st.floats(-1, 1), xp=st.floats(-1, 1),
        t=st.floats(-1, 1), tp=st.floats(-1, 1),
        lam_exp=st.integers(2, 10), sigma=st.floats(0.25, 1.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_labels_match_definition(self, x, xp, t, tp, lam_exp, sigma):
        lam = 2.0**lam_exp
        w, wp = SpaceTimePoint(x, t, 0.0), SpaceTimePoint(xp, tp, 0.0)
        label = classify_region(w, wp, lam, sigma)
        dx, dt = abs(x - xp), abs(t - tp)
        if dx < 4.0 * dt:
            assert label is RegionLabel.V1
        elif dx >= 4.0 * lam**-sigma:
            assert label is RegionLabel.V2
        else:
            assert label is RegionLabel.V3


class TestKernelValue:
    def test_diagonal_equals_cutoff_mass(self):
        w = SpaceTimePoint(0.3, 0.2, 0.1)
        k = kernel_value(query(w, w))
        assert abs(k.imag) < 1e-12
        assert abs(k.real - BANK.psi_sq_mass) < 1e-10

    def test_hermitian_symmetry(self):
        w = SpaceTimePoint(0.4, 0.6, 0.05)
        wp = SpaceTimePoint(-0.2, -0.3, 0.02)
        k1 = kernel_value(query(w, wp, lam=8.0))
        k2 = kernel_value(query(wp, w, lam=8.0))
        assert abs(k1 - np.conj(k2)) < 1e-10

    def test_trivial_bound(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            x, xp, t, tp = rng.uniform(-1, 1, 4)
            w, wp = SpaceTimePoint(x, t, 0.0), SpaceTimePoint(xp, tp, 0.0)
            k = kernel_value(query(w, wp, lam=16.0))
            assert abs(k) <= BANK.psi_sq_mass * (1 + 1e-9)

    def test_oracle_density_agrees(self):
        w = SpaceTimePoint(0.8, 0.7, 0.1)
        wp = SpaceTimePoint(-0.6, -0.5, 0.0)
        q = query(w, wp, lam=64.0)
        assert abs(kernel_value(q) - kernel_value(q, density=3)) < 1e-8

    def test_pure_shift_against_dense_trapezoid(self):
        # dt = 0 reduces the kernel to the Fourier transform of psi^2
        w = SpaceTimePoint(0.5, 0.3, 0.0)
        wp = SpaceTimePoint(-0.4, 0.3, 0.0)
        lam = 32.0
        shift = w.x - wp.x
        xi = np.linspace(-2.0, 2.0, 2**18 + 1)
        exact = np.trapezoid(BANK.psi(xi) ** 2 * np.exp(1j * shift * lam * xi), xi)
        k = kernel_value(query(w, wp, lam=lam))
        assert abs(k - exact) < 1e-7

    def test_rejects_small_lambda(self):
        w = SpaceTimePoint(0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            KernelQuery(w, w, 1.0, 0.5, PROFILE, BANK)


class TestU1U2Split:
    def test_time_diagonal_is_all_u1(self):
        w = SpaceTimePoint(0.5, 0.3, 0.1)
        wp = SpaceTimePoint(-0.5, 0.3, 0.0)
        pieces = split_u1_u2(w, wp, 8.0, PROFILE)
        assert [lab for _, lab in pieces] == ["U1", "U1"]

    def test_boundary_location(self):
        # |Phi'(lam xi)| = 2 lam |xi|; U1 boundary at shift / (4 dt lam)
        lam, dt, shift = 2.0, 0.5, 4.95
        w = SpaceTimePoint(shift / 2.0, dt / 2.0, 0.0)
        wp = SpaceTimePoint(-shift / 2.0, -dt / 2.0, 0.0)
        pieces = split_u1_u2(w, wp, lam, PROFILE)
        root = shift / (4.0 * dt * lam)  # = 1.2375
        by_lab = {(round(a, 6), round(b, 6)): lab for (a, b), lab in pieces}
        assert by_lab[(0.5, round(root, 6))] == "U1"
        assert by_lab[(round(root, 6), 2.0)] == "U2"
        assert by_lab[(-2.0, round(-root, 6))] == "U2"
        assert by_lab[(round(-root, 6), -0.5)] == "U1"

    def test_pieces_tile_the_support(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            x, xp, t, tp = rng.uniform(-1, 1, 4)
            w, wp = SpaceTimePoint(x, t, 0.0), SpaceTimePoint(xp, tp, 0.0)
            pieces = split_u1_u2(w, wp, 16.0, PROFILE)
            neg = [(a, b) for (a, b), _ in pieces if b <= -0.5 + 1e-12]
            pos = [(a, b) for (a, b), _ in pieces if a >= 0.5 - 1e-12]
            for part, (lo, hi) in ((neg, (-2.0, -0.5)), (pos, (0.5, 2.0))):
                part = sorted(part)
                assert part[0][0] == lo and part[-1][1] == hi
                for (_, b1), (a2, _) in zip(part, part[1:]):
                    assert abs(b1 - a2) < 1e-12


class TestVanDerCorput:
    def test_reference_phases_validate(self):
        lam_list = [2.0**e for e in range(4, 11)]
        for phase, k in standard_phases():
            rows = van_der_corput_check(phase, lam_list, k)
            ratios = [r[2] for r in rows]
            assert max(ratios) / min(ratios) < 10.0

    def test_linear_phase_ratio_is_flat(self):
        (lin, k), _, _ = standard_phases()
        rows = van_der_corput_check(lin, [2.0**e for e in range(4, 11)], k)
        ratios = [r[2] for r in rows]
        assert max(ratios) / min(ratios) < 1.1

    def test_offset_quadratic_decays_like_boundary_term(self):
        _, (quad, k), _ = standard_phases()
        rows = van_der_corput_check(quad, [2.0**e for e in range(4, 11)], k)
        # integral ~ lambda^(-1) so the lambda^(1/2)-normalized ratio
        # decays ~ lambda^(-1/2): factor 8 over a 2^6 span
        assert rows[0][2] / rows[-1][2] == pytest.approx(8.0, rel=0.15)

    def test_stationary_quadratic_hits_the_rate(self):
        _, _, (quad0, k) = standard_phases()
        rows = van_der_corput_check(quad0, [2.0**e for e in range(4, 11)], k)
        ratios = [r[2] for r in rows]
        assert max(ratios) / min(ratios) < 1.1

    def test_rejects_stationary_point_at_order_one(self):
        _, _, (quad0, _) = standard_phases()
        with pytest.raises(HypothesisError):
            van_der_corput_check(quad0, [16.0], 1)

    def test_rejects_bad_order(self):
        (lin, _), _, _ = standard_phases()
        with pytest.raises(ValueError):
            van_der_corput_check(lin, [16.0], 3)


class TestHlsBilinear:
    def test_constant_input_closed_form(self):
        # int_{[-1,1]^2} |x-y|^(-1/2) = 16*sqrt(2)/3; time averages are 1
        nx = 512
        g = np.ones((nx, 16))
        lhs, rhs, ratio = hls_bilinear_check(g, g, 2.0)
        exact = 4.0 * 16.0 * np.sqrt(2.0) / 3.0
        assert lhs < exact
        assert lhs == pytest.approx(exact, rel=0.05)
        assert rhs == pytest.approx(8.0, rel=1e-9)

    def test_separated_supports_obey_distance_bound(self):
        nx = 256
        x = -1.0 + (np.arange(nx) + 0.5) * (2.0 / nx)
        g = np.where(x < -0.5, 1.0, 0.0)[:, None] * np.ones((1, 8))
        h = np.where(x > 0.5, 1.0, 0.0)[:, None] * np.ones((1, 8))
        lhs, _, _ = hls_bilinear_check(g, h, 2.0)
        mass_g = 2.0 * 0.5  # int G = (time avg 2) * (x-measure 1/2)
        assert lhs <= mass_g * mass_g * 1.0  # |x - x'| >= 1 on the supports

    def test_zero_input(self):
        z = np.zeros((32, 4))
        lhs, rhs, ratio = hls_bilinear_check(z, z, 2.0)
        assert (lhs, rhs, ratio) == (0.0, 0.0, 0.0)

    def test_ratio_uniform_over_random_inputs(self):
        rng = np.random.default_rng(0)
        ratios = []
        for _ in range(25):
            g = rng.uniform(0.0, 1.0, (64, 16))
            h = rng.uniform(0.0, 1.0, (64, 16))
            ratios.append(hls_bilinear_check(g, h, 2.0)[2])
        assert max(ratios) / min(ratios) < 1.5

    def test_rejects_bad_shapes_and_q(self):
        with pytest.raises(ValueError):
            hls_bilinear_check(np.ones((8, 4)), np.ones((16, 4)), 2.0)
        with pytest.raises(ValueError):
            hls_bilinear_check(np.ones((8, 4)), np.ones((8, 4)), 0.5)
