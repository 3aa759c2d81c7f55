import numpy as np
import pytest

from chirp_glottal.errors import DegenerateInput, NumericalFailure
from chirp_glottal.polyroots import (
    RootSet,
    companion_roots,
    find_roots,
    modulated_dft,
    refine_roots,
    rootset_transform,
    verify_roots,
)
from chirp_glottal.radius import selection_bounds

from conftest import synthetic_frame
from oracles import (
    matched_relative_error,
    perturbation_bound,
    poly_from_roots,
    random_annulus_roots,
    spread_roots,
)


class TestFindRoots:
    def test_quadratic(self):
        rs = find_roots(np.array([1.0, -1.5, 0.5]))
        np.testing.assert_allclose(np.sort(rs.roots.real), [0.5, 1.0], atol=1e-14)
        assert rs.gain == 1.0
        assert rs.degree == 2

    def test_impulse_gives_origin_roots(self):
        x = np.zeros(9)
        x[0] = 1.0
        rs = find_roots(x)
        assert rs.degree == 8
        assert rs.gain == 1.0
        assert not np.any(rs.roots)

    def test_all_zero(self):
        with pytest.raises(DegenerateInput):
            find_roots(np.zeros(16))

    def test_too_short(self):
        with pytest.raises(DegenerateInput):
            find_roots(np.array([1.0]))

    def test_leading_zeros_are_delay(self):
        x = np.array([0.0, 0.0, 2.0, -3.0, 1.0])
        rs = find_roots(x)
        assert rs.delay == 2
        assert rs.gain == 2.0
        assert rs.degree == 2
        np.testing.assert_allclose(np.sort(rs.roots.real), [0.5, 1.0], atol=1e-14)

    def test_known_roots_degree_64_well_separated(self, rng):
        roots = spread_roots(rng, 64, 0.5, 2.0)
        c = poly_from_roots(roots).real
        rs = find_roots(c)
        assert matched_relative_error(rs.roots, roots) < 1e-6

    def test_known_roots_degree_64_at_conditioning_limit(self, rng):
        # random annulus draws can be ill-conditioned: rounding the
        # coefficients alone moves some roots by more than 1e-6, so the
        # error is checked against the first-order perturbation bound
        for _ in range(10):
            roots = random_annulus_roots(rng, 64)
            c = poly_from_roots(roots).real
            err = matched_relative_error(find_roots(c).roots, roots)
            bound = perturbation_bound(roots, c).max()
            assert err < max(1e-6, 64 * bound)

    def test_speech_frame_degree_500(self):
        frame, _ = synthetic_frame(0.6, 0.7, 60.0)
        rs = find_roots(frame)
        assert rs.degree >= 500
        assert rs.residual_max <= 1e-6
        assert verify_roots(frame, rs) <= 1e-6

    def test_conjugate_closure(self):
        frame, _ = synthetic_frame(0.5, 0.8, 100.0, "i", 0.2)
        r = find_roots(frame).roots
        d = np.abs(r[:, None] - np.conj(r)[None, :]).min(axis=1)
        assert np.all(d <= 1e-6 * np.maximum(np.abs(r), 1e-300))


class TestRefineRoots:
    def test_fixed_point(self):
        roots = np.array([0.5, -0.8, 1.5 + 0.5j, 1.5 - 0.5j])
        c = poly_from_roots(roots).real
        out = refine_roots(c, roots)
        assert np.max(np.abs(out - roots)) <= 1e-15

    def test_restores_perturbed_roots(self, rng):
        roots = spread_roots(rng, 32)
        c = poly_from_roots(roots).real
        start = roots + 1e-4 * (rng.standard_normal(32) + 1j * rng.standard_normal(32))
        out = refine_roots(c, start)
        assert matched_relative_error(out, roots) < 1e-10

    def test_double_root(self):
        c = poly_from_roots([0.9, 0.9]).real
        out = refine_roots(c, companion_roots(c))
        assert np.max(np.abs(out - 0.9)) < 1e-5

    @pytest.mark.parametrize("compensated", [False, True])
    def test_both_precisions_agree(self, rng, compensated):
        roots = spread_roots(rng, 40, 0.5, 2.0)
        c = poly_from_roots(roots).real
        out = refine_roots(c, companion_roots(c), compensated=compensated)
        assert matched_relative_error(out, roots) < 1e-9

    def test_non_finite_start(self):
        c = poly_from_roots([0.5, 2.0]).real
        with pytest.raises(NumericalFailure), np.errstate(invalid="ignore"):
            refine_roots(c, np.array([np.nan, 1.0]))


class TestVerifyRoots:
    def test_exact_degree_two(self):
        rs = RootSet(np.array([1.0, 0.5]), 1.0, 2)
        assert verify_roots(np.array([1.0, -1.5, 0.5]), rs) <= 1e-12

    def test_perturbed_root_detected(self, rng):
        roots = random_annulus_roots(rng, 16, 0.7, 1.4)
        x = poly_from_roots(roots).real
        rs = find_roots(x)
        bad = rs.roots.copy()
        bad[0] += 1e-3
        assert verify_roots(x, RootSet(bad, rs.gain, rs.degree)) > 1e-6

    def test_root_side_matches_modulated_dft(self):
        frame, _ = synthetic_frame(0.8, 0.65, 140.0, "u")
        rs = find_roots(frame)
        K = 1024
        for r in selection_bounds(len(frame)):
            z = r * np.exp(2j * np.pi * np.arange(K) / K)
            lhs = modulated_dft(frame.samples, r, K)
            rhs = rootset_transform(rs, z)
            assert np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)) < 1e-6

    def test_modulated_dft_folds_long_input(self, rng):
        x = rng.standard_normal(40)
        z = 1.02 * np.exp(2j * np.pi * np.arange(16) / 16)
        direct = np.array([np.sum(x * zk ** -np.arange(40)) for zk in z])
        np.testing.assert_allclose(modulated_dft(x, 1.02, 16), direct, rtol=1e-12, atol=1e-12)


class TestRootSet:
    def test_count_must_match_degree(self):
        with pytest.raises(ValueError):
            RootSet(np.zeros(3), 1.0, 4)

    def test_moduli(self):
        rs = RootSet(np.array([3 + 4j, -0.5]), 1.0, 2)
        np.testing.assert_allclose(rs.moduli, [5.0, 0.5])
