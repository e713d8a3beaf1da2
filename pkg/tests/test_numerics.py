import cmath
import math

import numpy as np
import pytest

from cyclemodes.errors import NumericalError
from cyclemodes.numerics import (
    RngStream,
    dft_at_frequency,
    dft_forward,
    dft_inverse,
    eig_symmetric,
    summary_stats,
)


def slow_dft(x):
    """Independent oracle: literal complex summation of the definition."""
    L = len(x)
    out = []
    for k in range(L):
        acc = 0j
        for j, xj in enumerate(x):
            acc += xj * cmath.exp(2j * cmath.pi * k * j / L)
        out.append(acc / math.sqrt(L))
    return np.array(out)


class TestDftForward:
    def test_zero_input(self):
        assert np.allclose(dft_forward(np.zeros(8)), 0.0)

    def test_pure_cosine_concentrates_power(self):
        # closed form: cos(2*pi*3*j/12) has coefficient sqrt(12)/2 at k=3, 9
        j = np.arange(12)
        x = np.cos(2 * np.pi * 3 * j / 12)
        coeffs = dft_forward(x)
        assert abs(coeffs[3] - math.sqrt(12) / 2) < 1e-10
        assert abs(coeffs[9] - math.sqrt(12) / 2) < 1e-10
        power = np.abs(coeffs) ** 2
        assert abs(power[3] - 3.0) < 1e-10
        assert abs(power[9] - 3.0) < 1e-10
        others = np.delete(power, [3, 9])
        assert np.all(others < 1e-10)

    def test_matches_slow_oracle(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal(17)
        assert np.allclose(dft_forward(x), slow_dft(x), atol=1e-12)

    def test_normality_relation(self):
        # zero-mean unit-variance series of length 239: sum |x~|^2 = 239
        rng = np.random.default_rng(5)
        x = rng.standard_normal(239)
        x = (x - x.mean()) / x.std()
        assert abs(np.sum(np.abs(dft_forward(x)) ** 2) - 239.0) < 1e-8

    def test_parseval(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal(101)
        total = np.sum(x**2)
        assert abs(np.sum(np.abs(dft_forward(x)) ** 2) - total) < 1e-10 * total

    def test_conjugate_symmetry(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal(40)
        coeffs = dft_forward(x)
        for k in range(1, 40):
            assert abs(np.conj(coeffs[k]) - coeffs[40 - k]) < 1e-12

    def test_round_trip(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal(59)
        rec = dft_inverse(dft_forward(x))
        assert np.max(np.abs(rec.real - x)) < 1e-10
        assert np.max(np.abs(rec.imag)) < 1e-10

    def test_matrix_input_transforms_columns(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal((31, 4))
        coeffs = dft_forward(x)
        assert coeffs.shape == (31, 4)
        assert np.allclose(coeffs[:, 2], dft_forward(x[:, 2]))

    def test_too_short(self):
        with pytest.raises(ValueError):
            dft_forward([1.0])

    def test_non_finite(self):
        with pytest.raises(ValueError):
            dft_forward([1.0, np.nan, 2.0])


class TestDftAtFrequency:
    def test_zero_frequency_of_zero_mean_series(self):
        rng = np.random.default_rng(10)
        x = rng.standard_normal(50)
        x -= x.mean()
        assert abs(dft_at_frequency(x, 0.0)) < 1e-12

    def test_grid_coincidence(self):
        rng = np.random.default_rng(12)
        x = rng.standard_normal(239)
        omega4 = 2 * np.pi * 4 / 239
        assert abs(dft_at_frequency(x, omega4) - dft_forward(x)[4]) < 1e-10

    def test_vectorized_omega(self):
        rng = np.random.default_rng(13)
        x = rng.standard_normal(60)
        omegas = np.array([0.1, 0.2, 0.3])
        out = dft_at_frequency(x, omegas)
        assert out.shape == (3,)
        assert abs(out[1] - dft_at_frequency(x, 0.2)) < 1e-14

    def test_rejects_bad_omega(self):
        with pytest.raises(ValueError):
            dft_at_frequency([1.0, 2.0], np.inf)


def char_poly_eigs_3x3(c):
    """Independent oracle: roots of the characteristic polynomial."""
    a = -1.0
    b = np.trace(c)
    cc = -0.5 * (np.trace(c) ** 2 - np.trace(c @ c))
    d = np.linalg.det(c)
    roots = np.roots([a, b, cc, d])
    return np.sort(roots.real)[::-1]


class TestEigSymmetric:
    def test_identity(self):
        res = eig_symmetric(np.eye(63))
        assert np.allclose(res.eigenvalues, 1.0)

    def test_two_by_two_closed_form(self):
        res = eig_symmetric(np.array([[1.0, 0.5], [0.5, 1.0]]))
        assert np.allclose(res.eigenvalues, [1.5, 0.5])

    def test_matches_characteristic_polynomial_oracle(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            a = rng.standard_normal((3, 3))
            c = 0.5 * (a + a.T)
            res = eig_symmetric(c)
            assert np.allclose(res.eigenvalues, char_poly_eigs_3x3(c), atol=1e-8)

    def test_orthonormal_and_reconstructs(self):
        rng = np.random.default_rng(22)
        a = rng.standard_normal((40, 40))
        c = 0.5 * (a + a.T)
        res = eig_symmetric(c)
        v = res.eigenvectors
        assert np.max(np.abs(v.T @ v - np.eye(40))) < 1e-10
        rebuilt = (v * res.eigenvalues) @ v.T
        assert np.max(np.abs(rebuilt - c)) < 1e-8

    def test_trace_preserved(self):
        rng = np.random.default_rng(23)
        a = rng.standard_normal((30, 30))
        c = 0.5 * (a + a.T)
        res = eig_symmetric(c)
        assert abs(res.eigenvalues.sum() - np.trace(c)) < 1e-10 * abs(np.trace(c))

    def test_sorted_descending(self):
        rng = np.random.default_rng(24)
        a = rng.standard_normal((15, 15))
        res = eig_symmetric(0.5 * (a + a.T))
        assert np.all(np.diff(res.eigenvalues) <= 1e-12)

    def test_sign_convention_over_block(self):
        # eigenvector of [[2,1],[1,2]] along (1,1): block {0} forces +
        res = eig_symmetric(np.array([[2.0, 1.0], [1.0, 2.0]]), sign_indices=[0])
        assert res.eigenvectors[0, 0] > 0
        assert res.eigenvectors[0, 1] > 0

    def test_sign_tiebreak_first_nonzero(self):
        # eigenvector (1,-1)/sqrt(2) has zero mean; first component must be +
        res = eig_symmetric(np.array([[2.0, -1.0], [-1.0, 2.0]]))
        lead = res.eigenvectors[:, 0]
        assert lead[0] > 0

    def test_rejects_non_symmetric(self):
        with pytest.raises(ValueError):
            eig_symmetric(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_numerical_error_is_local_type(self):
        assert issubclass(NumericalError, RuntimeError)


class TestSummaryStats:
    def test_constant_samples(self):
        s = summary_stats([1.0, 1.0, 1.0, 1.0])
        assert s.mean == 1.0 and s.std == 0.0
        assert s.ci_low == 1.0 and s.ci_high == 1.0

    def test_two_point_mean(self):
        assert summary_stats([0.0, 1.0], ci_level=0.95).mean == 0.5

    def test_empirical_quantiles(self):
        rng = np.random.default_rng(31)
        samples = rng.standard_normal(5000)
        s = summary_stats(samples, ci_level=0.9)
        lo, hi = np.quantile(samples, [0.05, 0.95])
        assert s.ci_low == pytest.approx(lo)
        assert s.ci_high == pytest.approx(hi)
        assert s.std == pytest.approx(samples.std(ddof=1))

    def test_rejects_single_sample(self):
        with pytest.raises(ValueError):
            summary_stats([1.0])

    def test_rejects_bad_level(self):
        with pytest.raises(ValueError):
            summary_stats([1.0, 2.0], ci_level=1.0)


class TestRngStream:
    def test_reproducible(self):
        a = RngStream(123, 4).generator().standard_normal(10)
        b = RngStream(123, 4).generator().standard_normal(10)
        assert np.array_equal(a, b)

    def test_streams_distinct(self):
        a = RngStream(123, 0).generator().standard_normal(10)
        b = RngStream(123, 1).generator().standard_normal(10)
        assert not np.array_equal(a, b)

    def test_substream_reproducible_and_distinct(self):
        s = RngStream(9)
        a1 = s.substream(7).standard_normal(5)
        a2 = s.substream(7).standard_normal(5)
        b = s.substream(8).standard_normal(5)
        assert np.array_equal(a1, a2)
        assert not np.array_equal(a1, b)

    def test_rejects_bad_seed(self):
        with pytest.raises(ValueError):
            RngStream(-1)
