import numpy as np
import pytest

from src.core.errors import PoleError, PreconditionError
from src.core.linalg import identity, max_norm, spectral_radius
from src.splitting.icc import (
    IccVariant,
    SpectrumPair,
    circulant_spectrum,
    icc_sweep,
    iteration_matrix,
    rho_closed_form_as_printed,
    sigma_bound,
    sigma_factors,
    skew_circulant_spectrum,
    splitting_spectra,
    sweep_both_variants,
)
from src.splitting.toeplitz_split import (
    CirculantMatrix,
    SkewCirculantMatrix,
    dense_of_circulant,
    dense_of_skew_circulant,
    split,
    toeplitz_from_dense,
)

GRID = (5, 10, 20, 30, 50, 100, 200, 600, 1000, 20000, 40000, 50000, 60000)


def same_multiset(got, expected, tol):
    """Greedy matching of two eigenvalue lists."""
    remaining = list(expected)
    for value in got:
        distances = [abs(value - other) for other in remaining]
        k = int(np.argmin(distances))
        if distances[k] > tol:
            return False
        remaining.pop(k)
    return not remaining


@pytest.fixture(scope="module")
def identity_pair():
    return split(toeplitz_from_dense(identity(4)))


@pytest.fixture(scope="module")
def reference_sweep(ref_pair):
    return sweep_both_variants(ref_pair, GRID)


class TestSpectra:
    def test_constant_row(self):
        assert np.allclose(circulant_spectrum(CirculantMatrix(3, (2.5, 0, 0))), 2.5)
        assert np.allclose(skew_circulant_spectrum(SkewCirculantMatrix(3, (2.5, 0, 0))), 2.5)

    def test_cyclic_shift(self):
        got = circulant_spectrum(CirculantMatrix(4, (0, 1, 0, 0)))
        assert same_multiset(got, [1, 1j, -1, -1j], 1e-12)

    def test_skew_shift(self):
        got = skew_circulant_spectrum(SkewCirculantMatrix(4, (0, 1, 0, 0)))
        roots = [np.exp(1j * np.pi * (2 * k + 1) / 4) for k in range(4)]
        assert same_multiset(got, roots, 1e-12)

    def test_reference_pair(self, ref_pair):
        spectra = splitting_spectra(ref_pair)
        assert same_multiset(spectra.lam, np.linalg.eigvals(dense_of_circulant(ref_pair.a)), 1e-9)
        assert same_multiset(spectra.mu, np.linalg.eigvals(dense_of_skew_circulant(ref_pair.b)), 1e-9)

    def test_random_against_eigvals(self, random_toeplitz):
        for trial in range(200):
            pair = split(random_toeplitz(2 + trial % 15, hermitian=trial % 2 == 0))
            spectra = splitting_spectra(pair)
            assert same_multiset(spectra.lam, np.linalg.eigvals(dense_of_circulant(pair.a)), 1e-8)
            assert same_multiset(spectra.mu, np.linalg.eigvals(dense_of_skew_circulant(pair.b)), 1e-8)


class TestSigmaBound:
    def test_vanishes_at_shift(self, identity_pair):
        assert sigma_bound(splitting_spectra(identity_pair), 0.5) == 0.0

    def test_identity_split(self, identity_pair):
        assert sigma_bound(splitting_spectra(identity_pair), 1.5) == pytest.approx(0.25, abs=1e-15)

    def test_factors(self, ref_pair):
        spectra = splitting_spectra(ref_pair)
        fa, fb = sigma_factors(spectra, 5.0)
        assert fa * fb == sigma_bound(spectra, 5.0)
        assert fa == rho_closed_form_as_printed(spectra, 5.0)

    def test_scale_invariant(self, ref_pair):
        spectra = splitting_spectra(ref_pair)
        scaled = SpectrumPair(tuple(3.0 * x for x in spectra.lam), tuple(3.0 * x for x in spectra.mu))
        assert sigma_bound(scaled, 30.0) == pytest.approx(sigma_bound(spectra, 10.0), abs=1e-10)

    def test_pole(self):
        spectra = SpectrumPair((-2.0 + 1e-15, 1.0), (1.0, 1.0))
        with pytest.raises(PoleError):
            sigma_bound(spectra, 2.0)
        with pytest.raises(PoleError):
            rho_closed_form_as_printed(spectra, 2.0)

    def test_alpha_must_be_positive(self, ref_pair):
        with pytest.raises(PreconditionError):
            sigma_bound(splitting_spectra(ref_pair), 0.0)


class TestIterationMatrix:
    def test_identity_split_as_printed(self, identity_pair):
        r = iteration_matrix(identity_pair, 2.0, IccVariant.AS_PRINTED)
        assert max_norm(r - 0.6 * identity(4)) <= 1e-12

    def test_identity_split_cscs(self, identity_pair):
        r = iteration_matrix(identity_pair, 2.0, IccVariant.CSCS)
        assert max_norm(r - 0.36 * identity(4)) <= 1e-12

    @pytest.mark.parametrize("variant", list(IccVariant))
    def test_large_alpha_limit(self, ref_pair, variant):
        assert max_norm(iteration_matrix(ref_pair, 1e6, variant) - identity(4)) <= 1e-4

    def test_variant_parsing(self):
        assert IccVariant.parse("CSCS") is IccVariant.CSCS
        assert IccVariant.parse(IccVariant.AS_PRINTED) is IccVariant.AS_PRINTED
        with pytest.raises(PreconditionError):
            IccVariant.parse("both")


class TestBoundProperties:
    def test_as_printed_matches_closed_form(self, ref_pair, reference_sweep):
        spectra = splitting_spectra(ref_pair)
        for record in reference_sweep[IccVariant.AS_PRINTED]:
            assert record.rho == pytest.approx(rho_closed_form_as_printed(spectra, record.alpha), abs=1e-5)

    def test_as_printed_at_five(self, ref_pair):
        spectra = splitting_spectra(ref_pair)
        rho = spectral_radius(iteration_matrix(ref_pair, 5.0, IccVariant.AS_PRINTED)).value
        assert rho == pytest.approx(rho_closed_form_as_printed(spectra, 5.0), abs=1e-6)

    def test_cscs_bounded_by_sigma(self, reference_sweep):
        for record in reference_sweep[IccVariant.CSCS]:
            assert record.rho <= record.sigma + 1e-7
            assert 0.0 < record.sigma < 1.0

    def test_cscs_bounded_on_random_hermitian(self, random_toeplitz):
        checked = 0
        for trial in range(100):
            pair = split(random_toeplitz(2 + trial % 7, hermitian=True))
            spectra = splitting_spectra(pair)
            if min(np.real(spectra.lam + spectra.mu)) <= 0:
                continue
            for alpha in (0.5, 5.0, 50.0):
                sigma = sigma_bound(spectra, alpha)
                rho = np.max(np.abs(np.linalg.eigvals(iteration_matrix(pair, alpha, IccVariant.CSCS))))
                assert sigma < 1.0
                assert rho <= sigma + 1e-7
            checked += 1
        assert checked > 0

    def test_monotone_trend(self, reference_sweep):
        sigma = [r.sigma for r in reference_sweep[IccVariant.CSCS]]
        rho = [r.rho for r in reference_sweep[IccVariant.CSCS]]
        assert all(np.diff(sigma) > 0)
        assert all(np.diff(rho) > 0)
        assert all(0.0 < x <= 1.0 for x in rho)

    @pytest.mark.parametrize("variant", list(IccVariant))
    def test_identity_limit(self, ref_pair, variant):
        for alpha in (100.0, 200.0, 600.0, 1000.0, 20000.0):
            near, nearer = icc_sweep(ref_pair, [alpha, 10 * alpha], variant)
            assert nearer.distance_to_identity < near.distance_to_identity

    @pytest.mark.parametrize("variant", list(IccVariant))
    def test_converged_at_largest_alpha(self, ref_pair, variant):
        (record,) = icc_sweep(ref_pair, [60000], variant, eps_conv=1e-3)
        assert record.converged
        assert record.status == "zero correlations"
        assert record.correlation <= 1e-3


class TestSweep:
    def test_identity_split(self, identity_pair):
        records = icc_sweep(identity_pair, [0.5, 1.0, 9.5], IccVariant.AS_PRINTED)
        assert [r.alpha for r in records] == [0.5, 1.0, 9.5]
        for r in records:
            assert r.rho == pytest.approx((r.alpha - 0.5) / (r.alpha + 0.5), abs=1e-9)

    def test_zero_at_shift(self, identity_pair):
        (record,) = icc_sweep(identity_pair, [0.5])
        assert record.sigma == 0.0
        assert record.rho == 0.0
        assert not record.converged

    def test_records_follow_grid(self, reference_sweep):
        for variant, records in reference_sweep.items():
            assert [r.alpha for r in records] == [float(a) for a in GRID]
            assert all(r.variant is variant for r in records)

    def test_empty_grid(self, ref_pair):
        with pytest.raises(PreconditionError):
            icc_sweep(ref_pair, [])

    def test_negative_alpha(self, ref_pair):
        with pytest.raises(PreconditionError):
            icc_sweep(ref_pair, [5.0, -1.0])

    def test_pole_carries_alpha(self):
        pair = split(toeplitz_from_dense(-2.0 * identity(2)))
        with pytest.raises(PoleError) as info:
            icc_sweep(pair, [3.0, 1.0])
        assert info.value.alpha == 1.0
