"""
Iterative channel covariance R(alpha) built from a circulant/skew-circulant split.

Two forms of the four-factor product are supported:

    AS_PRINTED: (aI + B)^-1 (aI - A) (aI + A)^-1 (aI + B)
    CSCS:       (aI + B)^-1 (aI - A) (aI + A)^-1 (aI - B)

For AS_PRINTED the outer (aI + B) factors are a similarity transform, so the
spectral radius equals max_j |a - l_j| / |a + l_j| over the circulant
eigenvalues alone. For CSCS, A and B are normal and the radius is bounded by
sigma(a), the product of the two maximal shifted ratios.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.core.errors import PoleError, PreconditionError, SingularMatrixError, attach_context
from src.core.linalg import (
    dft,
    hermitize,
    identity,
    inverse,
    mat_mul,
    max_norm,
    spectral_radius,
)
from src.splitting.toeplitz_split import (
    CirculantMatrix,
    SkewCirculantMatrix,
    SplitPair,
    dense_of_circulant,
    dense_of_skew_circulant,
)

POLE_TOL = 1e-12
DEFAULT_EPS_CONV = 1e-3


class IccVariant(Enum):
    AS_PRINTED = "as-printed"
    CSCS = "cscs"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        try:
            return cls(str(text).strip().lower())
        except ValueError:
            choices = ", ".join(v.value for v in cls)
            raise PreconditionError(f"unknown ICC variant '{text}' (choose from {choices})") from None


@dataclass(frozen=True)
class SpectrumPair:
    lam: tuple
    mu: tuple


@dataclass(frozen=True)
class IccRecord:
    alpha: float
    sigma: float
    rho: float
    variant: IccVariant
    distance_to_identity: float
    converged: bool
    correlation: float
    rho_method: str = "power"

    @property
    def status(self) -> str:
        return "zero correlations" if self.converged else "correlations exist"


def circulant_spectrum(a: CirculantMatrix) -> np.ndarray:
    return dft(a.first_row)


def skew_circulant_spectrum(b: SkewCirculantMatrix) -> np.ndarray:
    # modulate by exp(i pi j / N) so the plain DFT lands on the odd 2N-th roots
    j = np.arange(b.n)
    return dft(np.asarray(b.first_row, dtype=np.complex128) * np.exp(1j * np.pi * j / b.n))


def splitting_spectra(pair: SplitPair) -> SpectrumPair:
    return SpectrumPair(
        tuple(complex(x) for x in circulant_spectrum(pair.a)),
        tuple(complex(x) for x in skew_circulant_spectrum(pair.b)),
    )


def _check_alpha(alpha):
    if not alpha > 0:
        raise PreconditionError(f"alpha must be positive, got {alpha}")


def _shifted_ratios(values, alpha: float) -> np.ndarray:
    values = np.asarray(values, dtype=np.complex128)
    denominators = np.abs(alpha + values)
    if np.any(denominators <= POLE_TOL):
        pole = values[int(np.argmin(denominators))]
        raise PoleError(f"eigenvalue {pole:.6g} sits on the pole -alpha = {-alpha:g}")
    return np.abs(alpha - values) / denominators


def sigma_factors(spectra: SpectrumPair, alpha: float):
    """
    Returns:
        tuple: (max_j |a - l_j| / |a + l_j|, max_j |a - m_j| / |a + m_j|)
    """
    _check_alpha(alpha)
    return (
        float(np.max(_shifted_ratios(spectra.lam, alpha))),
        float(np.max(_shifted_ratios(spectra.mu, alpha))),
    )


def sigma_bound(spectra: SpectrumPair, alpha: float) -> float:
    factor_a, factor_b = sigma_factors(spectra, alpha)
    return factor_a * factor_b


def rho_closed_form_as_printed(spectra: SpectrumPair, alpha: float) -> float:
    _check_alpha(alpha)
    return float(np.max(_shifted_ratios(spectra.lam, alpha)))


def iteration_matrix(pair: SplitPair, alpha: float, variant=IccVariant.AS_PRINTED) -> np.ndarray:
    _check_alpha(alpha)
    variant = IccVariant.parse(variant)
    n = pair.a.n
    shift = alpha * identity(n)
    a = dense_of_circulant(pair.a)
    b = dense_of_skew_circulant(pair.b)

    tail = shift + b if variant is IccVariant.AS_PRINTED else shift - b
    r = mat_mul(inverse(shift + b), shift - a)
    r = mat_mul(r, inverse(shift + a))
    return mat_mul(r, tail)


def correlation_coefficient(r) -> float:
    """Largest off-diagonal modulus of the Hermitian part of R(alpha)."""
    h = hermitize(r)
    if h.shape[0] == 1:
        return 0.0
    return max_norm(h - np.diag(np.diag(h)))


def icc_sweep(pair: SplitPair, alphas, variant=IccVariant.AS_PRINTED, eps_conv: float = DEFAULT_EPS_CONV) -> list:
    """
    Evaluates sigma(alpha), rho(R(alpha)) and the distance of R(alpha) from the
    identity at every alpha of the grid, in input order.

    Returns:
        list: one IccRecord per alpha.
    """
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise PreconditionError("alpha grid is empty")
    for alpha in alphas:
        _check_alpha(alpha)
    variant = IccVariant.parse(variant)
    spectra = splitting_spectra(pair)

    records = []
    for alpha in alphas:
        try:
            sigma = sigma_bound(spectra, alpha)
            r = iteration_matrix(pair, alpha, variant)
        except (PoleError, SingularMatrixError) as e:
            raise attach_context(e, alpha=alpha) from e
        radius = spectral_radius(r)
        distance = max_norm(r - identity(pair.a.n))
        records.append(IccRecord(
            alpha=alpha,
            sigma=sigma,
            rho=radius.value,
            variant=variant,
            distance_to_identity=distance,
            converged=distance <= eps_conv,
            correlation=correlation_coefficient(r),
            rho_method=radius.method,
        ))
    return records


def sweep_both_variants(pair: SplitPair, alphas, eps_conv: float = DEFAULT_EPS_CONV) -> dict:
    return {variant: icc_sweep(pair, alphas, variant, eps_conv) for variant in IccVariant}
