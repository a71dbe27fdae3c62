"""
Dense complex linear algebra for desk-scale matrices (N <= 64).

Matrices are 2-D numpy arrays of dtype complex128. Factorizations are written
out here (LU with partial pivoting, Cholesky, cyclic complex Jacobi, power
iteration) so that every tolerance used by the splitting and capacity code is
under our control; numpy supplies storage and vectorised row updates only.
"""
from dataclasses import dataclass

import numpy as np

from src.core.errors import (
    DefinitenessError,
    NotPsdError,
    NumericalError,
    PreconditionError,
    ShapeError,
    SingularMatrixError,
)

PIVOT_RTOL = 1e-13
CHOLESKY_RTOL = 1e-13
HERMITIAN_TOL = 1e-9
PSD_TOL = 1e-9
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 64

POWER_TOL = 1e-9
POWER_MAX_ITER = 100_000
POWER_START_SEED = 20_240_917
GELFAND_SQUARINGS = 30


def as_matrix(m) -> np.ndarray:
    """Returns `m` as a finite 2-D complex128 array (copying only when needed)."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise PreconditionError("matrix contains NaN or Inf entries")
    return arr


def _require_square(a: np.ndarray, op: str):
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"{op} needs a square matrix, got {a.shape[0]}x{a.shape[1]}")


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def max_norm(a) -> float:
    return float(np.max(np.abs(a)))


def mat_mul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}")
    return a @ b


def conj_transpose(a) -> np.ndarray:
    return np.ascontiguousarray(as_matrix(a).conj().T)


def hermitize(a) -> np.ndarray:
    """(A + A^H) / 2. Exact (bit-for-bit) when A is already Hermitian."""
    a = as_matrix(a)
    _require_square(a, "hermitize")
    return (a + a.conj().T) / 2


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    a = as_matrix(a)
    return a.shape[0] == a.shape[1] and max_norm(a - a.conj().T) <= tol


def _lu_decompose(a: np.ndarray):
    """
    Doolittle LU with partial pivoting, P A = L U, packed into one array.

    Returns:
        tuple: (lu, perm, sign, singular) where `perm` lists the source row of
        each row of P A and `singular` is True when some pivot fell below
        PIVOT_RTOL * max|a|. Elimination is skipped on such columns.
    """
    n = a.shape[0]
    lu = a.copy()
    perm = np.arange(n)
    sign = 1.0
    threshold = PIVOT_RTOL * max_norm(a)
    singular = threshold == 0.0

    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
            sign = -sign
        pivot = lu[k, k]
        if abs(pivot) <= threshold:
            singular = True
            continue
        lu[k + 1:, k] /= pivot
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])

    return lu, perm, sign, singular


def inverse(a) -> np.ndarray:
    a = as_matrix(a)
    _require_square(a, "inverse")
    lu, perm, _, singular = _lu_decompose(a)
    if singular:
        raise SingularMatrixError(f"matrix is singular to tolerance {PIVOT_RTOL:g} x max|entry|")

    n = a.shape[0]
    x = identity(n)[perm]
    # forward substitution with unit-diagonal L
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
    return x


def det_lu(a) -> complex:
    """Determinant as the signed product of LU pivots; 0 for singular input."""
    a = as_matrix(a)
    _require_square(a, "det_lu")
    lu, _, sign, singular = _lu_decompose(a)
    if singular:
        return 0j
    return complex(sign * np.prod(np.diag(lu)))


def cholesky(a) -> np.ndarray:
    """Lower-triangular L with A = L L^H for Hermitian positive definite A."""
    a = as_matrix(a)
    _require_square(a, "cholesky")
    if not is_hermitian(a):
        raise PreconditionError("cholesky needs a Hermitian matrix")

    n = a.shape[0]
    L = np.zeros_like(a)
    threshold = CHOLESKY_RTOL * float(np.max(np.abs(np.diag(a))))
    for k in range(n):
        d = a[k, k].real - float(np.sum(np.abs(L[k, :k]) ** 2))
        if d <= threshold:
            raise DefinitenessError(f"non-positive Cholesky pivot {d:.3e} at column {k}")
        L[k, k] = np.sqrt(d)
        L[k + 1:, k] = (a[k + 1:, k] - L[k + 1:, :k] @ L[k, :k].conj()) / L[k, k].real
    return L


def log2_det_hermitian_pd(a) -> float:
    L = cholesky(a)
    return float(2.0 * np.sum(np.log2(np.diag(L).real)))


def log2_det_hermitian_pd_stack(stack) -> np.ndarray:
    """
    log2 det of every matrix in a (T, n, n) stack of Hermitian PD matrices.

    Same column-by-column Cholesky as `cholesky`, vectorised over the leading
    axis. A failing pivot raises DefinitenessError with `.index` set to the
    position of the first offending matrix.
    """
    stack = np.asarray(stack, dtype=np.complex128)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise ShapeError(f"expected a (T, n, n) stack, got shape {stack.shape}")
    stack = (stack + stack.conj().transpose(0, 2, 1)) / 2

    n = stack.shape[1]
    L = np.zeros_like(stack)
    threshold = CHOLESKY_RTOL * np.max(np.abs(np.diagonal(stack, axis1=1, axis2=2)), axis=1)
    for k in range(n):
        d = stack[:, k, k].real - np.sum(np.abs(L[:, k, :k]) ** 2, axis=1)
        bad = np.flatnonzero(d <= threshold)
        if bad.size:
            err = DefinitenessError(f"non-positive Cholesky pivot at column {k} of matrix {bad[0]}")
            err.index = int(bad[0])
            raise err
        root = np.sqrt(d)
        L[:, k, k] = root
        L[:, k + 1:, k] = (
            stack[:, k + 1:, k] - np.einsum("tij,tj->ti", L[:, k + 1:, :k], L[:, k, :k].conj())
        ) / root[:, None]
    return 2.0 * np.sum(np.log2(np.diagonal(L, axis1=1, axis2=2).real), axis=1)


def log2_abs_det(a) -> float:
    """log2 |det A| through LU; -inf for singular input."""
    d = det_lu(a)
    return float(np.log2(abs(d))) if d != 0 else float("-inf")


def hermitian_eig(a):
    """
    Cyclic complex Jacobi eigensolver.

    Each rotation first removes the phase of a[p, q] with a diagonal unitary,
    then applies the real Jacobi rotation that zeroes the now-real entry.

    Returns:
        tuple: (eigenvalues ascending as a float array, unitary eigenvector matrix
        whose columns follow the same order).
    """
    a = as_matrix(a)
    _require_square(a, "hermitian_eig")
    if not is_hermitian(a):
        raise PreconditionError("hermitian_eig needs a Hermitian matrix")

    n = a.shape[0]
    work = hermitize(a)
    v = identity(n)
    tol = JACOBI_TOL * max(1.0, float(np.linalg.norm(work)))

    for _ in range(JACOBI_MAX_SWEEPS):
        off = float(np.linalg.norm(work - np.diag(np.diag(work))))
        if off <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                theta = (work[q, q].real - work[p, p].real) / (2.0 * mag)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])

                idx = [p, q]
                work[:, idx] = work[:, idx] @ rot
                work[idx, :] = rot.conj().T @ work[idx, :]
                v[:, idx] = v[:, idx] @ rot
                work[p, q] = work[q, p] = 0.0
                work[p, p] = work[p, p].real
                work[q, q] = work[q, q].real
    else:
        raise NumericalError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")

    eigenvalues = np.diag(work).real.copy()
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], v[:, order]


def psd_sqrt(a) -> np.ndarray:
    """Hermitian square root; eigenvalues in [-PSD_TOL, 0) are clamped to 0."""
    w, v = hermitian_eig(a)
    if w[0] < -PSD_TOL:
        raise NotPsdError(f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    root = np.sqrt(np.clip(w, 0.0, None))
    return hermitize((v * root) @ v.conj().T)


def psd_project(a) -> np.ndarray:
    """
    Hermitian part of `a` with negative eigenvalues clamped to zero.

    Returns the Hermitian part itself, untouched, when it is already PSD, so an
    exactly Hermitian PSD input comes back bit-for-bit.
    """
    h = hermitize(a)
    w, v = hermitian_eig(h)
    if w[0] >= 0.0:
        return h
    return hermitize((v * np.clip(w, 0.0, None)) @ v.conj().T)


@dataclass(frozen=True)
class SpectralRadius:
    value: float
    converged: bool
    method: str
    iterations: int


def _power_start(n: int) -> np.ndarray:
    rng = np.random.default_rng(POWER_START_SEED)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return x / np.linalg.norm(x)


def _gelfand_radius(a: np.ndarray) -> float:
    # ||A^(2^k)||^(1/2^k) with the running matrix renormalised after each squaring
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return 0.0
    q = a / scale
    log_norm = np.log(scale)
    for _ in range(GELFAND_SQUARINGS):
        q = q @ q
        nq = float(np.linalg.norm(q))
        if nq == 0.0:
            return 0.0
        q /= nq
        log_norm = 2.0 * log_norm + np.log(nq)
    return float(np.exp(log_norm / 2.0 ** GELFAND_SQUARINGS))


def spectral_radius(a) -> SpectralRadius:
    """
    Largest eigenvalue modulus of a general square matrix.

    Power iteration from a fixed complex start vector; converged once the
    Rayleigh-quotient modulus moves by at most POWER_TOL between steps and the
    eigen-residual has dropped below POWER_TOL relative to |A x|. Otherwise
    (tied or clustered dominant moduli) the Gelfand formula is evaluated by
    repeated squaring.
    """
    a = as_matrix(a)
    _require_square(a, "spectral_radius")

    x = _power_start(a.shape[0])
    previous = None
    for it in range(1, POWER_MAX_ITER + 1):
        y = a @ x
        ny = float(np.linalg.norm(y))
        if ny == 0.0:
            return SpectralRadius(0.0, True, "power", it)
        quotient = np.vdot(x, y)
        modulus = abs(quotient)
        residual = float(np.linalg.norm(y - quotient * x))
        if previous is not None and abs(modulus - previous) <= POWER_TOL and residual <= POWER_TOL * ny:
            return SpectralRadius(float(modulus), True, "power", it)
        previous = modulus
        x = y / ny

    return SpectralRadius(_gelfand_radius(a), False, "gelfand", POWER_MAX_ITER)


def dft(v) -> np.ndarray:
    """X_k = sum_j v_j exp(+2 pi i j k / N), evaluated directly in O(N^2)."""
    v = np.asarray(v, dtype=np.complex128).ravel()
    n = v.size
    if n < 1:
        raise ShapeError("dft needs at least one sample")
    k = np.arange(n)
    return np.exp(2j * np.pi * (np.outer(k, k) % n) / n) @ v


def inverse_dft(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128).ravel()
    return np.conj(dft(np.conj(x))) / x.size
