"""
Circulant / skew-circulant splitting of Toeplitz matrices.

A Toeplitz matrix R with entries R[i, j] = h_{i-j} is written R = A + B where
A = circ[a_0 .. a_{N-1}] is right circulant and B = [b_{j-i}] is skew right
circulant (b_{-j} = -b_{N-j}). The coefficients follow from matching the first
row and the wrapped entries:

    a_0 = b_0 = h_0 / 2
    a_j = (h_{-j} + h_{N-j}) / 2,  b_j = (h_{-j} - h_{N-j}) / 2,  j = 1..N-1
"""
from dataclasses import dataclass

import numpy as np

from src.core.errors import ShapeError, StructureError, SymmetryError
from src.core.linalg import as_matrix, max_norm

TOEPLITZ_TOL = 1e-10
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class ToeplitzCovariance:
    """
    Toeplitz matrix stored by its first column h_0..h_{N-1} (subdiagonals)
    and the tail of its first row h_{-1}..h_{-N+1} (superdiagonals).
    """
    n: int
    first_column: tuple
    first_row_tail: tuple
    hermitian: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ShapeError(f"Toeplitz order must be positive, got {self.n}")
        if len(self.first_column) != self.n or len(self.first_row_tail) != self.n - 1:
            raise ShapeError(
                f"order {self.n} needs {self.n} column and {self.n - 1} row-tail coefficients, "
                f"got {len(self.first_column)} and {len(self.first_row_tail)}"
            )
        if self.hermitian:
            if abs(self.first_column[0].imag) > SYMMETRY_TOL:
                raise SymmetryError(f"h_0 = {self.first_column[0]} is not real")
            for j in range(1, self.n):
                gap = abs(self.first_row_tail[j - 1] - self.first_column[j].conjugate())
                if gap > SYMMETRY_TOL:
                    raise SymmetryError(f"h_-{j} differs from conj(h_{j}) by {gap:.3e}")

    def h(self, k: int) -> complex:
        """Coefficient h_k for -(N-1) <= k <= N-1."""
        if k >= 0:
            return self.first_column[k]
        return self.first_row_tail[-k - 1]


@dataclass(frozen=True)
class CirculantMatrix:
    n: int
    first_row: tuple


@dataclass(frozen=True)
class SkewCirculantMatrix:
    n: int
    first_row: tuple


@dataclass(frozen=True)
class SplitPair:
    a: CirculantMatrix
    b: SkewCirculantMatrix
    source: ToeplitzCovariance


def _coefficients(values) -> tuple:
    return tuple(complex(v) for v in values)


def make_toeplitz(first_column, first_row_tail, hermitian=False) -> ToeplitzCovariance:
    first_column = _coefficients(first_column)
    return ToeplitzCovariance(len(first_column), first_column, _coefficients(first_row_tail), hermitian)


def toeplitz_from_dense(m, hermitian: bool = False) -> ToeplitzCovariance:
    m = as_matrix(m)
    n = m.shape[0]
    if m.shape[1] != n:
        raise ShapeError(f"Toeplitz matrix must be square, got {m.shape[0]}x{m.shape[1]}")

    for offset in range(-(n - 1), n):
        diagonal = np.diagonal(m, offset=offset)
        spread = max_norm(diagonal - diagonal[0])
        if spread > TOEPLITZ_TOL:
            raise StructureError(f"diagonal at offset {offset} is not constant (spread {spread:.3e})")

    return make_toeplitz(m[:, 0], m[0, 1:], hermitian)


def dense_of_toeplitz(r: ToeplitzCovariance) -> np.ndarray:
    # index k = i - j runs from -(N-1) to N-1; shift it into [0, 2N-2]
    lookup = np.array(list(reversed(r.first_row_tail)) + list(r.first_column), dtype=np.complex128)
    i = np.arange(r.n)
    return lookup[i[:, None] - i[None, :] + r.n - 1]


def split(r: ToeplitzCovariance) -> SplitPair:
    n = r.n
    half_h0 = r.h(0) / 2
    a = [half_h0]
    b = [half_h0]
    for j in range(1, n):
        upper, wrapped = r.h(-j), r.h(n - j)
        a.append((upper + wrapped) / 2)
        b.append((upper - wrapped) / 2)
    return SplitPair(CirculantMatrix(n, tuple(a)), SkewCirculantMatrix(n, tuple(b)), r)


def dense_of_circulant(a: CirculantMatrix) -> np.ndarray:
    row = np.asarray(a.first_row, dtype=np.complex128)
    i = np.arange(a.n)
    return row[(i[None, :] - i[:, None]) % a.n]


def dense_of_skew_circulant(b: SkewCirculantMatrix) -> np.ndarray:
    row = np.asarray(b.first_row, dtype=np.complex128)
    i = np.arange(b.n)
    offset = i[None, :] - i[:, None]
    return np.where(offset >= 0, 1.0, -1.0) * row[offset % b.n]


def reconstruct(pair: SplitPair) -> np.ndarray:
    return dense_of_circulant(pair.a) + dense_of_skew_circulant(pair.b)


def reconstruction_residual(pair: SplitPair) -> float:
    return max_norm(reconstruct(pair) - dense_of_toeplitz(pair.source))


# --- JSON documents ---------------------------------------------------------

def to_pairs(values) -> list:
    return [[float(np.real(v)), float(np.imag(v))] for v in values]


def from_pairs(pairs) -> tuple:
    try:
        return tuple(complex(float(re), float(im)) for re, im in pairs)
    except (TypeError, ValueError) as e:
        raise ShapeError(f"coefficients must be [re, im] pairs: {e}") from e


def matrix_to_pairs(m) -> list:
    return [to_pairs(row) for row in np.asarray(m)]


def matrix_from_pairs(rows) -> np.ndarray:
    return as_matrix([from_pairs(row) for row in rows])


def toeplitz_to_document(r: ToeplitzCovariance) -> dict:
    return {
        "n": r.n,
        "first_column": to_pairs(r.first_column),
        "first_row_tail": to_pairs(r.first_row_tail),
        "hermitian": r.hermitian,
    }


def toeplitz_from_document(doc: dict) -> ToeplitzCovariance:
    """Parses {"n", "first_column", "first_row_tail", "hermitian"?} into a ToeplitzCovariance."""
    try:
        n = int(doc["n"])
        column = from_pairs(doc["first_column"])
        tail = from_pairs(doc["first_row_tail"])
    except KeyError as e:
        raise ShapeError(f"Toeplitz document is missing field {e}") from e
    r = ToeplitzCovariance(len(column), column, tail, bool(doc.get("hermitian", False)))
    if r.n != n:
        raise ShapeError(f"document declares n={n} but carries {r.n} column coefficients")
    return r


def split_to_document(pair: SplitPair) -> dict:
    return {
        "n": pair.a.n,
        "source": toeplitz_to_document(pair.source),
        "a": to_pairs(pair.a.first_row),
        "b": to_pairs(pair.b.first_row),
        "dense_a": matrix_to_pairs(dense_of_circulant(pair.a)),
        "dense_b": matrix_to_pairs(dense_of_skew_circulant(pair.b)),
        "reconstruction_residual": reconstruction_residual(pair),
    }
