"""Truncated number-basis matrices for the positive discrete series.

Generators act on the lowest-weight basis |k,0> .. |k,dim-1>:

    K3 |k,n> = (n + k) |k,n>
    K+ |k,n> = omega * sqrt((2k + n)(n + 1)) |k,n+1>
    K- |k,n> = (1/omega) * sqrt((2k + n - 1) n) |k,n-1>

with K1 = (K+ + K-)/2 and K2 = (K+ - K-)/(2i).  Everything here is a
compression P.Op.P onto the first ``dim`` states.  Compressions of band
operators are exact except near the cut, so algebraic identities are asserted
on an interior window that excludes the last few rows and columns; the window
size travels with the operator as ``interior_margin``.

Entries are stored in extended precision (``np.clongdouble``).  The ladder
amplitudes are square roots whose double rounding alone contributes
~|entry|^2 * 1e-16 to commutator residuals, which at dim = 256 is ~1e-11 and
would drown the algebra checks; 80-bit storage pushes that floor below
1e-13.  Products of banded operators are formed diagonal-by-diagonal, which
both respects the extended width (BLAS would silently downcast) and is far
cheaper than dense multiplication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, DomainError
from .specfun import ln_gamma

__all__ = [
    "RepLabel",
    "NumberState",
    "TruncatedOperator",
    "FluctuationRecord",
    "build_k3",
    "build_kplus",
    "build_kminus",
    "build_k1",
    "build_k2",
    "casimir",
    "banded_matmul",
    "commutator_residual",
    "fluctuation_closed_forms",
    "ladder_norm",
    "ladder_log_norm",
    "csv_lines",
    "json_envelope",
]

GROUP_TAGS = ("SO12", "SU11", "UniversalCover")

_INT_TOL = 1e-12


def _is_integral(x: float) -> bool:
    return abs(x - round(x)) <= _INT_TOL


@dataclass(frozen=True)
class RepLabel:
    """Representation label: Bargmann index k, phase convention, group.

    The group tag restricts which k give single-valued representations:
    SO12 needs integer k, SU11 needs 2k integer, and the universal cover
    places no restriction beyond k > 0.
    """

    k: float
    omega: complex = 1.0 + 0.0j
    group_tag: str = "UniversalCover"

    def __post_init__(self) -> None:
        if not self.k > 0.0:
            raise DomainError(f"Bargmann index must be positive, got k={self.k}")
        if abs(abs(self.omega) - 1.0) > 1e-12:
            raise DomainError(f"omega must have unit modulus, got |omega|={abs(self.omega)}")
        if self.group_tag not in GROUP_TAGS:
            raise DomainError(f"group_tag must be one of {GROUP_TAGS}, got {self.group_tag!r}")
        if self.group_tag == "SO12" and not (_is_integral(self.k) and self.k >= 1.0):
            raise DomainError(f"SO12 requires integer k >= 1, got k={self.k}")
        if self.group_tag == "SU11" and not _is_integral(2.0 * self.k):
            raise DomainError(f"SU11 requires 2k integer, got k={self.k}")

    @property
    def q(self) -> float:
        """Casimir eigenvalue k(1 - k)."""
        return self.k * (1.0 - self.k)


@dataclass(frozen=True)
class NumberState:
    """Basis state |k,n>; K3 eigenvalue is n + k."""

    k: float
    n: int

    def __post_init__(self) -> None:
        if not self.k > 0.0:
            raise DomainError(f"NumberState requires k > 0, got k={self.k}")
        if self.n < 0:
            raise DomainError(f"NumberState requires n >= 0, got n={self.n}")

    @property
    def k3_eigenvalue(self) -> float:
        return self.n + self.k


@dataclass(frozen=True)
class TruncatedOperator:
    """Compression of an operator onto the first ``dim`` number states.

    Parameters
    ----------
    dim : int
        Basis size; entries act on |k,0> .. |k,dim-1>.
    k : float
        Bargmann index of the carrying representation.
    entries : array-like, dim x dim
        Matrix elements; converted to read-only extended precision.
    bandwidth : int
        Number of off-diagonals carrying data (0 diagonal, 1 tridiagonal);
        entries beyond it must vanish.
    interior_margin : int
        Trailing rows/columns possibly polluted by the truncation cut.
    name : str
        Label used by the serialization envelope.
    omega : complex
        Phase convention the entries were built with.
    """

    dim: int
    k: float
    entries: np.ndarray
    bandwidth: int
    interior_margin: int = 0
    name: str = ""
    omega: complex = 1.0 + 0.0j

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise DomainError(f"dim must be >= 1, got {self.dim}")
        if not self.k > 0.0:
            raise DomainError(f"k must be positive, got {self.k}")
        if not 0 <= self.bandwidth:
            raise DomainError(f"bandwidth must be >= 0, got {self.bandwidth}")
        if not 0 <= self.interior_margin < self.dim:
            raise DomainError(
                f"interior_margin must lie in [0, dim), got {self.interior_margin} for dim {self.dim}"
            )
        arr = np.array(self.entries, dtype=np.clongdouble)
        if arr.shape != (self.dim, self.dim):
            raise DimensionMismatchError(
                f"entries shape {arr.shape} does not match dim {self.dim}"
            )
        if self.bandwidth < self.dim - 1:
            i, j = np.indices(arr.shape, sparse=True)
            if np.any(arr[np.abs(i - j) > self.bandwidth] != 0):
                raise DomainError(
                    f"entries of {self.name or 'operator'} exceed declared bandwidth {self.bandwidth}"
                )
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    def interior(self, margin: int | None = None) -> np.ndarray:
        """Entries with the last ``margin`` rows and columns cut away."""
        m = self.interior_margin if margin is None else margin
        if not 0 <= m < self.dim:
            raise DomainError(f"margin must lie in [0, dim), got {m} for dim {self.dim}")
        cut = self.dim - m
        return self.entries[:cut, :cut]

    def is_hermitian(self, tol: float = 0.0) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol)


@dataclass(frozen=True)
class FluctuationRecord:
    """Number-state fluctuation closed forms for K1 and K2."""

    var_k1: float
    var_k2: float
    uncertainty_product: float
    sum_squares: float


def build_k3(label: RepLabel, dim: int) -> TruncatedOperator:
    """Diagonal compact generator, entries n + k."""
    if dim < 1:
        raise DomainError(f"build_k3 requires dim >= 1, got {dim}")
    diag = np.clongdouble(label.k) + np.arange(dim, dtype=np.clongdouble)
    return TruncatedOperator(
        dim=dim, k=label.k, entries=np.diag(diag),
        bandwidth=0, name="K3", omega=label.omega,
    )


def _ladder_coeffs(k: float, dim: int) -> np.ndarray:
    # sqrt((2k+n)(n+1)) for n = 0..dim-2: the |k,n> -> |k,n+1> amplitudes.
    n = np.arange(dim - 1, dtype=np.clongdouble)
    return np.sqrt((2.0 * np.clongdouble(k) + n) * (n + 1.0))


def build_kplus(label: RepLabel, dim: int) -> TruncatedOperator:
    """Raising generator; subdiagonal entries omega sqrt((2k+n)(n+1))."""
    if dim < 2:
        raise DomainError(f"build_kplus requires dim >= 2, got {dim}")
    entries = np.zeros((dim, dim), dtype=np.clongdouble)
    rows = np.arange(1, dim)
    entries[rows, rows - 1] = np.clongdouble(label.omega) * _ladder_coeffs(label.k, dim)
    return TruncatedOperator(
        dim=dim, k=label.k, entries=entries, bandwidth=1, name="K+", omega=label.omega,
    )


def build_kminus(label: RepLabel, dim: int) -> TruncatedOperator:
    """Lowering generator; superdiagonal entries (1/omega) sqrt((2k+n-1)n).

    Annihilates |k,0> and is the conjugate transpose of K+ on the full
    truncated block for any unit-modulus omega.
    """
    if dim < 2:
        raise DomainError(f"build_kminus requires dim >= 2, got {dim}")
    entries = np.zeros((dim, dim), dtype=np.clongdouble)
    cols = np.arange(1, dim)
    # For unit-modulus omega, 1/omega is its conjugate; conjugation is exact
    # in floating point while division is not, and it makes K- = (K+)^dag
    # hold entrywise rather than to rounding.
    entries[cols - 1, cols] = np.clongdouble(label.omega).conjugate() * _ladder_coeffs(label.k, dim)
    return TruncatedOperator(
        dim=dim, k=label.k, entries=entries, bandwidth=1, name="K-", omega=label.omega,
    )


def build_k1(label: RepLabel, dim: int) -> TruncatedOperator:
    """K1 = (K+ + K-)/2."""
    kp = build_kplus(label, dim)
    km = build_kminus(label, dim)
    return TruncatedOperator(
        dim=dim, k=label.k, entries=0.5 * (kp.entries + km.entries),
        bandwidth=1, name="K1", omega=label.omega,
    )


def build_k2(label: RepLabel, dim: int) -> TruncatedOperator:
    """K2 = (K+ - K-)/(2i)."""
    kp = build_kplus(label, dim)
    km = build_kminus(label, dim)
    return TruncatedOperator(
        dim=dim, k=label.k, entries=(kp.entries - km.entries) / np.clongdouble(2.0j),
        bandwidth=1, name="K2", omega=label.omega,
    )


def banded_matmul(a: np.ndarray, bw_a: int, b: np.ndarray, bw_b: int) -> np.ndarray:
    """Product of two square band matrices, accumulated diagonal-wise.

    Equivalent to ``a @ b`` for matrices that honor the stated bandwidths,
    but runs in O(dim * bw_a * bw_b) and never leaves the input dtype, so
    extended-precision entries stay extended.
    """
    dim = a.shape[0]
    if a.shape != (dim, dim) or b.shape != (dim, dim):
        raise DimensionMismatchError(f"band product needs square equal shapes, got {a.shape}, {b.shape}")
    out = np.zeros((dim, dim), dtype=np.result_type(a, b))
    for d1 in range(-bw_a, bw_a + 1):
        for d2 in range(-bw_b, bw_b + 1):
            d = d1 + d2
            lo = max(0, -d1, -d)
            hi = min(dim - 1, dim - 1 - d1, dim - 1 - d)
            if lo > hi:
                continue
            i = np.arange(lo, hi + 1)
            out[i, i + d] += a[i, i + d1] * b[i + d1, i + d]
    return out


def _pairwise_product(a: TruncatedOperator, b: TruncatedOperator) -> np.ndarray:
    # Band path when both operands are genuinely banded; dense otherwise.
    if a.bandwidth + b.bandwidth < a.dim - 1:
        return banded_matmul(a.entries, a.bandwidth, b.entries, b.bandwidth)
    return a.entries @ b.entries


def casimir(label: RepLabel, dim: int) -> TruncatedOperator:
    """K+ K- + K3 (1 - K3); constant k(1 - k) on the interior window.

    For this compression the product K+ K- never leaves the block (K- lowers
    first), so the matrix comes out exactly diagonal; the interior margin is
    kept at the generic band-product default anyway.
    """
    if dim < 2:
        raise DomainError(f"casimir requires dim >= 2, got {dim}")
    kp = build_kplus(label, dim)
    km = build_kminus(label, dim)
    k3d = np.clongdouble(label.k) + np.arange(dim, dtype=np.clongdouble)
    entries = banded_matmul(kp.entries, 1, km.entries, 1) + np.diag(k3d * (1.0 - k3d))
    return TruncatedOperator(
        dim=dim, k=label.k, entries=entries, bandwidth=2,
        interior_margin=min(4, dim - 1), name="Casimir", omega=label.omega,
    )


def commutator_residual(
    a: TruncatedOperator,
    b: TruncatedOperator,
    expected: TruncatedOperator,
    sign: complex = 1.0,
    margin: int | None = None,
) -> float:
    """Max-norm of [A, B] - sign*i*expected on the interior window.

    ``sign`` is +-1 for the rotation-algebra relations; a complex value is
    allowed so that sign=2j checks [K+, K-] = -2 K3 (2j*i = -2).  The default
    margin is twice the bandwidth of the product, which is where compression
    artifacts of band operators live.
    """
    if not (a.dim == b.dim == expected.dim):
        raise DimensionMismatchError(f"dims differ: {a.dim}, {b.dim}, {expected.dim}")
    if not (a.k == b.k == expected.k):
        raise DimensionMismatchError(f"k labels differ: {a.k}, {b.k}, {expected.k}")
    if margin is None:
        margin = 2 * (a.bandwidth + b.bandwidth)
    if not 0 <= margin < a.dim:
        raise DomainError(f"margin must lie in [0, dim), got {margin} for dim {a.dim}")
    comm = _pairwise_product(a, b) - _pairwise_product(b, a)
    resid = comm - np.clongdouble(sign * 1j) * expected.entries
    cut = a.dim - margin
    return float(np.max(np.abs(resid[:cut, :cut])))


def fluctuation_closed_forms(k: float, n: int) -> FluctuationRecord:
    """Closed-form K1/K2 fluctuations on the number state |k,n>.

    Both variances equal (n^2 + 2nk + k)/2; the product of the two spreads
    is bounded below by (n + k)/2 with equality at n = 0.  The second-moment
    sum is <K1^2> + <K2^2> = (n + k)^2 + q with q = k(1 - k).
    """
    if not k > 0.0:
        raise DomainError(f"k must be positive, got {k}")
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    var = 0.5 * (n * n + 2.0 * n * k + k)
    q = k * (1.0 - k)
    return FluctuationRecord(
        var_k1=var, var_k2=var, uncertainty_product=var,
        sum_squares=(n + k) ** 2 + q,
    )


def ladder_log_norm(k: float, n: int) -> float:
    """Log of the (K+)^n |k,0> normalization sqrt(Gamma(2k)/(n! Gamma(2k+n))).

    The log form is the usable one for n beyond ~150, where the norm itself
    leaves double range.
    """
    if not k > 0.0:
        raise DomainError(f"k must be positive, got {k}")
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    return 0.5 * (ln_gamma(2.0 * k) - ln_gamma(n + 1.0) - ln_gamma(2.0 * k + n))


def ladder_norm(k: float, n: int) -> float:
    """Normalization sqrt(Gamma(2k) / (n! Gamma(2k+n))) of (K+)^n |k,0>.

    Underflows to zero once the log form drops below about -708; callers
    needing large n should combine ``ladder_log_norm`` with their own
    log-scale bookkeeping.
    """
    return math.exp(ladder_log_norm(k, n))


def csv_lines(op: TruncatedOperator) -> list[str]:
    """Row-major CSV serialization with header ``i,j,re,im``.

    Values are emitted at double precision via ``repr``, which round-trips.
    """
    ent = op.entries.astype(np.complex128)
    lines = ["i,j,re,im"]
    for i in range(op.dim):
        for j in range(op.dim):
            z = ent[i, j]
            lines.append(f"{i},{j},{float(z.real)!r},{float(z.imag)!r}")
    return lines


def json_envelope(op: TruncatedOperator) -> dict:
    """JSON-ready envelope {k, dim, omega, name, entries}.

    Complex values are encoded as [re, im] pairs at double precision;
    entries are row-major.
    """
    ent = op.entries.astype(np.complex128)
    return {
        "k": op.k,
        "dim": op.dim,
        "omega": [complex(op.omega).real, complex(op.omega).imag],
        "name": op.name,
        "entries": [
            [[ent[i, j].real, ent[i, j].imag] for j in range(op.dim)]
            for i in range(op.dim)
        ],
    }
