"""Self-adjoint cos/sin phase operators and their diagonal identities.

The pair is the symmetrized product

    cos = (K3^-1 K1 + K1 K3^-1)/2,   sin = -(K3^-1 K2 + K2 K3^-1)/2,

well defined because K3 is positive definite.  Both come out tridiagonal with
zero diagonal; the single coupling strength is

    f_n = sqrt(n(2k+n-1)) * (1/(k+n) + 1/(k+n-1)),   f_0 = 0,

with cos entries f_{n+1}/4 on the off-diagonals and sin entries +-i f_{n+1}/4.
Construction always runs both the symmetrized-product route and the direct
f-coefficient route and demands entrywise agreement, so a regression in
either formula cannot pass silently.

Diagonal closed forms are expressed through the K3 eigenvalue x = n + k and
the Casimir value q = k(1-k):

    [cos,sin] diagonal  = -i * ((x^2-1) + 2q(2x^2-1)) / (4x (x^2-1)^2)
    (cos^2+sin^2) diag  = (x^2(x^2-1)(4x^2-3) + q(4x^4-3x^2+1)) / (4x^2 (x^2-1)^2)

both singular in form (not in value) at x = 1, i.e. k = 1, n = 0, where the
f-representation is used instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .errors import DomainError, TruncationError
from .repalg import (
    RepLabel,
    TruncatedOperator,
    banded_matmul,
    build_k1,
    build_k2,
)

__all__ = [
    "PhaseOperatorPair",
    "DiagonalIdentities",
    "ImproperEigvec",
    "f_coeff",
    "build_phase_ops",
    "ground_state_variance",
    "k1_bound",
    "diagonal_identities",
    "commutator_diag_asymptote",
    "cos_squared_diag_asymptote",
    "phase_spectrum",
    "spectrum_verdict",
    "improper_eigvec",
]

_ROUTE_TOL = 1e-13


@dataclass(frozen=True)
class PhaseOperatorPair:
    """cos/sin operator pair on a common truncated representation."""

    cos_op: TruncatedOperator
    sin_op: TruncatedOperator
    k: float
    dim: int

    def __post_init__(self) -> None:
        if not (self.cos_op.dim == self.sin_op.dim == self.dim):
            raise DomainError("phase operator pair dims are inconsistent")
        if not (self.cos_op.k == self.sin_op.k == self.k):
            raise DomainError("phase operator pair k labels are inconsistent")


@dataclass(frozen=True)
class DiagonalIdentities:
    """Closed-form diagonals and their deviation from matrix products."""

    commutator_diag: np.ndarray
    sum_squares_diag: np.ndarray
    residual: float


@dataclass(frozen=True)
class ImproperEigvec:
    """Recursion output, rescaled so the stored values stay in range.

    The true coefficients are ``values * exp(log_scale)``; log_scale is 0
    unless the running maximum passed the renormalization threshold.
    """

    values: np.ndarray
    log_scale: float


def f_coeff(k: float, n: int) -> float:
    """Tridiagonal coupling sqrt(n(2k+n-1)) (1/(k+n) + 1/(k+n-1)); 0 at n=0."""
    if not k > 0.0:
        raise DomainError(f"f_coeff requires k > 0, got {k}")
    if n < 0:
        raise DomainError(f"f_coeff requires n >= 0, got {n}")
    if n == 0:
        return 0.0
    return math.sqrt(n * (2.0 * k + n - 1.0)) * (1.0 / (k + n) + 1.0 / (k + n - 1.0))


def _f_array(k: float, dim: int) -> np.ndarray:
    # f_1 .. f_{dim-1} in extended precision for entry construction.
    n = np.arange(1, dim, dtype=np.clongdouble)
    kk = np.clongdouble(k)
    return np.sqrt(n * (2.0 * kk + n - 1.0)) * (1.0 / (kk + n) + 1.0 / (kk + n - 1.0))


def build_phase_ops(label: RepLabel, dim: int) -> PhaseOperatorPair:
    """Build the cos/sin pair two ways and insist the routes agree.

    Route (a) symmetrizes K1 and K2 with the exactly invertible diagonal
    K3; route (b) writes the tridiagonal entries from f_coeff.  Any
    entrywise discrepancy beyond 1e-13 raises, since for a diagonal K3 the
    two are algebraically identical even after truncation.
    """
    if dim < 2:
        raise DomainError(f"build_phase_ops requires dim >= 2, got {dim}")
    inv_diag = 1.0 / (np.clongdouble(label.k) + np.arange(dim, dtype=np.clongdouble))
    half_sym = 0.5 * (inv_diag[:, None] + inv_diag[None, :])

    k1 = build_k1(label, dim)
    k2 = build_k2(label, dim)
    cos_a = half_sym * k1.entries
    sin_a = -half_sym * k2.entries

    f = _f_array(label.k, dim)
    omega = np.clongdouble(label.omega)
    cos_b = np.zeros((dim, dim), dtype=np.clongdouble)
    sin_b = np.zeros((dim, dim), dtype=np.clongdouble)
    rows = np.arange(1, dim)
    cos_b[rows, rows - 1] = omega * f / 4.0
    cos_b[rows - 1, rows] = omega.conjugate() * f / 4.0
    sin_b[rows, rows - 1] = 1j * omega * f / 4.0
    sin_b[rows - 1, rows] = -1j * omega.conjugate() * f / 4.0

    dev = max(float(np.max(np.abs(cos_a - cos_b))), float(np.max(np.abs(sin_a - sin_b))))
    if dev > _ROUTE_TOL:
        raise TruncationError(
            f"phase-operator build routes disagree by {dev:.3e} at k={label.k}, dim={dim}"
        )

    cos_op = TruncatedOperator(
        dim=dim, k=label.k, entries=cos_b, bandwidth=1, name="cos", omega=label.omega,
    )
    sin_op = TruncatedOperator(
        dim=dim, k=label.k, entries=sin_b, bandwidth=1, name="sin", omega=label.omega,
    )
    return PhaseOperatorPair(cos_op=cos_op, sin_op=sin_op, k=label.k, dim=dim)


def ground_state_variance(k: float) -> float:
    """Phase-cosine variance on |k,0>: (2k+1)^2 / (8k (k+1)^2).

    Equals f_1^2/16, the matrix diagonal of cos^2 at n = 0; monotone
    decreasing toward 0 for k >= 1 and exceeding 1 as k drops below the
    k1_bound root.
    """
    if not k > 0.0:
        raise DomainError(f"ground_state_variance requires k > 0, got {k}")
    return (2.0 * k + 1.0) ** 2 / (8.0 * k * (k + 1.0) ** 2)


def k1_bound() -> float:
    """Smallest k whose ground-state variance stays at or below 1.

    Closed form from the depressed cubic for y = 2k+1 (y^3 = y + 1):
    k = (cbrt(1/2 + sqrt(23/27)/2) + cbrt(1/2 - sqrt(23/27)/2) - 1)/2.
    The root condition is re-verified before returning.
    """
    s = 0.5 * math.sqrt(23.0 / 27.0)
    # both radicands are positive (s < 1/2), so fractional powers suffice
    k = ((0.5 + s) ** (1.0 / 3.0) + (0.5 - s) ** (1.0 / 3.0) - 1.0) / 2.0
    if abs(ground_state_variance(k) - 1.0) > 1e-12:
        raise TruncationError("k1_bound closed form failed its root condition")
    return k


def _closed_commutator_diag(x: np.ndarray, q: float) -> np.ndarray:
    return -((x * x - 1.0) + 2.0 * q * (2.0 * x * x - 1.0)) / (
        4.0 * x * (x * x - 1.0) ** 2
    )


def _closed_sum_squares_diag(x: np.ndarray, q: float) -> np.ndarray:
    x2 = x * x
    return (x2 * (x2 - 1.0) * (4.0 * x2 - 3.0) + q * (4.0 * x2 * x2 - 3.0 * x2 + 1.0)) / (
        4.0 * x2 * (x2 - 1.0) ** 2
    )


def diagonal_identities(label: RepLabel, dim: int, margin: int = 4) -> DiagonalIdentities:
    """Closed-form diagonals of [cos, sin] and cos^2 + sin^2 with a residual.

    The commutator diagonal reported is the imaginary part of the matrix
    entry (the entry itself is purely imaginary).  Entries at n = 0 always
    come from the f-representation ((f_1^2 -+ f_0^2)/8), which sidesteps the
    removable x = 1 singularity of the closed forms at k = 1; for n >= 1 the
    rational forms in x = n + k are used.  The residual is the largest
    interior deviation of these sequences from the directly multiplied
    matrix products.
    """
    if dim < 4:
        raise DomainError(f"diagonal_identities requires dim >= 4, got {dim}")
    if not 0 <= margin < dim:
        raise DomainError(f"margin must lie in [0, dim), got {margin}")
    q = label.q
    x = label.k + np.arange(1, dim, dtype=np.float64)  # n = 1 .. dim-1

    comm = np.empty(dim, dtype=np.float64)
    ssq = np.empty(dim, dtype=np.float64)
    f1 = f_coeff(label.k, 1)
    comm[0] = f1 * f1 / 8.0
    ssq[0] = f1 * f1 / 8.0
    comm[1:] = _closed_commutator_diag(x, q)
    ssq[1:] = _closed_sum_squares_diag(x, q)

    pair = build_phase_ops(label, dim)
    c, s = pair.cos_op.entries, pair.sin_op.entries
    prod_comm = banded_matmul(c, 1, s, 1) - banded_matmul(s, 1, c, 1)
    prod_ssq = banded_matmul(c, 1, c, 1) + banded_matmul(s, 1, s, 1)
    cut = dim - margin
    dev_comm = np.abs(np.diag(prod_comm)[:cut].imag - comm[:cut])
    dev_ssq = np.abs(np.diag(prod_ssq)[:cut].real - ssq[:cut])
    residual = float(max(np.max(dev_comm), np.max(dev_ssq)))
    return DiagonalIdentities(commutator_diag=comm, sum_squares_diag=ssq, residual=residual)


def commutator_diag_asymptote(k: float, n: int) -> float:
    """Leading large-n behavior of the [cos, sin] diagonal: -(1+4q)/(4x^3).

    Signed to match the matrix convention used here; the magnitude is the
    usual (1+4q)/(4n^3) statement with x = n + k sharpening the plain-n
    version enough to matter at n ~ 50.
    """
    x = n + k
    q = k * (1.0 - k)
    return -(1.0 + 4.0 * q) / (4.0 * x**3)


def cos_squared_diag_asymptote(k: float, n: int) -> float:
    """Large-n diagonal of cos^2: (1 + (1+4q)/(4x^2))/2 with x = n + k."""
    x = n + k
    q = k * (1.0 - k)
    return 0.5 * (1.0 + 0.25 * (1.0 + 4.0 * q) / (x * x))


def phase_spectrum(pair: PhaseOperatorPair) -> np.ndarray:
    """Sorted eigenvalues of cos_op via a symmetric tridiagonal solver.

    sin_op is unitarily equivalent to -cos (conjugation by diag(i^-n) makes
    it real tridiagonal); its spectrum is computed the same way and must
    match to 1e-10, which guards the builder and the solver at once.
    """
    if abs(complex(pair.cos_op.omega).imag) > 1e-13:
        raise DomainError("phase_spectrum requires a real omega convention")
    dim = pair.dim
    diag = np.diag(pair.cos_op.entries).real.astype(np.float64)
    off = np.diag(pair.cos_op.entries, k=-1).real.astype(np.float64)
    cos_eigs = np.sort(eigvalsh_tridiagonal(diag, off))

    # D^dag sin D with D = diag(i^-n) has entries -f/4: real symmetric.
    # i^-n cycles with period 4; the lookup keeps the unitary exact.
    d = np.array([1.0, -1.0j, -1.0, 1.0j])[np.arange(dim) % 4]
    sin_rot = d.conjugate()[:, None] * pair.sin_op.entries.astype(np.complex128) * d[None, :]
    if float(np.max(np.abs(sin_rot.imag))) > 1e-13:
        raise TruncationError("sin_op failed to rotate to a real tridiagonal form")
    sin_eigs = np.sort(
        eigvalsh_tridiagonal(np.diag(sin_rot).real, np.diag(sin_rot, k=-1).real)
    )
    if float(np.max(np.abs(sin_eigs - cos_eigs))) > 1e-10:
        raise TruncationError("cos and sin spectra disagree beyond 1e-10")
    return cos_eigs


def spectrum_verdict(eigenvalues: np.ndarray, tol: float = 1e-12) -> str:
    """BOUNDED if every |eigenvalue| <= 1 + tol, else EXCEEDS."""
    return "BOUNDED" if float(np.max(np.abs(eigenvalues))) <= 1.0 + tol else "EXCEEDS"


_RENORM_EVERY = 64
_RENORM_THRESHOLD = 1e100


def improper_eigvec(k: float, mu: float, a0: float, nmax: int) -> ImproperEigvec:
    """Three-term recursion a_{n+1} = (4 mu a_n - f_n a_{n-1}) / f_{n+1}.

    Solves the formal eigenvalue equation of the infinite cos operator row
    by row.  Coefficients can grow geometrically for |mu| > 1, so the whole
    prefix is rescaled by the running maximum every 64 steps once it passes
    1e100, with the accumulated log reported in ``log_scale``.
    """
    if not k > 0.0:
        raise DomainError(f"improper_eigvec requires k > 0, got {k}")
    if nmax < 2:
        raise DomainError(f"improper_eigvec requires nmax >= 2, got {nmax}")
    a = np.zeros(nmax + 1, dtype=np.float64)
    a[0] = a0
    a[1] = 4.0 * mu * a0 / f_coeff(k, 1)
    log_scale = 0.0
    running_max = max(abs(a[0]), abs(a[1]))
    for n in range(1, nmax):
        a[n + 1] = (4.0 * mu * a[n] - f_coeff(k, n) * a[n - 1]) / f_coeff(k, n + 1)
        running_max = max(running_max, abs(a[n + 1]))
        if (n + 1) % _RENORM_EVERY == 0 and running_max > _RENORM_THRESHOLD:
            a[: n + 2] /= running_max
            log_scale += math.log(running_max)
            running_max = 1.0
    return ImproperEigvec(values=a, log_scale=log_scale)
