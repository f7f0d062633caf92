"""Lowering-operator coherent states |k,z> and the phase-spectrum bound scan.

The state solves K- |k,z> = z |k,z> with z = rho e^{i phi}.  Its number-state
coefficients are

    c_n = rho^{k-1/2} I_{2k-1}(2 rho)^{-1/2} z^n / sqrt(n! Gamma(2k+n)),

so normalization rides on the modified Bessel function of the first kind.
Every expectation value in this module is produced twice, once in closed form
through Bessel-function ratios and once by truncated sums over the stored
coefficients, and construction fails loudly if the routes drift apart.

Phase expectation values factor as <cos> = cos(phi) g(rho)/I_{2k-1}(2 rho)
with

    g(rho) = 1/2 sum_n rho^{2(n+k)} / (n! Gamma(2k+n)) (1/(n+k) + 1/(n+k+1)),

and the scan of that ratio over (k, rho) decides whether the phase-operator
spectrum can fill [-1, 1]: the ratio stays below 1 for k >= 0.4 on the default
grid but crosses it near rho ~ 1 for k = 0.25.

Small-rho behavior of b_k(rho) = I_2k(2 rho)/I_{2k-1}(2 rho): the leading
series terms give rho/(2k); the k-independent shorthand "b ~ rho" is accurate
only at k = 1/2 and is not used here.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    DomainError,
    TruncationError,
)
from .phaseops import build_phase_ops
from .repalg import RepLabel, build_k1, build_k2
from .specfun import bessel_i_scaled, bessel_k_scaled, ln_gamma

__all__ = [
    "BGState",
    "K3Moments",
    "K12Moments",
    "PhaseExpectations",
    "ScanResult",
    "make_bg_state",
    "eigenvector_residual",
    "overlap",
    "moment_integral",
    "completeness_check",
    "b_ratio",
    "k3_moments",
    "k12_moments",
    "g_k",
    "ratio_gI",
    "ratio_gI_asymptote",
    "phase_expectations",
    "kbound_scan",
    "flip_bracket",
    "scan_csv_lines",
    "scan_json_summary",
]

_SERIES_TOL = 1e-18
_MAX_TERMS = 200_000
_ROUTE_TOL = 1e-10
_SUP_TOL = 1e-9


@dataclass(frozen=True)
class BGState:
    """Truncated coherent state with its coefficient vector.

    ``coeffs[n]`` is the exact infinite-state coefficient, not renormalized
    after truncation, so sum(|coeffs|^2) = 1 - tail with tail < tail_tol.
    """

    k: float
    z: complex
    dim: int
    coeffs: np.ndarray
    tail_tol: float

    def __post_init__(self) -> None:
        if not self.k > 0.0:
            raise DomainError(f"BGState requires k > 0, got {self.k}")
        if self.dim < 1:
            raise DomainError(f"BGState requires dim >= 1, got {self.dim}")
        if self.coeffs.shape != (self.dim,):
            raise DimensionMismatchError("coefficient vector length differs from dim")
        c0 = complex(self.coeffs[0])
        if not (c0.imag == 0.0 and c0.real > 0.0):
            raise DomainError("coeffs[0] must be real positive in this phase convention")

    @property
    def rho(self) -> float:
        return abs(self.z)

    @property
    def phi(self) -> float:
        return cmath.phase(self.z)


@dataclass(frozen=True)
class K3Moments:
    mean: float
    second: float
    variance: float
    b_k: float


@dataclass(frozen=True)
class K12Moments:
    mean_k1: float
    mean_k2: float
    second_k1: float
    second_k2: float
    var_k1: float
    var_k2: float


@dataclass(frozen=True)
class PhaseExpectations:
    """cos/sin expectations; tan_ratio is inf-signed at cos = 0, nan at z = 0."""

    cos_mean: float
    sin_mean: float
    tan_ratio: float


@dataclass(frozen=True)
class ScanResult:
    """Ratio g/I over a (k, rho) grid with one verdict row per k."""

    k_values: np.ndarray
    rho_values: np.ndarray
    ratio: np.ndarray
    sup_per_k: np.ndarray
    argmax_rho: np.ndarray
    verdicts: tuple


def _ive(nu: float, x: float) -> float:
    # e^{-x} I_nu(x) for nu > -1; orders below 0 appear here as 2k-1 with
    # 0 < k < 0.5 and fall outside the specfun domain, so they go through
    # the ascending series directly (all terms positive, no cancellation).
    if nu >= 0.0:
        return bessel_i_scaled(nu, x)
    if not (nu > -1.0 and x > 0.0):
        raise DomainError(f"_ive requires nu > -1 and x > 0, got nu={nu}, x={x}")
    log_half = math.log(0.5 * x)
    total = 0.0
    largest = 0.0
    for m in range(_MAX_TERMS):
        e = (nu + 2.0 * m) * log_half - ln_gamma(m + 1.0) - ln_gamma(nu + m + 1.0) - x
        t = math.exp(e) if e > -745.0 else 0.0
        total += t
        largest = max(largest, t)
        if m * (nu + m) > 0.25 * x * x and t < _SERIES_TOL * largest:
            return total
    raise ConvergenceError(f"scaled Bessel series stalled at nu={nu}, x={x}")


def _ln_bessel_i(nu: float, x: float) -> float:
    val = _ive(nu, x)
    if val > 0.0:
        return math.log(val) + x
    # the scaled value only underflows for tiny x, where the first
    # ascending-series term carries the whole logarithm
    return nu * math.log(0.5 * x) - ln_gamma(nu + 1.0)


def _tail_dim(k: float, rho: float, tail_tol: float) -> int:
    # Smallest n past the term peak with rho^{2(n+k)}/(n! Gamma(2k+n)) below
    # tail_tol * I_{2k-1}(2 rho); the factor-2 ratio condition makes the
    # geometric tail bound legitimate.
    log_rhs = math.log(tail_tol) + _ln_bessel_i(2.0 * k - 1.0, 2.0 * rho)
    n = 1
    while n <= _MAX_TERMS:
        past_peak = n * (2.0 * k + n - 1.0) >= 2.0 * rho * rho
        log_term = (
            2.0 * (n + k) * math.log(rho) - ln_gamma(n + 1.0) - ln_gamma(2.0 * k + n)
        )
        if past_peak and log_term < log_rhs:
            return n
        n += 1
    raise TruncationError(
        f"no dim below {_MAX_TERMS} meets tail_tol={tail_tol} at k={k}, rho={rho}"
    )


def make_bg_state(k: float, z: complex, dim: int | None = None,
                  tail_tol: float = 1e-14) -> BGState:
    """Construct |k,z> truncated where the coefficient tail is below tail_tol.

    With dim omitted, the smallest adequate dimension is chosen; an explicit
    dim smaller than that raises.  The lowering-operator eigenvalue relation
    is verified row by row on the interior before the state is returned.
    """
    if not k > 0.0:
        raise DomainError(f"make_bg_state requires k > 0, got {k}")
    if not tail_tol > 0.0:
        raise DomainError(f"make_bg_state requires tail_tol > 0, got {tail_tol}")
    z = complex(z)
    rho = abs(z)

    if rho == 0.0:
        needed = 1
    else:
        needed = _tail_dim(k, rho, tail_tol)
    if dim is None:
        dim = needed
    elif dim < needed:
        raise TruncationError(
            f"dim={dim} cannot meet tail_tol={tail_tol}; need at least {needed}"
        )

    coeffs = np.zeros(dim, dtype=np.complex128)
    if rho == 0.0:
        coeffs[0] = 1.0
    else:
        n = np.arange(dim, dtype=np.float64)
        lg = np.array([ln_gamma(v) for v in n + 1.0])
        lg += np.array([ln_gamma(2.0 * k + v) for v in n])
        log_amp = (
            (k - 0.5) * math.log(rho)
            - 0.5 * _ln_bessel_i(2.0 * k - 1.0, 2.0 * rho)
            + n * math.log(rho)
            - 0.5 * lg
        )
        coeffs = np.exp(log_amp) * np.exp(1j * cmath.phase(z) * n)

    state = BGState(k=k, z=z, dim=dim, coeffs=coeffs, tail_tol=tail_tol)

    # interior rows of (K- - z) coeffs vanish identically; rounding only
    sub = np.sqrt((np.arange(1, dim)) * (2.0 * k + np.arange(dim - 1)))
    interior = sub * coeffs[1:] - z * coeffs[:-1]
    if dim > 1 and float(np.max(np.abs(interior))) > 1e-12 * (1.0 + rho):
        raise TruncationError("coherent-state coefficients fail the eigenvalue relation")
    return state


def eigenvector_residual(state: BGState) -> float:
    """Full 2-norm of (K- - z) coeffs, boundary row included.

    The last row contributes |z| |coeffs[dim-1]| because truncation maps the
    missing component to zero, so the result is tail-sized, not machine-sized.
    """
    dim, z = state.dim, state.z
    sub = np.sqrt(np.arange(1, dim) * (2.0 * state.k + np.arange(dim - 1)))
    res = np.empty(dim, dtype=np.complex128)
    res[: dim - 1] = sub * state.coeffs[1:] - z * state.coeffs[: dim - 1]
    res[dim - 1] = -z * state.coeffs[dim - 1]
    return float(np.linalg.norm(res))


def _entire_series_scaled(k: float, w: complex, scale: float) -> complex:
    # sum_n w^n / (n! Gamma(2k+n)) damped by exp(-scale); the term magnitude
    # peaks near n = sqrt(|w|), matching scale = 2 sqrt(|w|).
    mag, theta = abs(w), cmath.phase(w)
    if mag == 0.0:
        return complex(math.exp(-ln_gamma(2.0 * k) - scale))
    log_mag = math.log(mag)
    total = 0.0 + 0.0j
    largest = 0.0
    for n in range(_MAX_TERMS):
        e = n * log_mag - ln_gamma(n + 1.0) - ln_gamma(2.0 * k + n) - scale
        t = math.exp(e) if e > -745.0 else 0.0
        total += t * cmath.exp(1j * theta * n)
        largest = max(largest, t)
        if n * (2.0 * k + n) > mag and t < _SERIES_TOL * largest:
            return total
    raise ConvergenceError(f"series for the overlap kernel stalled at k={k}, |w|={mag}")


def overlap(s1: BGState, s2: BGState) -> complex:
    """<k,z2|k,z1> by truncated inner product, validated against closed form.

    The closed form reduces to |z2 z1|^{k-1/2} S(conj(z2) z1) over the root of
    both normalizations, with S the entire series behind I_{2k-1}; written
    this way no branch cut is ever taken.  The two routes must agree to 1e-10
    or to the cross-term tail bound when that is larger (states of very
    different rho leave a genuinely bigger tail past the shorter vector).
    """
    if s1.k != s2.k:
        raise DimensionMismatchError(f"overlap needs equal k, got {s1.k} and {s2.k}")
    k = s1.k
    m = min(s1.dim, s2.dim)
    summed = complex(np.sum(np.conj(s2.coeffs[:m]) * s1.coeffs[:m]))

    # first omitted cross term via the coefficient recursion, continued as a
    # geometric series (term ratios only shrink); Cauchy-Schwarz caps it
    shorter = s1 if s1.dim <= s2.dim else s2
    cross_tail = math.sqrt(shorter.tail_tol)
    if m >= 1:
        rr = s1.rho * s2.rho
        first_missing = (
            abs(s1.coeffs[m - 1]) * abs(s2.coeffs[m - 1]) * rr / (m * (2.0 * k + m - 1.0))
        )
        decay = rr / ((m + 1.0) * (2.0 * k + m))
        if decay < 1.0:
            cross_tail = min(cross_tail, first_missing / (1.0 - decay))

    r1, r2 = s1.rho, s2.rho
    if r1 == 0.0 or r2 == 0.0:
        closed = complex(s1.coeffs[0].real * s2.coeffs[0].real)
    else:
        w = s2.z.conjugate() * s1.z
        ln_rr = math.log(r1) + math.log(r2)
        scale = 2.0 * math.exp(0.5 * ln_rr)
        series = _entire_series_scaled(k, w, scale)
        # exponent collapses to -(sqrt(r1)-sqrt(r2))^2 plus the power
        # prefactor; assembled in log space so tiny rho cannot underflow
        ln_pref = (
            (k - 0.5) * ln_rr
            + scale
            - 0.5 * (_ln_bessel_i(2.0 * k - 1.0, 2.0 * r1)
                     + _ln_bessel_i(2.0 * k - 1.0, 2.0 * r2))
        )
        closed = series * math.exp(ln_pref)

    tol = max(_ROUTE_TOL * max(1.0, abs(closed)), 4.0 * cross_tail)
    if abs(summed - closed) > tol:
        raise TruncationError(
            f"overlap routes disagree by {abs(summed - closed):.3e} at k={k}"
        )
    return summed


def moment_integral(k: float, n: int, rho_max: float = 60.0,
                    quadrature_tol: float = 1e-9) -> float:
    """Quadrature of int_0^inf rho^{2(n+k)} K_{2k-1}(2 rho) drho.

    The infinite tail beyond rho_max is estimated from the exponential decay
    of the scaled integrand and added on.  The closed value is
    n! Gamma(2k+n)/4; callers compare against it.
    """
    if k < 0.5:
        raise DomainError(f"moment_integral requires k >= 0.5, got {k}")
    if not 0 <= n <= 20:
        raise DomainError(f"moment_integral requires 0 <= n <= 20, got {n}")
    power = 2.0 * (n + k)
    if rho_max <= power:
        raise DomainError(f"rho_max={rho_max} must exceed 2(n+k)={power}")

    def integrand(rho: float) -> float:
        if rho <= 0.0:
            return 0.0
        return math.exp(power * math.log(rho) - 2.0 * rho) * bessel_k_scaled(
            2.0 * k - 1.0, 2.0 * rho
        )

    value, abserr, info, *rest = quad(
        integrand, 0.0, rho_max, epsabs=1e-15, epsrel=1e-13, limit=400, full_output=1
    )
    if rest:
        raise ConvergenceError(f"moment quadrature failed at k={k}, n={n}: {rest[0]}")
    # integrand ~ e^{-2 rho} polynomial: geometric tail from the endpoint value
    tail = integrand(rho_max) / (2.0 - power / rho_max)
    total = value + tail
    if abserr + tail > max(quadrature_tol * abs(total), 1e-15):
        raise ConvergenceError(
            f"moment quadrature at k={k}, n={n}: error {abserr + tail:.3e} "
            f"exceeds tol {quadrature_tol}"
        )
    return total


def completeness_check(k: float, n: int, rho_max: float = 60.0,
                       quadrature_tol: float = 1e-9) -> float:
    """Resolution-of-identity weight on |k,n>, exactly 1 for the true measure.

    The angular integral is analytic (only the diagonal term survives) and the
    Bessel normalization cancels, leaving 4/(n! Gamma(2k+n)) times the radial
    moment, evaluated by quadrature.
    """
    log_norm = ln_gamma(n + 1.0) + ln_gamma(2.0 * k + n)
    return 4.0 * moment_integral(k, n, rho_max, quadrature_tol) * math.exp(-log_norm)


def b_ratio(k: float, rho: float) -> float:
    """I_{2k}(2 rho) / I_{2k-1}(2 rho), the mean-occupation ratio; 0 at rho=0."""
    if not k > 0.0:
        raise DomainError(f"b_ratio requires k > 0, got {k}")
    if rho < 0.0:
        raise DomainError(f"b_ratio requires rho >= 0, got {rho}")
    if rho < 1e-7:
        # leading series behavior; relative error O(rho^2), and the direct
        # quotient would underflow to 0/0 for extreme orders at tiny rho
        return rho / (2.0 * k)
    return bessel_i_scaled(2.0 * k, 2.0 * rho) / _ive(2.0 * k - 1.0, 2.0 * rho)


def _padded_coeffs(state: BGState, minimum: int = 2) -> np.ndarray:
    # zero-padding is exact: omitted coefficients are treated as zero anyway,
    # and operator builders need at least a 2-dimensional space
    if state.dim >= minimum:
        return state.coeffs
    c = np.zeros(minimum, dtype=np.complex128)
    c[: state.dim] = state.coeffs
    return c


def _route_check(closed: float, summed: float, tol: float, what: str) -> None:
    if abs(closed - summed) > tol * max(1.0, abs(closed)):
        raise TruncationError(
            f"{what}: closed form {closed!r} and truncated sum {summed!r} "
            f"disagree beyond {tol:.1e}"
        )


def _moment_tol(state: BGState) -> float:
    # the matrix route loses the edge coefficient's out-of-band coupling:
    # |c_{dim-1}|^2 ~ tail_tol * dim(2k+dim-1)/rho^2 against a squared
    # ladder element dim(2k+dim-1)/4 is the declared tail bound here
    d, k, rho = state.dim, state.k, state.rho
    if rho == 0.0:
        return _ROUTE_TOL
    edge = d * (2.0 * k + d - 1.0)
    return max(_ROUTE_TOL, 10.0 * state.tail_tol * edge * edge / (4.0 * rho * rho))


def k3_moments(state: BGState) -> K3Moments:
    """Mean, second moment and variance of K3, closed form cross-summed.

    mean = k + rho b_k, second = k^2 + rho^2 + rho b_k and
    variance = rho^2 (1 - b_k^2) + (1-2k) rho b_k; each is compared against
    the direct sum over |coeffs|^2 before being returned.
    """
    k, rho = state.k, state.rho
    b = b_ratio(k, rho)
    mean = k + rho * b
    second = k * k + rho * rho + rho * b
    variance = rho * rho * (1.0 - b * b) + (1.0 - 2.0 * k) * rho * b

    p = np.abs(state.coeffs) ** 2
    levels = state.k + np.arange(state.dim)
    mean_s = float(np.sum(p * levels))
    second_s = float(np.sum(p * levels * levels))
    tol = _moment_tol(state)
    _route_check(mean, mean_s, tol, "K3 mean")
    _route_check(second, second_s, tol, "K3 second moment")
    _route_check(variance, second_s - mean_s * mean_s, tol, "K3 variance")
    return K3Moments(mean=mean, second=second, variance=variance, b_k=b)


def k12_moments(state: BGState) -> K12Moments:
    """K1/K2 means and spreads; both variances equal half the K3 mean.

    Closed forms: mean_k1 = rho cos(phi), mean_k2 = -rho sin(phi), second
    moments rho^2 cos^2/sin^2 plus <K3>/2.  The uncertainty product therefore
    sits exactly at its lower bound <K3>^2/4.  Matrix-vector sums over the
    stored coefficients must agree before the record is returned.
    """
    k, rho, phi = state.k, state.rho, state.phi
    k3_mean = k + rho * b_ratio(k, rho)
    mean_k1 = rho * math.cos(phi)
    mean_k2 = -rho * math.sin(phi)
    second_k1 = rho * rho * math.cos(phi) ** 2 + 0.5 * k3_mean
    second_k2 = rho * rho * math.sin(phi) ** 2 + 0.5 * k3_mean
    var = 0.5 * k3_mean

    label = RepLabel(k=k)
    c = _padded_coeffs(state)
    tol = _moment_tol(state)
    for name, build, closed_mean, closed_second in (
        ("K1", build_k1, mean_k1, second_k1),
        ("K2", build_k2, mean_k2, second_k2),
    ):
        op = build(label, c.size).entries.astype(np.complex128)
        applied = op @ c
        _route_check(closed_mean, float(np.real(np.vdot(c, applied))), tol, f"{name} mean")
        _route_check(
            closed_second, float(np.real(np.vdot(applied, applied))), tol,
            f"{name} second moment",
        )
    return K12Moments(
        mean_k1=mean_k1, mean_k2=mean_k2, second_k1=second_k1,
        second_k2=second_k2, var_k1=var, var_k2=var,
    )


def _phase_weight_sums(k: float, rho: float) -> tuple[float, float]:
    # Shared-term sums over t_n = rho^{2(n+k)} e^{-2 rho} / (n! Gamma(2k+n)):
    # the weighted sum is e^{-2 rho} g(rho), the plain sum identically equals
    # rho e^{-2 rho} I_{2k-1}(2 rho), so their quotient needs no Bessel call
    # and holds for every k > 0.  Term peak sits near n = rho.
    log_rho = math.log(rho)
    weighted = 0.0
    plain = 0.0
    largest = 0.0
    for n in range(_MAX_TERMS):
        e = (
            2.0 * (n + k) * log_rho
            - ln_gamma(n + 1.0)
            - ln_gamma(2.0 * k + n)
            - 2.0 * rho
        )
        t = math.exp(e) if e > -745.0 else 0.0
        weighted += 0.5 * t * (1.0 / (n + k) + 1.0 / (n + k + 1.0))
        plain += t
        largest = max(largest, t)
        if n * (2.0 * k + n - 1.0) > rho * rho and t < _SERIES_TOL * largest:
            return weighted, plain
    raise ConvergenceError(f"phase-weight series stalled at k={k}, rho={rho}")


def g_k(k: float, rho: float) -> float:
    """Radial phase weight g(rho), series route checked against quadrature.

    The alternative route integrates I_{2k-1} directly:
    g = 1/2 int_0^{2rho} I(u) du + 1/(8 rho^2) int_0^{2rho} u^2 I(u) du.
    Both are evaluated in e^{-2 rho}-scaled form and must agree to 1e-10;
    the unscaled value overflows past rho ~ 350 and is refused there.
    """
    if not k > 0.0:
        raise DomainError(f"g_k requires k > 0, got {k}")
    if rho < 0.0:
        raise DomainError(f"g_k requires rho >= 0, got {rho}")
    if rho == 0.0:
        return 0.0
    if rho < 1e-7:
        # leading series term; the next one is down by rho^2/(2k)
        w0 = 0.5 * (1.0 / k + 1.0 / (k + 1.0))
        return w0 * math.exp(2.0 * k * math.log(rho) - ln_gamma(2.0 * k))
    if rho > 350.0:
        raise DomainError("g_k overflows past rho = 350; use ratio_gI instead")
    scaled = _phase_weight_sums(k, rho)[0]

    nu = 2.0 * k - 1.0

    def damped(u: float) -> float:
        # u = 0 is integrable for nu > -1 and never sampled by the open rule
        if u <= 0.0:
            return 0.0
        return _ive(nu, u) * math.exp(u - 2.0 * rho)

    first = quad(damped, 0.0, 2.0 * rho, epsabs=1e-16, epsrel=1e-12, limit=400)[0]
    second = quad(
        lambda u: u * u * damped(u), 0.0, 2.0 * rho, epsabs=1e-16, epsrel=1e-12,
        limit=400,
    )[0]
    quad_scaled = 0.5 * first + second / (8.0 * rho * rho)
    if abs(scaled - quad_scaled) > _ROUTE_TOL * max(abs(scaled), abs(quad_scaled), 1e-280):
        raise TruncationError(
            f"g_k routes disagree at k={k}, rho={rho}: "
            f"{scaled!r} (series) vs {quad_scaled!r} (quadrature)"
        )
    return scaled * math.exp(2.0 * rho)


def ratio_gI(k: float, rho: float) -> float:
    """g(rho) / I_{2k-1}(2 rho) with shared exponential scaling; 0 at rho=0.

    This is the modulus of the phase expectation values; whether it stays
    below 1 over all rho is exactly the spectral-containment question.
    """
    if not k > 0.0:
        raise DomainError(f"ratio_gI requires k > 0, got {k}")
    if rho < 0.0:
        raise DomainError(f"ratio_gI requires rho >= 0, got {rho}")
    if rho == 0.0:
        return 0.0
    if rho < 1e-7:
        # rho w_0 limit, accurate to O(rho^2) and immune to term underflow
        return rho * 0.5 * (1.0 / k + 1.0 / (k + 1.0))
    weighted, plain = _phase_weight_sums(k, rho)
    return rho * weighted / plain


def ratio_gI_asymptote(rho: float) -> float:
    """Large-rho form of the ratio, 1 - 1/(4 rho), independent of k."""
    return 1.0 - 0.25 / rho


def phase_expectations(state: BGState) -> PhaseExpectations:
    """cos/sin expectations cos(phi) g/I and sin(phi) g/I, sum-checked.

    tan_ratio = sin_mean/cos_mean collapses to tan(phi), independent of k and
    rho; it is reported as signed infinity when cos_mean vanishes with a
    nonzero sin_mean and as nan for the ground state (phi undefined).
    """
    k, rho, phi = state.k, state.rho, state.phi
    ratio = ratio_gI(k, rho)
    cos_mean = math.cos(phi) * ratio
    sin_mean = math.sin(phi) * ratio

    c = _padded_coeffs(state)
    pair = build_phase_ops(RepLabel(k=k), c.size)
    tol = max(_ROUTE_TOL, 10.0 * state.tail_tol * (state.dim + k))
    cos_s = float(np.real(np.vdot(c, pair.cos_op.entries.astype(np.complex128) @ c)))
    sin_s = float(np.real(np.vdot(c, pair.sin_op.entries.astype(np.complex128) @ c)))
    _route_check(cos_mean, cos_s, tol, "cos expectation")
    _route_check(sin_mean, sin_s, tol, "sin expectation")

    if cos_mean != 0.0:
        tan = sin_mean / cos_mean
    elif sin_mean != 0.0:
        tan = math.copysign(math.inf, sin_mean)
    else:
        tan = math.nan
    return PhaseExpectations(cos_mean=cos_mean, sin_mean=sin_mean, tan_ratio=tan)


def _default_k_grid() -> np.ndarray:
    return np.linspace(0.1, 2.0, 39)


def _default_rho_grid() -> np.ndarray:
    return np.geomspace(0.01, 100.0, 200)


def kbound_scan(k_grid: np.ndarray | None = None,
                rho_grid: np.ndarray | None = None) -> ScanResult:
    """Fill the g/I ratio over the grid and pass a verdict per k.

    BOUNDED means sup over rho stays at or below 1 + 1e-9.  Rows are
    independent; each is evaluated by one vectorized series sweep whose term
    count is set by the largest rho in the grid.
    """
    k_values = _default_k_grid() if k_grid is None else np.asarray(k_grid, dtype=float)
    rho_values = (
        _default_rho_grid() if rho_grid is None else np.asarray(rho_grid, dtype=float)
    )
    if k_values.size == 0 or rho_values.size == 0:
        raise DomainError("kbound_scan requires nonempty grids")
    if np.any(k_values <= 0.0) or np.any(rho_values <= 0.0):
        raise DomainError("kbound_scan grids must be strictly positive")

    rho_max = float(np.max(rho_values))
    nmax = int(rho_max + 12.0 * math.sqrt(rho_max) + 60.0)
    n = np.arange(nmax + 1, dtype=np.float64)
    log_rho = np.log(rho_values)
    lgn = np.array([ln_gamma(v) for v in n + 1.0])

    ratio = np.empty((k_values.size, rho_values.size))
    for i, k in enumerate(k_values):
        lgk = np.array([ln_gamma(2.0 * k + v) for v in n])
        terms = np.exp(
            2.0 * (n[:, None] + k) * log_rho[None, :]
            - (lgn + lgk)[:, None]
            - 2.0 * rho_values[None, :]
        )
        weights = 0.5 * (1.0 / (n + k) + 1.0 / (n + k + 1.0))
        # plain column sums equal rho e^{-2 rho} I_{2k-1}(2 rho) termwise
        ratio[i] = rho_values * (weights @ terms) / np.sum(terms, axis=0)

    sup = ratio.max(axis=1)
    argmax = rho_values[np.argmax(ratio, axis=1)]
    verdicts = tuple(
        "BOUNDED" if s <= 1.0 + _SUP_TOL else "EXCEEDS" for s in sup
    )
    return ScanResult(
        k_values=k_values, rho_values=rho_values, ratio=ratio,
        sup_per_k=sup, argmax_rho=argmax, verdicts=verdicts,
    )


def flip_bracket(result: ScanResult) -> tuple[float, float] | None:
    """Grid values bracketing the EXCEEDS -> BOUNDED flip, or None.

    Reported as the largest EXCEEDS k and the next grid value above it; no
    interpolation is attempted since the sharp threshold is an open point.
    """
    exceeding = [
        i for i, v in enumerate(result.verdicts) if v == "EXCEEDS"
    ]
    if not exceeding or exceeding[-1] + 1 >= result.k_values.size:
        return None
    i = exceeding[-1]
    return (float(result.k_values[i]), float(result.k_values[i + 1]))


def scan_csv_lines(result: ScanResult) -> list[str]:
    """CSV rows k,rho,ratio,verdict, one line per grid point."""
    lines = ["k,rho,ratio,verdict"]
    for i, k in enumerate(result.k_values):
        v = result.verdicts[i]
        for j, rho in enumerate(result.rho_values):
            lines.append(f"{float(k)!r},{float(rho)!r},{float(result.ratio[i, j])!r},{v}")
    return lines


def scan_json_summary(result: ScanResult) -> dict:
    """Per-k summary rows plus the verdict-flip bracket."""
    bracket = flip_bracket(result)
    return {
        "flip_bracket": list(bracket) if bracket is not None else None,
        "rows": [
            {
                "k": float(result.k_values[i]),
                "sup": float(result.sup_per_k[i]),
                "argmax_rho": float(result.argmax_rho[i]),
                "verdict": result.verdicts[i],
            }
            for i in range(result.k_values.size)
        ],
    }
