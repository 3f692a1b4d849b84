"""Certificates that a function is a (weak) character of order 1 or 2.

Fourier structure is certified with the best R-term approximation: by
Parseval the closest combination of R characters keeps the R largest
coefficients, so the residual is the l2 mass of the rest. A quadratic
certificate applies this test to every multiplicative derivative Delta_t f;
the weak version tolerates a fraction of bad shifts.

Certificates report what was measured. Where a theorem predicts parameters,
the report lists the prediction next to the measurement and says whether the
inequality holds.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .fourier_ops import denoise, denoising_residual, lift_outer
from .group import GroupFunction, all_derivatives, fourier_rows
from .spectral import eigendecompose, is_theta_isolated
from .zmatrix import ma_norm

NORM_TOL = 1e-9


def _require_unit_ball(f: GroupFunction):
    if f.norm() > 1 + NORM_TOL:
        raise ValueError(f"certificates need ||f||_2 <= 1, got {f.norm():.6g}")


def _top_r_order(coeffs: np.ndarray) -> np.ndarray:
    # stable sort: equal moduli keep the smaller dual index first
    return np.argsort(-np.abs(coeffs), kind="stable")


def _tail_residuals(coeffs: np.ndarray, r: int) -> np.ndarray:
    """Row-wise l2 mass outside the r largest coefficients."""
    sq = np.sort(np.abs(coeffs) ** 2, axis=-1)
    keep = min(max(r, 0), sq.shape[-1])
    tail = sq[..., : sq.shape[-1] - keep]
    return np.sqrt(np.sum(tail, axis=-1))


@dataclass(frozen=True)
class FourierStructureCertificate:
    R: int
    delta: float
    support: tuple[int, ...]

    def to_dict(self):
        return asdict(self)


def fourier_structure(f: GroupFunction, R: int) -> FourierStructureCertificate:
    if R < 0:
        raise ValueError("R must be non-negative")
    c = fourier_rows(f.group, f.values[None, :])[0]
    order = _top_r_order(c)[: min(R, c.size)]
    return FourierStructureCertificate(R, float(_tail_residuals(c, R)), tuple(int(i) for i in order))


def order1_certificate(f: GroupFunction) -> tuple[int, float]:
    """Index of the largest Fourier coefficient and the distance to its component."""
    _require_unit_ball(f)
    c = fourier_rows(f.group, f.values[None, :])[0]
    best = int(_top_r_order(c)[0])
    return best, float(_tail_residuals(c, 1))


@dataclass(frozen=True)
class CharacterCertificate:
    order: int
    R: int
    delta: float
    per_shift_residuals: np.ndarray = field(repr=False)
    worst_t: int

    def to_dict(self, bins: int = 10):
        hist, edges = np.histogram(self.per_shift_residuals, bins=bins)
        return {
            "order": self.order,
            "R": self.R,
            "delta": self.delta,
            "worst_t": self.worst_t,
            "residual_histogram": {"counts": hist.tolist(), "edges": edges.tolist()},
        }


def derivative_residuals(f: GroupFunction, R: int) -> np.ndarray:
    """Top-R Fourier residual of Delta_t f for every shift t."""
    coeffs = fourier_rows(f.group, all_derivatives(f))
    return _tail_residuals(coeffs, R)


def quadratic_certificate(f: GroupFunction, R: int) -> CharacterCertificate:
    _require_unit_ball(f)
    res = derivative_residuals(f, R)
    worst = int(np.argmax(res))
    return CharacterCertificate(2, R, float(res[worst]), res, worst)


@dataclass(frozen=True)
class WeakCharacterCertificate:
    R: int
    delta1: float
    delta2: float
    good_set_size: int

    def to_dict(self):
        return asdict(self)


def weak_quadratic_certificate(f: GroupFunction, R: int, delta1: float, atol: float = 1e-9) -> WeakCharacterCertificate:
    """delta2 is the fraction of shifts whose residual exceeds delta1 (+atol)."""
    _require_unit_ball(f)
    res = derivative_residuals(f, R)
    bad = int(np.count_nonzero(res > delta1 + atol))
    n = f.group.order
    return WeakCharacterCertificate(R, float(delta1), bad / n, n - bad)


@dataclass
class StabilityReport:
    epsilon: float
    gamma: float
    delta: float
    residual: float
    # stable => weak character
    implied_R: float
    implied_delta1: float
    implied_delta2: float
    forward_applicable: bool
    achieved_delta2: float | None
    forward_holds: bool | None
    # weak character => stable
    R: int
    delta1: float
    measured_delta2: float
    backward_bound: float
    backward_margin: float

    def to_dict(self):
        return asdict(self)


def stability_correspondence(f: GroupFunction, eps: float, gamma: float, delta: float,
                             R: int = 1, delta1: float = 0.0) -> StabilityReport:
    """Check both directions linking denoising stability and weak characters.

    Forward: if the residual is at most gamma, the function should pass the
    weak test with R = 4/(eps delta)^2, delta1 = (2 gamma/delta)^(1/2) and a
    bad-shift fraction of at most delta.
    Backward: measuring the weak certificate at (R, delta1) gives delta2, and
    the residual should not exceed 6 eps^(1/4) R^(1/2) + 4 delta1 + 2 delta2^(1/2).
    """
    if f.sup_norm() > 1 + NORM_TOL:
        raise ValueError("stability correspondence needs a 1-bounded function")
    if not (0 < delta <= 1 and gamma >= 0):
        raise ValueError("need 0 < delta <= 1 and gamma >= 0")
    n = f.group.order
    residual = denoising_residual(f, eps)
    implied_R = 4.0 / (eps * delta) ** 2
    implied_d1 = math.sqrt(2 * gamma / delta)
    applicable = residual <= gamma
    achieved = holds = None
    if applicable:
        r_check = n if implied_R >= n else int(math.floor(implied_R))
        achieved = weak_quadratic_certificate(f, r_check, implied_d1).delta2
        holds = achieved <= delta + 1e-12
    measured = weak_quadratic_certificate(f, R, delta1)
    bound = 6 * eps**0.25 * math.sqrt(R) + 4 * delta1 + 2 * math.sqrt(measured.delta2)
    return StabilityReport(eps, gamma, delta, residual, implied_R, implied_d1, delta, applicable,
                           achieved, holds, R, delta1, measured.delta2, bound, bound - residual)


def _log_poly_plus(x: float, lam: float, n: int) -> float:
    """log of p_n^+(x, lam) = |lam|^-1 x (x^2/4 + |lam| x/2 + 1 - lam^2/4)^n."""
    base = x * x / 4 + abs(lam) * x / 2 + abs(1 - lam * lam / 4)
    return -math.log(abs(lam)) + math.log(x) + n * math.log(base)


@dataclass
class IsolatedEigenvectorCheck:
    eigenvalue: float
    theorem_R: float
    theorem_delta1: float
    theorem_delta2: float
    checked_R: int
    measured_delta2: float
    measured_delta_R1: float
    passed: bool

    def to_dict(self):
        return asdict(self)


def isolated_eigenvector_check(f: GroupFunction, eps: float, theta: float) -> list[IsolatedEigenvectorCheck]:
    """Test every theta-isolated eigenvalue >= theta of lift(K_eps, f (x) conj f).

    The quoted parameters are (2 theta^-3 eps^-1 (1/(2 eps) + 1)^(2n),
    3 theta^(1/2), theta) with n = ceil(8 theta^-2 ln(1/theta)). The check
    itself uses the Fourier-structure form: derivatives of the eigenvector
    should be within 3 theta^(1/2) of R-term combinations for all but a theta
    fraction of shifts, with R = p_n^+(||M||_MA, lam)^2 / theta capped at |Z|.
    """
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    m = lift_outer(denoise(eps), f)
    ed = eigendecompose(m)
    n_group = f.group.order
    m_ma = ma_norm(m)
    deg = math.ceil(8 * theta**-2 * math.log(1 / theta))
    log_theorem_r = math.log(2) - 3 * math.log(theta) - math.log(eps) + 2 * deg * math.log(1 / (2 * eps) + 1)
    theorem_r = math.exp(log_theorem_r) if log_theorem_r < 700 else math.inf
    out = []
    for i, lam in enumerate(ed.eigenvalues):
        if lam < theta or not is_theta_isolated(ed, float(lam), theta):
            continue
        v = ed.vector(i)
        n_iso = max(0, math.ceil(4 * theta**-2 * math.log(1 / (theta * lam))))
        log_r = 2 * _log_poly_plus(m_ma, float(lam), n_iso) - math.log(theta)
        r_check = n_group if log_r >= math.log(n_group) else max(1, int(math.floor(math.exp(log_r))))
        cert = weak_quadratic_certificate(v, r_check, 3 * math.sqrt(theta))
        out.append(IsolatedEigenvectorCheck(
            float(lam), theorem_r, 3 * math.sqrt(theta), theta, r_check, cert.delta2,
            quadratic_certificate(v, 1).delta, cert.delta2 <= theta))
    if not out:
        raise ValueError("no qualifying eigenvalue")
    return out


def correlation_bound(a: float, R: int, delta1: float, delta2: float) -> float:
    """Upper bound on |<f, g>| for a weak character g and ||f||_{U^3} <= a."""
    return math.sqrt(a * a * R + delta1 + math.sqrt(delta2))
