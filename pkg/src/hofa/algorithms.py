"""Spectral U^3 regularization and quadratic character decomposition.

``regularize_u3`` builds ``f (x) conj(f)``, denoises every diagonal with
K_eps, eigendecomposes the result and projects f onto the eigenvectors with
eigenvalue at least rho. The continuous variant averages that projection
over thresholds rho' uniform in [rho/2, rho], which amounts to the weight
``w(mu) = clamp((mu - rho/2) / (rho/2), 0, 1)`` on each eigenvector.

``quadratic_character_decomposition`` runs the regularizer twice. If the
kept eigenvalues are delta-separated, the second pass is fed the regularized
function itself. Otherwise it is fed a uniformly random unit vector from the
kept eigenspace, which splits clustered eigenvalues with high probability.
The eigenvectors of the second pass are the candidate quadratic characters.

Random draws use Box-Muller on uniforms from a Philox counter-based stream,
so a seed fixes the output on every platform.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .fourier_ops import average, denoise, lift_outer
from .gowers import uk_norm
from .group import GroupFunction, GroupSpec, all_derivatives
from .spectral import (EigenDecomposition, SpectrumSlice, coefficients, eigendecompose, is_separated,
                       spec_slice, top_slice)
from .zmatrix import ZMatrix, from_diagonals

MAX_CUBIC_ORDER = 128


def _check_unit_interval(**params):
    for name, value in params.items():
        if not 0 < value <= 1:
            raise ValueError(f"{name} must lie in (0, 1], got {value}")


@dataclass(frozen=True)
class RngSeed:
    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & (2**64 - 1), self.stream & (2**64 - 1)], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def box_muller(rng: np.random.Generator, size: int) -> np.ndarray:
    """Standard normal samples from pairs of uniforms."""
    pairs = (size + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # in (0, 1], keeps the log finite
    u2 = rng.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([radius * np.cos(2 * np.pi * u2), radius * np.sin(2 * np.pi * u2)])
    return z[:size]


def complex_gaussian(seed: RngSeed | int, size: int) -> np.ndarray:
    seed = seed if isinstance(seed, RngSeed) else RngSeed(int(seed))
    z = box_muller(seed.generator(), 2 * size)
    return z[:size] + 1j * z[size:]


def random_unit_vector(basis, seed: RngSeed | int) -> GroupFunction:
    """Uniform random unit vector in the span of an orthonormal basis."""
    if isinstance(basis, SpectrumSlice):
        vectors, group = basis.basis, basis.group
    else:
        basis = list(basis)
        if not basis:
            raise ValueError("empty basis")
        vectors = np.stack([v.values for v in basis], axis=1)
        group = basis[0].group
    if vectors.shape[1] == 0:
        raise ValueError("empty basis")
    x = complex_gaussian(seed, vectors.shape[1])
    x /= np.linalg.norm(x)
    return GroupFunction(group, vectors @ x)


@dataclass(eq=False)
class RegularizationReport:
    epsilon: float
    rho: float
    f_reg: GroupFunction
    kept: SpectrumSlice
    u3_residual: float
    l2_residual: float
    eigenvalues: np.ndarray
    continuous: bool = False
    decomposition: EigenDecomposition | None = field(default=None, repr=False)

    def eigen_summary(self, top: int = 10) -> dict:
        return {
            "kept": self.kept.eigenvalues.tolist(),
            "top": self.eigenvalues[:top].tolist(),
            "count": int(self.eigenvalues.size),
        }

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "rho": self.rho,
            "continuous": self.continuous,
            "kept_count": self.kept.size,
            "u3_residual": self.u3_residual,
            "l2_residual": self.l2_residual,
            "eigen_summary": self.eigen_summary(),
        }


def _denoised_decomposition(f: GroupFunction, epsilon: float) -> EigenDecomposition:
    return eigendecompose(lift_outer(denoise(epsilon), f))


def _report(f, rho, epsilon, ed, weights, continuous) -> RegularizationReport:
    kept = spec_slice(ed, rho) if not continuous else spec_slice(ed, rho / 2)
    coeffs = coefficients(f, ed.vectors)
    f_reg = GroupFunction(f.group, ed.vectors @ (coeffs * weights))
    diff = f - f_reg
    return RegularizationReport(epsilon, rho, f_reg, kept, uk_norm(diff, 3), diff.norm(),
                                ed.eigenvalues.copy(), continuous, ed)


def _warn_unbounded(f: GroupFunction):
    if f.sup_norm() > 1 + 1e-9:
        warnings.warn("input is not 1-bounded; regularity guarantees assume |f| <= 1", stacklevel=3)


def regularize_u3(f: GroupFunction, rho: float, epsilon: float) -> RegularizationReport:
    _check_unit_interval(rho=rho, epsilon=epsilon)
    _warn_unbounded(f)
    ed = _denoised_decomposition(f, epsilon)
    weights = (ed.eigenvalues >= rho - 1e-12).astype(float)
    return _report(f, rho, epsilon, ed, weights, False)


def continuous_weights(mu: np.ndarray, rho: float) -> np.ndarray:
    return np.clip((np.asarray(mu) - rho / 2) / (rho / 2), 0.0, 1.0)


def regularize_u3_continuous(f: GroupFunction, rho: float, epsilon: float) -> RegularizationReport:
    _check_unit_interval(rho=rho, epsilon=epsilon)
    _warn_unbounded(f)
    ed = _denoised_decomposition(f, epsilon)
    return _report(f, rho, epsilon, ed, continuous_weights(ed.eigenvalues, rho), True)


def choose_rho(eigenvalues, rho0: float) -> tuple[float, float]:
    """Threshold in [rho0/2, rho0] furthest from the spectrum (largest on ties).

    Returns ``(rho, gap)`` where gap is the distance from rho to the nearest
    eigenvalue.
    """
    if isinstance(eigenvalues, EigenDecomposition):
        eigenvalues = eigenvalues.eigenvalues
    if not 0 < rho0 < 1:
        raise ValueError("rho0 must lie in (0, 1)")
    lam = np.sort(np.asarray(eigenvalues, dtype=float))
    lo, hi = rho0 / 2, rho0
    if lam.size == 0:
        return hi, math.inf
    inside = lam[(lam > lo) & (lam < hi)]
    candidates = [lo, hi]
    # midpoints between consecutive eigenvalues around and inside the window
    below = lam[lam <= lo]
    above = lam[lam >= hi]
    points = np.concatenate([below[-1:], inside, above[:1]])
    mids = (points[:-1] + points[1:]) / 2
    candidates.extend(m for m in mids if lo <= m <= hi)
    candidates = np.array(sorted(set(candidates)))
    gaps = np.min(np.abs(candidates[:, None] - lam[None, :]), axis=1)
    best = gaps.max()
    pick = candidates[gaps >= best - 1e-15].max()
    return float(pick), float(np.min(np.abs(pick - lam)))


@dataclass(eq=False)
class CharacterDecompositionReport:
    rho: float
    epsilon: float
    delta: float
    seed: int | None
    branch: str
    first_pass: np.ndarray
    second_pass: np.ndarray
    S: int
    S_prime: int
    vectors: list
    correlations: np.ndarray
    success: bool
    implied_bound: float
    bound_holds: list

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "seed": self.seed,
            "branch": self.branch,
            "S": self.S,
            "S_prime": self.S_prime,
            "success": self.success,
            "first_pass_top": self.first_pass[: max(self.S + 2, 5)].tolist(),
            "second_pass_top": self.second_pass[: max(self.S + 2, 5)].tolist(),
            "correlations": [{"re": c.real, "im": c.imag, "abs": abs(c)} for c in self.correlations],
            "implied_bound": self.implied_bound,
            "bound_holds": self.bound_holds,
        }


def quadratic_character_decomposition(f: GroupFunction, rho: float, epsilon: float, delta: float,
                                      seed: RngSeed | int = 0) -> CharacterDecompositionReport:
    _check_unit_interval(rho=rho, epsilon=epsilon, delta=delta)
    first = regularize_u3(f, rho, epsilon)
    mu = first.eigenvalues
    s = first.kept.size
    top = mu[:s]
    if is_separated(top, delta):
        branch, h = "separated", first.f_reg
    else:
        branch, h = "randomized", random_unit_vector(top_slice(first.decomposition, s), seed)
    second = _denoised_decomposition(h, epsilon)
    mu2 = second.eigenvalues
    s2 = int(np.count_nonzero(mu2 >= delta - 1e-12))
    vectors = [second.vector(i) for i in range(s)]
    corr = np.array([f.inner(v) for v in vectors], dtype=complex)
    success = bool(is_separated(mu2[:s], delta) and s == s2)
    bound = math.sqrt(rho / 4) - 56 * rho**3.5 * f.norm()
    seed_value = seed.seed if isinstance(seed, RngSeed) else int(seed)
    return CharacterDecompositionReport(rho, epsilon, delta, seed_value, branch, mu, mu2, s, s2, vectors, corr,
                                        success, bound, [bool(abs(c) >= bound) for c in corr])


def _lift_function_operator(op, f: GroupFunction) -> ZMatrix:
    rows = all_derivatives(f)
    out = np.stack([op(GroupFunction(f.group, row)).values for row in rows])
    return from_diagonals(f.group, out)


def order_increment(f: GroupFunction, eps_list, rho_list, return_decomposition: bool = False):
    """Iterate the lift-and-project step to reach order k = len(eps_list).

    Stage 1 is the denoiser K_{eps_1}. Stage j >= 2 lifts the stage j-1
    operator to the diagonals of g (x) conj(g), eigendecomposes and projects g
    onto eigenvectors with eigenvalue >= rho_j. Stage 2 therefore coincides
    with ``regularize_u3(f, rho_2, eps_1)``. Only eps_1 and rho_2..rho_k
    enter; the remaining entries are accepted for symmetry of the interface.
    """
    eps_list, rho_list = list(eps_list), list(rho_list)
    if not eps_list or len(eps_list) != len(rho_list):
        raise ValueError("eps_list and rho_list must be non-empty and of equal length")
    k = len(eps_list)
    if k > 3:
        raise ValueError("order_increment supports k <= 3")
    if k == 3 and f.group.order > MAX_CUBIC_ORDER:
        raise ValueError(f"k = 3 needs |Z| <= {MAX_CUBIC_ORDER}")

    def stage(j):
        if j == 1:
            return denoise(eps_list[0])
        inner = stage(j - 1)
        rho = rho_list[j - 1]

        def apply(g: GroupFunction) -> GroupFunction:
            m = _lift_function_operator(inner, g)
            ed = eigendecompose(m)
            keep = ed.eigenvalues >= rho - 1e-12
            return GroupFunction(g.group, ed.vectors[:, keep] @ coefficients(g, ed.vectors[:, keep]))

        apply.decompose = lambda g: eigendecompose(_lift_function_operator(inner, g))
        return apply

    op = stage(k)
    out = op(f)
    if return_decomposition:
        ed = op.decompose(f) if k > 1 else None
        return out, ed
    return out


def classical_regularization(f: GroupFunction, rho: float) -> GroupFunction:
    """Project f onto eigenvectors >= rho of the averaging lift of f (x) conj f."""
    ed = eigendecompose(lift_outer(average(), f))
    keep = ed.eigenvalues >= rho - 1e-12
    return GroupFunction(f.group, ed.vectors[:, keep] @ coefficients(f, ed.vectors[:, keep]))


def chirp_signal(n: int) -> np.ndarray:
    i = np.arange(n, dtype=float)
    return np.sin(8 * i * i + 3 * i + 1)


@dataclass(eq=False)
class DenoiseSeries:
    f: np.ndarray
    g: np.ndarray
    f2: np.ndarray
    eigenvalues: np.ndarray
    config: dict

    @property
    def error(self) -> np.ndarray:
        return np.abs(self.f - self.f2)

    @property
    def noise(self) -> np.ndarray:
        return self.g - self.f

    def l2(self, values) -> float:
        return float(np.sqrt(np.mean(np.abs(values) ** 2)))

    def rows(self):
        err = self.error
        for i in range(self.f.size):
            yield (i, self.f[i].real, self.f[i].imag, self.g[i].real, self.g[i].imag,
                   self.f2[i].real, self.f2[i].imag, err[i])


def denoise_experiment(n: int = 500, noise_sigma: float = 0.3, top_k: int = 6, epsilon: float = 0.1,
                       seed: RngSeed | int = 7) -> DenoiseSeries:
    """Recover sin(8 i^2 + 3 i + 1) on Z_n from a noisy copy (arguments in radians)."""
    if n < 8:
        raise ValueError("n must be at least 8")
    group = GroupSpec.cyclic(n)
    f = chirp_signal(n).astype(complex)
    noise = noise_sigma * box_muller((seed if isinstance(seed, RngSeed) else RngSeed(int(seed))).generator(), n)
    g = GroupFunction(group, f + noise)
    ed = eigendecompose(lift_outer(denoise(epsilon), g))
    basis = ed.vectors[:, :top_k]
    f2 = basis @ coefficients(g, basis) if top_k > 0 else np.zeros(n, dtype=complex)
    config = {"n": n, "noise_sigma": noise_sigma, "top_k": top_k, "epsilon": epsilon,
              "seed": seed.seed if isinstance(seed, RngSeed) else int(seed)}
    return DenoiseSeries(f, g.values, f2, ed.eigenvalues, config)
