"""Invariant operators on functions and their diagonal-wise lift to Z-matrices.

The main operator is the Fourier denoiser K_eps, which shrinks the modulus
of every Fourier coefficient by eps (clipping at zero) and keeps its phase.
Lifting an operator K to a Z-matrix M means applying K to each diagonal of M
and reassembling; for ``M = f (x) conj(f)`` the diagonals are the derivatives
``Delta_t f``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .gowers import _dual_rows, dual_function  # noqa: F401  (re-exported)
from .group import GroupFunction, GroupSpec, all_derivatives, fourier_rows, inverse_fourier_rows
from .zmatrix import ZMatrix, diagonals, from_diagonals


def _check_eps(eps: float):
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")


def q_eps(z, eps: float):
    """Shrink |z| by eps towards zero, keeping the phase."""
    _check_eps(eps)
    z = np.asarray(z, dtype=complex)
    mod = np.abs(z)
    scale = np.divide(np.maximum(mod - eps, 0.0), mod, out=np.zeros_like(mod), where=mod > 0)
    out = z * scale
    return out if out.ndim else complex(out)


def q_eps_prime(z, eps: float):
    """The removed part z - q_eps(z); its modulus is min(|z|, eps)."""
    _check_eps(eps)
    z = np.asarray(z, dtype=complex)
    mod = np.abs(z)
    scale = np.divide(np.minimum(mod, eps), mod, out=np.zeros_like(mod), where=mod > 0)
    out = z * scale
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class RadialProfile:
    """A modulus map r >= 0 with r(0) = 0, acting as z -> z r(|z|) / |z|."""

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(compare=False)

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))

    def apply(self, z: np.ndarray) -> np.ndarray:
        mod = np.abs(z)
        scale = np.divide(self(mod), mod, out=np.zeros_like(mod), where=mod > 0)
        return z * scale


def relu_shift(eps: float) -> RadialProfile:
    _check_eps(eps)
    return RadialProfile(f"relu_shift({eps!r})", lambda x: np.maximum(x - eps, 0.0))


def lipschitz_ramp(eps: float) -> RadialProfile:
    """Keeps x >= eps, ramps linearly as 2x - eps on [eps/2, eps], zero below."""
    _check_eps(eps)

    def ramp(x):
        return np.where(x >= eps, x, np.where(x >= eps / 2, 2 * x - eps, 0.0))

    return RadialProfile(f"lipschitz_ramp({eps!r})", ramp)


@dataclass(frozen=True)
class InvariantOperator:
    """A map on functions commuting with shifts and conjugation.

    ``rows_map`` acts on a (m, |Z|) array of function values, one function per
    row, so a lift can process every diagonal in one batched FFT.
    """

    kind: str
    params: tuple
    rows_map: Callable[[GroupSpec, np.ndarray], np.ndarray] = field(compare=False, repr=False)

    def __call__(self, f: GroupFunction) -> GroupFunction:
        return GroupFunction(f.group, self.rows_map(f.group, f.values[None, :])[0])

    def apply_rows(self, group: GroupSpec, rows: np.ndarray) -> np.ndarray:
        return self.rows_map(group, np.asarray(rows, dtype=complex))


def _coefficient_map(coeff_fn):
    def rows_map(group, rows):
        return inverse_fourier_rows(group, coeff_fn(fourier_rows(group, rows)))
    return rows_map


def denoise(eps: float) -> InvariantOperator:
    _check_eps(eps)
    return InvariantOperator("denoise", (eps,), _coefficient_map(lambda c: q_eps(c, eps)))


def radial(profile: RadialProfile) -> InvariantOperator:
    return InvariantOperator("radial", (profile.name,), _coefficient_map(profile.apply))


def sharp_cutoff_operator(eps: float) -> InvariantOperator:
    if eps < 0:
        raise ValueError("cutoff must be non-negative")
    return InvariantOperator("sharp_cutoff", (eps,), _coefficient_map(lambda c: np.where(np.abs(c) >= eps, c, 0)))


def average() -> InvariantOperator:
    def rows_map(group, rows):
        return np.repeat(rows.mean(axis=1, keepdims=True), rows.shape[1], axis=1)
    return InvariantOperator("average", (), rows_map)


def identity_operator() -> InvariantOperator:
    return InvariantOperator("identity", (), lambda group, rows: rows.copy())


def dual(k: int) -> InvariantOperator:
    if k not in (2, 3):
        raise ValueError(f"dual operator supports k in {{2, 3}}, got {k}")
    return InvariantOperator("dual", (k,), lambda group, rows: _dual_rows(group, rows, k))


def apply_K_r(f: GroupFunction, profile: RadialProfile) -> GroupFunction:
    return radial(profile)(f)


def apply_K_eps(f: GroupFunction, eps: float) -> GroupFunction:
    return denoise(eps)(f)


def averaging_operator(f: GroupFunction) -> GroupFunction:
    return f.group.constant(f.mean())


def sharp_cutoff(f: GroupFunction, eps: float) -> GroupFunction:
    """Drop every Fourier coefficient of modulus below eps."""
    return sharp_cutoff_operator(eps)(f)


def lift(op: InvariantOperator, m: ZMatrix) -> ZMatrix:
    """Apply ``op`` to every diagonal of ``m`` and reassemble."""
    return from_diagonals(m.group, op.apply_rows(m.group, diagonals(m)))


def lift_outer(op: InvariantOperator, f: GroupFunction) -> ZMatrix:
    """lift(op, f (x) conj(f)) without materializing the rank-one matrix first."""
    return from_diagonals(f.group, op.apply_rows(f.group, all_derivatives(f)))


def denoising_residual(f: GroupFunction, eps: float) -> float:
    """||lift(K_eps, f (x) conj f) - f (x) conj f||_2 from the derivative spectra.

    Each coefficient of each Delta_t f loses min(|c|, eps) in modulus, so the
    squared residual is E_t sum_chi min(|c|, eps)^2.
    """
    _check_eps(eps)
    coeffs = fourier_rows(f.group, all_derivatives(f))
    per_shift = np.sum(np.minimum(np.abs(coeffs), eps) ** 2, axis=1)
    return float(np.sqrt(np.mean(per_shift)))
