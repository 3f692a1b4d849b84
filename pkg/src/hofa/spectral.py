"""Normalized eigendecomposition of self-adjoint Z-matrices and perturbation tools.

Conventions: an eigenvalue of the operator ``f -> E_y M(., y) f(y)`` is a raw
matrix eigenvalue divided by |Z|, and eigenvectors are scaled to unit
normalized L2 norm (raw unit vectors times sqrt(|Z|)). Eigenvalues are sorted
in non-increasing order, ties broken by the solver's original index.

Bases are stored as (|Z|, k) arrays whose columns are L2-orthonormal in the
normalized inner product, so the orthogonal projection onto their span is
``B B^* / |Z|``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .group import GroupFunction, GroupSpec
from .zmatrix import ZMatrix

SELF_ADJOINT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    group: GroupSpec
    eigenvalues: np.ndarray
    vectors: np.ndarray  # column i is the i-th eigenvector

    def vector(self, i: int) -> GroupFunction:
        return GroupFunction(self.group, self.vectors[:, i])

    def __len__(self):
        return self.eigenvalues.size

    def reconstruct(self) -> ZMatrix:
        v = self.vectors
        return ZMatrix(self.group, (v * self.eigenvalues[None, :]) @ v.conj().T)


@dataclass(frozen=True, eq=False)
class SpectrumSlice:
    rho: float
    eigenvalues: np.ndarray
    basis: np.ndarray
    group: GroupSpec

    @property
    def size(self) -> int:
        return self.eigenvalues.size

    def vector(self, i: int) -> GroupFunction:
        return GroupFunction(self.group, self.basis[:, i])


def _check_self_adjoint(m: ZMatrix):
    scale = max(1.0, float(np.max(np.abs(m.entries), initial=0.0)))
    defect = m.self_adjoint_defect()
    if defect > SELF_ADJOINT_TOL * scale:
        raise ValueError(f"matrix is not self-adjoint (defect {defect:.3e})")


def eigendecompose(m: ZMatrix) -> EigenDecomposition:
    _check_self_adjoint(m)
    n = m.group.order
    h = (m.entries + m.entries.conj().T) / 2
    w, v = np.linalg.eigh(h / n)
    order = np.lexsort((np.arange(n), -w))
    return EigenDecomposition(m.group, w[order], v[:, order] * np.sqrt(n))


def spec_slice(ed: EigenDecomposition, rho: float) -> SpectrumSlice:
    """Eigenvalues >= rho (a value within 1e-12 below rho counts) and their span."""
    keep = ed.eigenvalues >= rho - 1e-12
    return SpectrumSlice(rho, ed.eigenvalues[keep], ed.vectors[:, keep], ed.group)


def top_slice(ed: EigenDecomposition, k: int) -> SpectrumSlice:
    k = max(0, min(k, len(ed)))
    rho = float(ed.eigenvalues[k - 1]) if k else float("inf")
    return SpectrumSlice(rho, ed.eigenvalues[:k], ed.vectors[:, :k], ed.group)


def _as_basis(basis, group: GroupSpec | None = None) -> np.ndarray:
    if isinstance(basis, SpectrumSlice):
        return basis.basis
    if isinstance(basis, (list, tuple)):
        if not basis:
            n = group.order if group is not None else 0
            return np.zeros((n, 0), dtype=complex)
        return np.stack([b.values if isinstance(b, GroupFunction) else np.asarray(b) for b in basis], axis=1)
    return np.asarray(basis, dtype=complex)


def coefficients(f: GroupFunction, basis) -> np.ndarray:
    """<f, v_i> for each basis vector."""
    b = _as_basis(basis, f.group)
    return b.conj().T @ f.values / f.group.order


def project(f: GroupFunction, basis, weights=None) -> GroupFunction:
    """Orthogonal projection sum_i w_i <f, v_i> v_i (weights default to 1)."""
    b = _as_basis(basis, f.group)
    c = coefficients(f, b)
    if weights is not None:
        c = c * np.asarray(weights)
    return GroupFunction(f.group, b @ c)


def is_separated(values, delta: float) -> bool:
    if delta < 0:
        raise ValueError("delta must be non-negative")
    v = np.sort(np.asarray(values, dtype=float))
    return bool(np.all(np.diff(v) >= delta))


def is_theta_isolated(ed: EigenDecomposition, lam: float, theta: float, tol: float = 1e-10) -> bool:
    dist = np.abs(ed.eigenvalues - lam)
    if dist.min() > tol:
        raise ValueError(f"{lam} is not an eigenvalue (nearest at distance {dist.min():.3e})")
    if np.count_nonzero(dist <= tol) > 1:
        return False
    others = dist[dist > tol]
    return bool(np.all(others > theta))


def pseudo_residual(m: ZMatrix, v: GroupFunction, lam: float) -> float:
    """||M v - lam v||_2 for a unit vector v."""
    if abs(v.norm() - 1.0) > 1e-8:
        raise ValueError(f"vector must have unit norm, got {v.norm()}")
    n = m.group.order
    r = m.entries @ v.values / n - lam * v.values
    return float(np.sqrt(np.mean(np.abs(r) ** 2)))


def cluster_project(ed: EigenDecomposition, u: GroupFunction, lam: float, delta: float) -> GroupFunction:
    """Component of u along eigenvectors whose eigenvalues lie within delta of lam."""
    keep = np.abs(ed.eigenvalues - lam) <= delta
    return project(u, ed.vectors[:, keep])


def _projector(basis: np.ndarray) -> np.ndarray:
    n = basis.shape[0]
    gram = basis.conj().T @ basis / n
    if basis.shape[1] and np.max(np.abs(gram - np.eye(basis.shape[1]))) > 1e-8:
        raise ValueError("basis is not orthonormal")
    return basis @ basis.conj().T / n


def subspace_distance(p_basis, q_basis) -> float:
    """Operator norm of the difference of the two orthogonal projections."""
    p = _projector(_as_basis(p_basis))
    q = _projector(_as_basis(q_basis))
    if p.shape != q.shape:
        raise ValueError("bases live in different spaces")
    return float(min(np.linalg.norm(p - q, 2), 1.0))


def hoffman_wielandt_gap(a: ZMatrix, b: ZMatrix) -> float:
    """l2 distance between the sorted normalized spectra of two self-adjoint matrices."""
    a._check(b)
    la = eigendecompose(a).eigenvalues
    lb = eigendecompose(b).eigenvalues
    return float(np.sqrt(np.sum((la - lb) ** 2)))


def gram_schmidt_constant(s: int) -> float:
    if s < 2:
        return 1.0
    if s == 2:
        return 1.0
    return 13.0 * 5.0 ** (s - 3) - 1.0


def gram_schmidt_quantitative(vectors, tau: float | None = None):
    """Orthonormalize unit vectors in order, reporting how far each one moved.

    Returns ``(orthonormal, drift)`` where ``drift[i] = ||u_i - w_i||_2``. When
    ``tau`` is given, the near-orthogonality precondition
    ``|<u_i, u_j>| <= tau / C_s`` is checked and a warning issued if it fails.
    """
    u = _as_basis(vectors)
    n, s = u.shape
    if tau is not None and s > 1:
        gram = u.conj().T @ u / n
        off = np.abs(gram - np.diag(np.diag(gram))).max()
        if off > tau / gram_schmidt_constant(s) + 1e-15:
            warnings.warn("vectors are less orthogonal than the drift bound assumes", stacklevel=2)
    w = np.zeros_like(u)
    for i in range(s):
        r = u[:, i] - w[:, :i] @ (w[:, :i].conj().T @ u[:, i] / n)
        w[:, i] = r / np.sqrt(np.mean(np.abs(r) ** 2))
    drift = np.sqrt(np.mean(np.abs(u - w) ** 2, axis=0))
    return w, drift


def nearest_unitary(w: np.ndarray):
    """Unitary factor of the polar decomposition and the largest entrywise change."""
    w = np.asarray(w, dtype=complex)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError("nearest_unitary needs a square matrix")
    if np.linalg.svd(w, compute_uv=False).min() < 1e-12:
        raise ValueError("matrix is rank deficient")
    u, _ = scipy.linalg.polar(w)
    return u, float(np.max(np.abs(w - u)))


def quasiunitary_defect(w: np.ndarray) -> float:
    """sup over unit x of | ||Wx||^2 - ||x||^2 |, i.e. the spectral radius of W*W - I."""
    w = np.asarray(w, dtype=complex)
    g = w.conj().T @ w - np.eye(w.shape[1])
    return float(np.max(np.abs(np.linalg.eigvalsh((g + g.conj().T) / 2))))
