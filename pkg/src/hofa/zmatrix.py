"""Dense Z-matrices: kernels of averaging integral operators on a group.

A Z-matrix acts by ``(M f)(x) = E_y M(x, y) f(y)`` and multiplies by
``(M M')(x, y) = E_z M(x, z) M'(z, y)``. With this normalization the unit of
the algebra is ``|Z|`` times the ordinary identity matrix, see
:func:`identity`. Eigenvalues of the operator are those of the raw array
divided by ``|Z|``.

The t-th diagonal of M is the function ``z -> M(z + t, z)``. The diagonal
family of ``f (x) conj(f)`` is the family of multiplicative derivatives of f.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .group import GroupFunction, GroupSpec, fourier_rows

MAX_ORDER = 4096
MAX_POLY_DEGREE = 64


@dataclass(frozen=True, eq=False)
class ZMatrix:
    group: GroupSpec
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        n = self.group.order
        if entries.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} kernel for {self.group}, got {entries.shape}")
        object.__setattr__(self, "entries", entries)

    def _check(self, other: "ZMatrix"):
        if other.group != self.group:
            raise ValueError(f"group mismatch: {self.group} vs {other.group}")

    def __add__(self, other: "ZMatrix") -> "ZMatrix":
        self._check(other)
        return ZMatrix(self.group, self.entries + other.entries)

    def __sub__(self, other: "ZMatrix") -> "ZMatrix":
        self._check(other)
        return ZMatrix(self.group, self.entries - other.entries)

    def __mul__(self, c) -> "ZMatrix":
        return ZMatrix(self.group, self.entries * c)

    __rmul__ = __mul__

    def __neg__(self):
        return ZMatrix(self.group, -self.entries)

    def adjoint(self) -> "ZMatrix":
        return ZMatrix(self.group, self.entries.conj().T)

    def self_adjoint_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def __matmul__(self, other):
        if isinstance(other, ZMatrix):
            return matmul(self, other)
        return matvec(self, other)


def _check_size(group: GroupSpec):
    if group.order > MAX_ORDER:
        raise ValueError(f"|Z| = {group.order} exceeds the dense limit {MAX_ORDER}")


def identity(group: GroupSpec) -> ZMatrix:
    """Unit of the normalized algebra: |Z| on the main diagonal."""
    return ZMatrix(group, group.order * np.eye(group.order, dtype=complex))


def outer(f: GroupFunction, g: GroupFunction) -> ZMatrix:
    """The rank-one kernel (x, y) -> f(x) conj(g(y))."""
    f._check(g)
    _check_size(f.group)
    return ZMatrix(f.group, np.outer(f.values, g.values.conj()))


def diagonals(m: ZMatrix) -> np.ndarray:
    """Array D with D[t, z] = M(z + t, z)."""
    table = m.group.add_table()
    cols = np.arange(m.group.order)[None, :]
    return m.entries[table, cols]


def diagonal(m: ZMatrix, t) -> GroupFunction:
    g = m.group
    rows = g.add_table()[g.index(t)]
    return GroupFunction(g, m.entries[rows, np.arange(g.order)])


def from_diagonals(group: GroupSpec, family) -> ZMatrix:
    """Rebuild M(x, y) = F[x - y](y) from a full (|Z|, |Z|) diagonal family."""
    if isinstance(family, (list, tuple)):
        family = np.stack([f.values if isinstance(f, GroupFunction) else np.asarray(f) for f in family])
    family = np.asarray(family, dtype=complex)
    n = group.order
    if family.shape != (n, n):
        raise ValueError(f"need all {n} diagonals of length {n}, got shape {family.shape}")
    out = np.empty((n, n), dtype=complex)
    out[group.add_table(), np.arange(n)[None, :]] = family
    return ZMatrix(group, out)


def matvec(m: ZMatrix, f: GroupFunction) -> GroupFunction:
    if f.group != m.group:
        raise ValueError(f"group mismatch: {m.group} vs {f.group}")
    return GroupFunction(m.group, m.entries @ f.values / m.group.order)


def matmul(a: ZMatrix, b: ZMatrix) -> ZMatrix:
    a._check(b)
    return ZMatrix(a.group, a.entries @ b.entries / a.group.order)


def matmul_via_diagonals(a: ZMatrix, b: ZMatrix) -> ZMatrix:
    """Product computed diagonal by diagonal.

    D_{AB,w}(z) = E_t D_{A,t}(z + w - t) D_{B,w-t}(z); used to cross-check
    :func:`matmul`.
    """
    a._check(b)
    g = a.group
    n = g.order
    add = g.add_table()
    neg = g.neg_index()
    da, db = diagonals(a), diagonals(b)
    t = np.arange(n)
    out = np.empty((n, n), dtype=complex)
    for w in range(n):
        w_minus_t = add[w, neg]                      # shape (n,) indexed by t
        shifted = add[w_minus_t]                     # [t, z] -> z + w - t
        out[w] = np.mean(da[t[:, None], shifted] * db[w_minus_t], axis=0)
    return from_diagonals(g, out)


def l2_norm(m: ZMatrix) -> float:
    return float(np.sqrt(np.mean(np.abs(m.entries) ** 2)))


def wiener_norm(f: GroupFunction) -> float:
    """||f||_A: the l1 norm of the Fourier coefficients."""
    return float(np.sum(np.abs(fourier_rows(f.group, f.values[None, :])[0])))


def ma_norm(m: ZMatrix) -> float:
    """Largest Wiener norm over the diagonals."""
    coeffs = fourier_rows(m.group, diagonals(m))
    return float(np.max(np.sum(np.abs(coeffs), axis=1)))


def du_norm(m: ZMatrix, k: int) -> float:
    """(E_t ||D_{M,t}||_{U^k}^{2^k})^{1/2^k} for k in {2, 3}."""
    from .gowers import uk_power_rows

    if k not in (2, 3):
        raise ValueError(f"du_norm supports k in {{2, 3}}, got {k}")
    powers = uk_power_rows(m.group, diagonals(m), k)
    return float(np.mean(powers) ** (1.0 / 2**k))


def poly_plus(coeffs) -> np.ndarray:
    """P+(x) = sum |a_i| x^i, coefficients in ascending order."""
    return np.abs(np.asarray(coeffs, dtype=complex)).astype(float)


def poly_apply(coeffs, m: ZMatrix) -> ZMatrix:
    """Evaluate sum_i a_i M^i in the normalized algebra (Horner's rule)."""
    coeffs = np.asarray(coeffs, dtype=complex).reshape(-1)
    if coeffs.size == 0:
        raise ValueError("empty polynomial")
    if coeffs.size - 1 > MAX_POLY_DEGREE:
        raise ValueError(f"degree {coeffs.size - 1} exceeds the limit {MAX_POLY_DEGREE}")
    n = m.group.order
    unit = n * np.eye(n, dtype=complex)
    acc = coeffs[-1] * unit
    for a in coeffs[-2::-1]:
        acc = acc @ m.entries / n + a * unit
    return ZMatrix(m.group, acc)


def isolation_poly(n: int, lam: float) -> np.ndarray:
    """Ascending coefficients of x (1 - (x - lam)^2 / 4)^n / lam."""
    P = np.polynomial.polynomial
    base = P.polysub([1.0], P.polypow([-lam, 1.0], 2) / 4.0)
    return P.polymul([0.0, 1.0 / lam], P.polypow(base, n))
