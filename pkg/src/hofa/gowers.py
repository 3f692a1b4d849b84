"""Gowers uniformity norms, Gowers products and polynomial phase fixtures.

The fast route uses ``||f||_{U^k}^{2^k} = E_t ||Delta_t f||_{U^{k-1}}^{2^{k-1}}``
down to k = 2, where ``||f||_{U^2}^4`` is the l4 norm of the Fourier
coefficients raised to the fourth power. For k = 3 this costs
O(|Z|^2 log |Z|). The direct cube average is kept as an oracle and is
guarded by ``|Z|^(k+1) <= 1e8``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .group import GroupFunction, GroupSpec, fourier_rows, inverse_fourier_rows

DIRECT_WORK_LIMIT = 10**8


def _fsum_mean(values) -> float:
    values = np.asarray(values, dtype=float)
    return math.fsum(values.tolist()) / values.size


def uk_power_rows(group: GroupSpec, rows: np.ndarray, k: int) -> np.ndarray:
    """||row||_{U^k}^{2^k} for every row of a (m, |Z|) array."""
    rows = np.asarray(rows, dtype=complex)
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if k == 1:
        return np.abs(rows.mean(axis=1)) ** 2
    if k == 2:
        return np.sum(np.abs(fourier_rows(group, rows)) ** 4, axis=1)
    table = group.add_table()
    out = np.empty(rows.shape[0])
    for i, row in enumerate(rows):
        derivs = row[table] * row.conj()[None, :]
        out[i] = _fsum_mean(uk_power_rows(group, derivs, k - 1))
    return out


def uk_power(f: GroupFunction, k: int) -> float:
    """||f||_{U^k}^{2^k} by the derivative recursion."""
    return float(uk_power_rows(f.group, f.values[None, :], k)[0])


def uk_norm(f: GroupFunction, k: int, method: str = "recursive_fft") -> float:
    if method == "direct":
        return uk_norm_direct(f, k)
    if method != "recursive_fft":
        raise ValueError(f"unknown method {method!r}")
    return max(uk_power(f, k), 0.0) ** (1.0 / 2**k)


def _check_direct(group: GroupSpec, k: int):
    work = group.order ** (k + 1)
    if work > DIRECT_WORK_LIMIT:
        raise ValueError(f"direct average needs |Z|^(k+1) = {work} > {DIRECT_WORK_LIMIT} terms")


def gowers_product(family, k: int) -> complex:
    """Direct Gowers product E_{x,t} prod_v C^{|v|} f_v(x + v.t).

    ``family[i]`` is the function at the vertex v whose bits v_1..v_k are
    the binary digits of i, least significant first.
    """
    family = list(family)
    if len(family) != 2**k:
        raise ValueError(f"need 2^{k} = {2**k} functions, got {len(family)}")
    group = family[0].group
    for f in family:
        f._check(family[0])
    _check_direct(group, k)
    n = group.order
    table = group.add_table()
    vals = [f.values for f in family]
    x = np.arange(n)
    total = 0.0 + 0.0j
    # vectorized over x and t_k, looping over t_1..t_{k-1}
    for ts in itertools.product(range(n), repeat=k - 1):
        acc = np.ones((n, n), dtype=complex)  # [t_k, x]
        for i in range(2**k):
            bits = [(i >> j) & 1 for j in range(k)]
            offset = 0
            for j in range(k - 1):
                if bits[j]:
                    offset = table[offset, ts[j]]
            pos = table[x, offset]
            if bits[k - 1]:
                pos = table[pos[None, :], x[:, None]]
            else:
                pos = np.broadcast_to(pos, (n, n))
            v = vals[i][pos]
            acc *= v.conj() if sum(bits) % 2 else v
        total += acc.sum()
    return complex(total / n ** (k + 1))


def _real_part(z: complex, what: str) -> float:
    if abs(z.imag) > 1e-9 * max(1.0, abs(z.real)):
        raise ArithmeticError(f"{what} has imaginary residue {z.imag:.3e}")
    return z.real


def uk_norm_direct(f: GroupFunction, k: int) -> float:
    """Oracle: the cube average with all vertices equal to f."""
    value = _real_part(gowers_product([f] * 2**k, k), "Gowers norm")
    return max(value, 0.0) ** (1.0 / 2**k)


def gowers_inner(f: GroupFunction, g: GroupFunction, k: int) -> float:
    """<f, g>_{U^k} = E_t ||f . T^t conj(g)||_{U^{k-1}}^{2^{k-1}} (non-negative)."""
    if k < 2:
        raise ValueError("gowers_inner needs k >= 2")
    f._check(g)
    rows = f.values[None, :] * g.values[f.group.add_table()].conj()
    return _fsum_mean(uk_power_rows(f.group, rows, k - 1))


def u2_dual_norm(f: GroupFunction) -> float:
    """||f||*_{U^2}: the l^{4/3} norm of the Fourier coefficients."""
    coeffs = fourier_rows(f.group, f.values[None, :])[0]
    return float(np.sum(np.abs(coeffs) ** (4.0 / 3.0)) ** 0.75)


def _dual_rows(group: GroupSpec, rows: np.ndarray, k: int) -> np.ndarray:
    if k == 1:
        return np.repeat(rows.mean(axis=1, keepdims=True), group.order, axis=1)
    if k == 2:
        c = fourier_rows(group, rows)
        return inverse_fourier_rows(group, c * np.abs(c) ** 2)
    table = group.add_table()
    out = np.empty_like(rows)
    for i, row in enumerate(rows):
        derivs = row[table] * row.conj()[None, :]
        inner = _dual_rows(group, derivs, k - 1)
        # [f]_k(x) = E_t f(x + t) conj([Delta_t f]_{k-1}(x))
        out[i] = np.mean(row[table] * inner.conj(), axis=0)
    return out


def dual_function(f: GroupFunction, k: int) -> GroupFunction:
    """Dual function [f]_k with <f, [f]_k> = ||f||_{U^k}^{2^k}."""
    if k not in (2, 3):
        raise ValueError(f"dual_function supports k in {{2, 3}}, got {k}")
    if k == 3 and f.group.order > 256:
        raise ValueError("dual_function with k=3 is limited to |Z| <= 256")
    return GroupFunction(f.group, _dual_rows(f.group, f.values[None, :], k)[0])


def dual_function_direct(f: GroupFunction, k: int) -> GroupFunction:
    """Oracle: average over t of prod_{v != 0} C^{|v|+1} f(x + v.t)."""
    group = f.group
    n = group.order
    if n ** (k + 1) > DIRECT_WORK_LIMIT:
        raise ValueError("dual function oracle too large")
    table = group.add_table()
    out = np.zeros(n, dtype=complex)
    x = np.arange(n)
    for ts in itertools.product(range(n), repeat=k):
        acc = np.ones(n, dtype=complex)
        for i in range(1, 2**k):
            bits = [(i >> j) & 1 for j in range(k)]
            offset = 0
            for j in range(k):
                if bits[j]:
                    offset = table[offset, ts[j]]
            v = f.values[table[x, offset]]
            acc *= v if sum(bits) % 2 else v.conj()
        out += acc
    return GroupFunction(group, out / n**k)


def poly_phase(group: GroupSpec, coeffs) -> GroupFunction:
    """x -> exp(2 pi i P(x) / N) for an integer polynomial P (ascending coefficients)."""
    if group.rank != 1:
        raise ValueError("polynomial phases are defined on a single cyclic factor")
    n = group.factors[0]
    x = np.arange(n, dtype=np.int64)
    acc = np.zeros(n, dtype=np.int64)
    for a in reversed([int(c) % n for c in coeffs]):
        acc = (acc * x + a) % n
    return GroupFunction(group, np.exp(2j * np.pi * acc / n))


@dataclass(frozen=True)
class GowersConfig:
    k: int = 3
    method: str = "recursive_fft"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.method not in ("recursive_fft", "direct"):
            raise ValueError(f"unknown method {self.method!r}")

    def norm(self, f: GroupFunction) -> float:
        return uk_norm(f, self.k, self.method)
