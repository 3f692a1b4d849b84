"""Finite abelian groups Z_{N1} x ... x Z_{Nd} and functions on them.

Elements are enumerated in mixed-radix order: the tuple (x_1, ..., x_d) sits
at index sum_j x_j * prod_{l>j} N_l, so the identity is index 0. A function
on the group is a flat complex vector in that order; reshaping it to
``group.factors`` gives the d-dimensional array used by the FFT.

Inner products and L2 norms are normalized (averages over the group), while
Fourier coefficients live on the dual group with counting measure, so
Parseval reads ``f.norm() ** 2 == sum(abs(fourier_transform(f)) ** 2)``.
"""

from __future__ import annotations

import functools
import itertools
import os
import re
from dataclasses import dataclass

import numpy as np
import scipy.fft

_SPEC_TOKEN = re.compile(r"^z(\d+)$", re.IGNORECASE)
_THREADS: int | None = None


def set_threads(n: int | None) -> None:
    """Cap the worker count used by batched FFTs (None restores the default)."""
    global _THREADS
    if n is not None and n < 1:
        raise ValueError("thread count must be positive")
    _THREADS = n


def get_threads() -> int:
    if _THREADS is not None:
        return _THREADS
    env = os.environ.get("HOFA_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class GroupSpec:
    factors: tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(n) for n in self.factors)
        if not factors:
            raise ValueError("a group needs at least one cyclic factor")
        if any(n < 1 for n in factors):
            raise ValueError(f"moduli must be positive, got {factors}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def cyclic(cls, n: int) -> "GroupSpec":
        return cls((n,))

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        """Parse strings such as ``"Z500"`` or ``"z2xZ4"``."""
        parts = text.strip().lower().split("x")
        factors = []
        for part in parts:
            m = _SPEC_TOKEN.match(part.strip())
            if m is None:
                raise ValueError(f"cannot parse group spec {text!r}")
            factors.append(int(m.group(1)))
        return cls(tuple(factors))

    def __str__(self) -> str:
        return "x".join(f"Z{n}" for n in self.factors)

    @property
    def order(self) -> int:
        return int(np.prod(self.factors, dtype=np.int64))

    @property
    def rank(self) -> int:
        return len(self.factors)

    def elements(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(n) for n in self.factors)))

    def index(self, element) -> int:
        """Enumeration index of an element given as a coordinate tuple or an int.

        A bare int is read as an enumeration index (for cyclic groups this is
        the same thing as the residue).
        """
        if isinstance(element, (int, np.integer)):
            return int(element) % self.order
        coords = tuple(element)
        if len(coords) != self.rank:
            raise ValueError(f"element {coords} does not belong to {self}")
        return int(np.ravel_multi_index(coords, self.factors, mode="wrap"))

    def coords(self, index: int) -> tuple[int, ...]:
        return tuple(int(c) for c in np.unravel_index(index, self.factors))

    def coordinate_grid(self) -> np.ndarray:
        """Array of shape (|Z|, d) holding the coordinates of every element."""
        grids = np.meshgrid(*(np.arange(n) for n in self.factors), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def add_table(self) -> np.ndarray:
        return _add_table(self.factors)

    def neg_index(self) -> np.ndarray:
        return _neg_index(self.factors)

    def character(self, freq) -> "GroupFunction":
        """The character x -> exp(2 pi i sum_j freq_j x_j / N_j)."""
        freq = np.asarray(self.coords(freq) if np.isscalar(freq) else freq)
        grid = self.coordinate_grid()
        phase = (grid * freq[None, :] / np.asarray(self.factors)[None, :]).sum(axis=1)
        return GroupFunction(self, np.exp(2j * np.pi * phase))

    def zeros(self) -> "GroupFunction":
        return GroupFunction(self, np.zeros(self.order, dtype=complex))

    def constant(self, c) -> "GroupFunction":
        return GroupFunction(self, np.full(self.order, c, dtype=complex))

    def delta(self, element=0) -> "GroupFunction":
        v = np.zeros(self.order, dtype=complex)
        v[self.index(element)] = 1.0
        return GroupFunction(self, v)


@functools.lru_cache(maxsize=32)
def _add_table(factors: tuple[int, ...]) -> np.ndarray:
    n = int(np.prod(factors))
    grid = GroupSpec(factors).coordinate_grid()
    total = (grid[:, None, :] + grid[None, :, :]) % np.asarray(factors)
    table = np.ravel_multi_index(tuple(total[..., j] for j in range(len(factors))), factors)
    table = table.astype(np.int32 if n < 2**31 else np.int64)
    table.setflags(write=False)
    return table


@functools.lru_cache(maxsize=32)
def _neg_index(factors: tuple[int, ...]) -> np.ndarray:
    grid = GroupSpec(factors).coordinate_grid()
    neg = (-grid) % np.asarray(factors)
    out = np.ravel_multi_index(tuple(neg[:, j] for j in range(len(factors))), factors)
    out.setflags(write=False)
    return out


def enumerate_group(group: GroupSpec) -> list[tuple[int, ...]]:
    return group.elements()


class GroupFunction:
    """A complex-valued function on a finite abelian group."""

    __slots__ = ("group", "values")

    def __init__(self, group: GroupSpec, values):
        values = np.asarray(values, dtype=complex).reshape(-1)
        if values.shape[0] != group.order:
            raise ValueError(f"expected {group.order} values for {group}, got {values.shape[0]}")
        self.group = group
        self.values = values

    def __repr__(self):
        return f"GroupFunction({self.group}, {self.values!r})"

    def __len__(self):
        return self.group.order

    def _check(self, other: "GroupFunction"):
        if other.group != self.group:
            raise ValueError(f"group mismatch: {self.group} vs {other.group}")

    def _coerce(self, other):
        if isinstance(other, GroupFunction):
            self._check(other)
            return other.values
        return other

    def __add__(self, other):
        return GroupFunction(self.group, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GroupFunction(self.group, self.values - self._coerce(other))

    def __rsub__(self, other):
        return GroupFunction(self.group, self._coerce(other) - self.values)

    def __mul__(self, other):
        return GroupFunction(self.group, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, c):
        return GroupFunction(self.group, self.values / c)

    def __neg__(self):
        return GroupFunction(self.group, -self.values)

    def conj(self) -> "GroupFunction":
        return GroupFunction(self.group, self.values.conj())

    def inner(self, other: "GroupFunction") -> complex:
        """Normalized inner product E_x f(x) conj(g(x))."""
        self._check(other)
        return complex(np.vdot(other.values, self.values) / self.group.order)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) / self.group.order))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def mean(self) -> complex:
        return complex(np.mean(self.values))

    def as_array(self) -> np.ndarray:
        """Values reshaped to the d-dimensional grid ``group.factors``."""
        return self.values.reshape(self.group.factors)

    def allclose(self, other: "GroupFunction", atol=1e-10) -> bool:
        self._check(other)
        return bool(np.allclose(self.values, other.values, rtol=0, atol=atol))


def _fft_axes(ndim_batch: int, group: GroupSpec) -> tuple[int, ...]:
    return tuple(range(ndim_batch, ndim_batch + group.rank))


def fourier_rows(group: GroupSpec, rows: np.ndarray) -> np.ndarray:
    """Fourier coefficients of each row of a (m, |Z|) array of function values."""
    rows = np.asarray(rows, dtype=complex)
    m = rows.shape[0]
    grid = rows.reshape((m,) + group.factors)
    out = scipy.fft.fftn(grid, axes=_fft_axes(1, group), workers=get_threads())
    return out.reshape(m, group.order) / group.order


def inverse_fourier_rows(group: GroupSpec, coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=complex)
    m = coeffs.shape[0]
    grid = coeffs.reshape((m,) + group.factors)
    out = scipy.fft.ifftn(grid, axes=_fft_axes(1, group), workers=get_threads())
    return out.reshape(m, group.order) * group.order


def fourier_transform(f: GroupFunction) -> np.ndarray:
    """Coefficients f^(chi) = E_x f(x) conj(chi(x)), indexed like the group."""
    return fourier_rows(f.group, f.values[None, :])[0]


def inverse_fourier_transform(group: GroupSpec, coeffs) -> GroupFunction:
    coeffs = np.asarray(coeffs, dtype=complex).reshape(-1)
    if coeffs.shape[0] != group.order:
        raise ValueError(f"expected {group.order} coefficients for {group}, got {coeffs.shape[0]}")
    return GroupFunction(group, inverse_fourier_rows(group, coeffs[None, :])[0])


def character_table(group: GroupSpec) -> np.ndarray:
    """Matrix C[chi, x] = chi(x); used by the direct O(|Z|^2) oracle."""
    grid = group.coordinate_grid()
    scaled = grid / np.asarray(group.factors)[None, :]
    return np.exp(2j * np.pi * (grid @ scaled.T))


def fourier_transform_direct(f: GroupFunction) -> np.ndarray:
    table = character_table(f.group)
    return table.conj() @ f.values / f.group.order


def shift(f: GroupFunction, h) -> GroupFunction:
    """(T^h f)(x) = f(x + h)."""
    idx = f.group.add_table()[f.group.index(h)]
    return GroupFunction(f.group, f.values[idx])


def mult_derivative(f: GroupFunction, t) -> GroupFunction:
    """Multiplicative derivative x -> f(x + t) conj(f(x))."""
    return shift(f, t) * f.conj()


def all_derivatives(f: GroupFunction) -> np.ndarray:
    """Row t holds Delta_t f; this is also the diagonal family of f (x) conj(f)."""
    table = f.group.add_table()
    return f.values[table] * f.values.conj()[None, :]
