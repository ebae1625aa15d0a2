"""Truncated-Fock composite Hilbert space utilities.

A composite space is described by a :class:`ModeLayout` (ordered mode labels
with per-mode truncations).  Basis ordering is row-major over the modes, the
last mode varying fastest, so the composite index of Fock occupation
``(n_0, ..., n_{M-1})`` is ``n_0 * d_1 * ... * d_{M-1} + ... + n_{M-1}``.

Operators are stored sparse (CSR) and tagged with their layout; arithmetic
between operators on different layouts is refused rather than silently
broadcast.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

__all__ = [
    "ModeLayout",
    "Operator",
    "mode_operator",
    "embed_matrix",
    "displacement_operator",
    "mode_displacement",
    "fock_projector",
    "level_transition",
    "compose",
    "basis_state",
    "fock_index",
]


@dataclass(frozen=True)
class ModeLayout:
    """Ordered set of bosonic modes with finite Fock truncations."""

    labels: tuple[str, ...]
    dims: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.dims):
            raise ValueError("labels and dims must have equal length")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate mode labels")
        if any(d < 1 for d in self.dims):
            raise ValueError("mode dimensions must be positive")

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no mode labeled {label!r}") from None

    def dim_of(self, label: str) -> int:
        return self.dims[self.index(label)]


def fock_index(layout: ModeLayout, occupations: Sequence[int]) -> int:
    """Composite basis index of a Fock occupation tuple (last mode fastest)."""
    if len(occupations) != len(layout.dims):
        raise ValueError("occupation tuple length mismatch")
    idx = 0
    for n, d in zip(occupations, layout.dims):
        if not 0 <= n < d:
            raise ValueError(f"occupation {n} outside truncation {d}")
        idx = idx * d + n
    return idx


def basis_state(layout: ModeLayout, occupations: Sequence[int]) -> np.ndarray:
    """Dense unit vector for a product Fock state."""
    v = np.zeros(layout.total_dim, dtype=complex)
    v[fock_index(layout, occupations)] = 1.0
    return v


@dataclass(frozen=True)
class Operator:
    """Sparse operator bound to a mode layout."""

    layout: ModeLayout
    data: sp.csr_matrix = field(repr=False)

    def __post_init__(self):
        d = self.layout.total_dim
        if self.data.shape != (d, d):
            raise ValueError("matrix shape does not match layout dimension")
        if not sp.isspmatrix_csr(self.data):
            object.__setattr__(self, "data", sp.csr_matrix(self.data))

    def _check(self, other: "Operator"):
        if self.layout != other.layout:
            raise ValueError("operators live on different layouts")

    def __add__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.layout, (self.data + other.data).tocsr())

    def __sub__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.layout, (self.data - other.data).tocsr())

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.layout, (self.data * scalar).tocsr())

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return self * (-1.0)

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.layout, (self.data @ other.data).tocsr())

    def dag(self) -> "Operator":
        return Operator(self.layout, self.data.conj().T.tocsr())

    def to_dense(self) -> np.ndarray:
        return self.data.toarray()

    def expect(self, state: np.ndarray) -> complex:
        """Expectation value for a ket (1d) or density matrix (2d)."""
        if state.ndim == 1:
            return complex(np.vdot(state, self.data @ state))
        return complex(np.trace(self.data @ state))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        diff = (self.data - self.data.conj().T).tocoo()
        if diff.nnz == 0:
            return True
        scale = max(1.0, abs(self.data).max())
        return bool(np.max(np.abs(diff.data)) <= tol * scale)


def _single_mode_matrix(dim: int, kind: str) -> sp.csr_matrix:
    if kind == "destroy":
        return sp.diags(np.sqrt(np.arange(1, dim)), 1, format="csr", dtype=complex)
    if kind == "create":
        return sp.diags(np.sqrt(np.arange(1, dim)), -1, format="csr", dtype=complex)
    if kind == "number":
        return sp.diags(np.arange(dim, dtype=float), 0, format="csr", dtype=complex)
    if kind == "identity":
        return sp.identity(dim, format="csr", dtype=complex)
    raise ValueError(f"unknown operator kind {kind!r}")


def embed_matrix(layout: ModeLayout, mode: str, local: sp.spmatrix | np.ndarray) -> Operator:
    """Embed a single-mode matrix into the composite space via Kronecker products."""
    k = layout.index(mode)
    local = sp.csr_matrix(local, dtype=complex)
    if local.shape != (layout.dims[k], layout.dims[k]):
        raise ValueError("local matrix does not match mode truncation")
    out = None
    for i, d in enumerate(layout.dims):
        factor = local if i == k else sp.identity(d, format="csr", dtype=complex)
        out = factor if out is None else sp.kron(out, factor, format="csr")
    return Operator(layout, out.tocsr())


def mode_operator(layout: ModeLayout, mode: str, kind: str) -> Operator:
    """Lowering/raising/number/identity operator for one mode of the layout."""
    return embed_matrix(layout, mode, _single_mode_matrix(layout.dim_of(mode), kind))


def displacement_operator(dim: int, alpha: complex) -> Operator:
    """Single-mode displacement exp(alpha a^dag - alpha* a) on a dim-level mode.

    Unitary on the truncated space only up to truncation error; callers are
    expected to size `dim` for the displacement they request.
    """
    layout = ModeLayout(("mode",), (dim,))
    a = _single_mode_matrix(dim, "destroy").toarray()
    gen = alpha * a.conj().T - np.conj(alpha) * a
    return Operator(layout, sp.csr_matrix(expm(gen)))


def mode_displacement(layout: ModeLayout, mode: str, alpha: complex) -> Operator:
    """Displacement of a single mode embedded into the composite layout."""
    d = layout.dim_of(mode)
    return embed_matrix(layout, mode, displacement_operator(d, alpha).data)


def fock_projector(layout: ModeLayout, mode: str, level: int) -> Operator:
    """Projector |level><level| on one mode, identity elsewhere."""
    d = layout.dim_of(mode)
    if not 0 <= level < d:
        raise ValueError("level outside the mode truncation")
    m = sp.csr_matrix(([1.0 + 0j], ([level], [level])), shape=(d, d))
    return embed_matrix(layout, mode, m)


def level_transition(layout: ModeLayout, mode: str, upper: int, lower: int) -> Operator:
    """|lower><upper| on one mode, identity elsewhere."""
    d = layout.dim_of(mode)
    if not (0 <= upper < d and 0 <= lower < d):
        raise ValueError("levels outside the mode truncation")
    m = sp.csr_matrix(([1.0 + 0j], ([lower], [upper])), shape=(d, d))
    return embed_matrix(layout, mode, m)


def compose(ops: Iterable[Operator], coefficients: Iterable[complex] | None = None) -> Operator:
    """Linear combination sum_i c_i ops[i] on a common layout."""
    ops = list(ops)
    if not ops:
        raise ValueError("empty operator list")
    if coefficients is None:
        coefficients = [1.0] * len(ops)
    coefficients = list(coefficients)
    if len(coefficients) != len(ops):
        raise ValueError("coefficient count mismatch")
    out = ops[0] * coefficients[0]
    for op, c in zip(ops[1:], coefficients[1:]):
        out = out + op * c
    return out
