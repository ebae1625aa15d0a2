"""Exact diagonalization, state matching, and spectral observables.

The hybridized Hamiltonian (exchange coupling on) and its bare counterpart
(exchange off) are diagonalized together; eigenstates are identified with
bare excitation labels by overlap, with a maximum-weight assignment breaking
near-degenerate collisions.  Participation ratios, two-qubit ZZ shifts and
back-action dephasing rates are then read off the matched eigenvectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .hilbert import ModeLayout, Operator, fock_index
from .model import DisplacementSet, SystemParams, qubit_detuning_dressed

__all__ = [
    "EigenSolution",
    "StateMatch",
    "eigensystem",
    "match_states",
    "bare_label_index",
    "ipr_numeric",
    "zz_shift",
    "qubit_dephasing_rate",
    "SwParams",
    "sw_params",
    "relative_change",
]


@dataclass
class EigenSolution:
    """Joint eigendecomposition of the coupled and bare Hamiltonians.

    ``states``/``bare_states`` hold eigenvectors in columns, sorted by
    energy.  When the bare Hamiltonian is diagonal in the Fock product basis
    (the usual polaron-frame case) ``bare_states`` is the identity and bare
    labels are literal basis indices.
    """

    layout: ModeLayout
    energies: np.ndarray
    states: np.ndarray
    bare_energies: np.ndarray
    bare_states: np.ndarray
    bare_is_fock: bool

    @property
    def dim(self) -> int:
        return len(self.energies)

    def overlaps(self) -> np.ndarray:
        """|<bare_nu|psi_mu>|^2, shape (bare, eig)."""
        if self.bare_is_fock:
            return np.abs(self.states) ** 2
        return np.abs(self.bare_states.conj().T @ self.states) ** 2


def _check_hermitian(m: np.ndarray, name: str):
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.conj().T)) > 1e-10 * scale:
        raise ValueError(f"{name} is not Hermitian")


def eigensystem(h_full: Operator, h_bare: Operator | None = None) -> EigenSolution:
    """Dense Hermitian diagonalization of the coupled and bare models.

    ``h_bare=None`` declares the bare model diagonal in the Fock product
    basis; the basis itself then serves as the bare eigensystem (and the
    bare energies are the diagonal of ``h_full`` restricted to its diagonal
    part only when that is exact, so callers wanting bare energies should
    pass the bare operator explicitly).
    """
    hm = h_full.to_dense()
    _check_hermitian(hm, "coupled Hamiltonian")
    energies, states = np.linalg.eigh(hm)
    if h_bare is None:
        dim = h_full.layout.total_dim
        return EigenSolution(layout=h_full.layout, energies=energies, states=states,
                             bare_energies=np.real(np.diag(hm)),
                             bare_states=np.eye(dim), bare_is_fock=True)
    bm = h_bare.to_dense()
    _check_hermitian(bm, "bare Hamiltonian")
    be, bs = np.linalg.eigh(bm)
    off = bm - np.diag(np.diag(bm))
    bare_is_fock = bool(np.max(np.abs(off)) <= 1e-12 * max(1.0, np.max(np.abs(bm))))
    if bare_is_fock:
        # keep the literal Fock basis rather than eigh's reshuffled columns
        be = np.real(np.diag(bm))
        bs = np.eye(bm.shape[0])
    return EigenSolution(layout=h_full.layout, energies=energies, states=states,
                         bare_energies=be, bare_states=bs, bare_is_fock=bare_is_fock)


@dataclass
class StateMatch:
    """Assignment of bare labels to hybridized eigenstates."""

    assignment: np.ndarray           # eig index per bare index
    overlap2: np.ndarray = field(repr=False)
    collisions_resolved: bool = False

    def eig_index(self, bare_index: int) -> int:
        return int(self.assignment[bare_index])

    def overlap(self, bare_index: int) -> float:
        return float(self.overlap2[bare_index, self.eig_index(bare_index)])


def match_states(sol: EigenSolution) -> StateMatch:
    """Greedy overlap matching, upgraded to optimal assignment on collision."""
    w = sol.overlaps()
    greedy = np.argmax(w, axis=1)
    collided = len(np.unique(greedy)) != len(greedy)
    if not collided:
        return StateMatch(assignment=greedy, overlap2=w)
    rows, cols = linear_sum_assignment(-w)
    assignment = np.empty(len(greedy), dtype=int)
    assignment[rows] = cols
    return StateMatch(assignment=assignment, overlap2=w, collisions_resolved=True)


def bare_label_index(sol: EigenSolution, occupations: Sequence[int]) -> int:
    """Bare-eigenstate index carrying a given Fock occupation label."""
    k = fock_index(sol.layout, occupations)
    if sol.bare_is_fock:
        return k
    return int(np.argmax(np.abs(sol.bare_states[k, :]) ** 2))


def ipr_numeric(sol: EigenSolution, match: StateMatch, occupations: Sequence[int]) -> float:
    """Inverse participation ratio of the matched eigenstate over bare states."""
    mu = match.eig_index(bare_label_index(sol, occupations))
    v = sol.states[:, mu]
    if sol.bare_is_fock:
        amps = np.abs(v) ** 2
    else:
        amps = np.abs(sol.bare_states.conj().T @ v) ** 2
    norm = float(np.sum(amps))
    return float(np.sum(amps ** 2)) / norm ** 2


def zz_shift(sol: EigenSolution, match: StateMatch) -> float:
    """Two-qubit ZZ rate from matched eigen-energies.

    chi_12 = E(1100) - E(1000) - E(0100) + E(0000), each energy taken as the
    expectation of the Hamiltonian on the matched eigenstate (identical to
    the eigenvalue).
    """
    def energy(occ):
        return float(sol.energies[match.eig_index(bare_label_index(sol, occ))])

    return (energy((1, 1, 0, 0)) - energy((1, 0, 0, 0))
            - energy((0, 1, 0, 0)) + energy((0, 0, 0, 0)))


def qubit_dephasing_rate(params: SystemParams, disp: DisplacementSet,
                         sol: EigenSolution, match: StateMatch,
                         j: int = 1) -> float:
    """Back-action dephasing of qubit j's one-excitation state, in 1/s.

    gamma = (kappa |abar|^2 / 2) * sum_k |<psi_h | bare(0,0,1,k)>|^2: the
    weight the matched eigenstate leaks into the one-bus-photon ladder.
    Returned as a laboratory rate (1/s), converting the internal rad/us.
    """
    occ = (1, 0, 0, 0) if j == 1 else (0, 1, 0, 0)
    mu = match.eig_index(bare_label_index(sol, occ))
    v = sol.states[:, mu]
    if not sol.bare_is_fock:
        v = sol.bare_states.conj().T @ v
    layout = sol.layout
    total = 0.0
    for k in range(layout.dim_of("r")):
        total += abs(v[fock_index(layout, (0, 0, 1, k))]) ** 2
    abar_sq = abs(disp.pointer_separation) ** 2
    return 0.5 * params.kappa * abar_sq * total * 1e6


@dataclass(frozen=True)
class SwParams:
    """Perturbative bookkeeping for the displaced exchange coupling.

    ``q`` holds the ladder detuning ratios q_{n,k} = [(delta + n chi) k +
    (Kr/2) k (k-1)] / Delta_tilde_j; a ratio near 1 marks a resonant rung.
    ``max_coupling_ratio`` is the largest displaced matrix element over its
    energy denominator; the perturbative treatment is flagged invalid when
    it exceeds 0.25.
    """

    d_tilde: float
    q: np.ndarray
    max_coupling_ratio: float
    valid: bool


def sw_params(params: SystemParams, disp: DisplacementSet, j: int = 1,
              n_levels: int = 2, k_max: int | None = None) -> SwParams:
    d = qubit_detuning_dressed(params, disp, j)
    g = params.qubit_coupling(j)
    x = abs(disp.pointer_separation) ** 2
    if k_max is None:
        k_max = int(2 * x + 12)
    ks = np.arange(k_max + 1, dtype=float)
    q = np.empty((n_levels, k_max + 1))
    for n in range(n_levels):
        q[n] = ((params.delta + (n + 1) * params.chi) * ks
                + 0.5 * params.kr * ks * (ks - 1.0)) / d
    # displaced matrix elements <k|D(abar)|0> = e^{-x/2} abar^k / sqrt(k!)
    ratio = 0.0
    amp = math.exp(-0.5 * x)
    for k in range(k_max + 1):
        den = abs(d * (1.0 - q[0, k]))
        if den == 0.0:
            ratio = math.inf
            break
        ratio = max(ratio, abs(g) * amp / den)
        amp *= math.sqrt(x) / math.sqrt(k + 1.0)
    return SwParams(d_tilde=d, q=q, max_coupling_ratio=ratio, valid=ratio < 0.25)


def relative_change(a: float, b: float) -> float:
    """|a-b| over the larger magnitude; convergence-check helper."""
    scale = max(abs(a), abs(b), 1e-300)
    return abs(a - b) / scale
