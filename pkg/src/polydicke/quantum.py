"""Exact ground state on a truncated Fock basis, block-diagonalized by parity.

The basis is the raw occupation basis |nu_1.., n_1..> (photon numbers per
mode up to a cutoff, one atomic composition per ket), enumerated
lexicographically.  The Hamiltonian is assembled from Kronecker products of
per-mode ladder matrices and collective atomic hop matrices, which makes it
exactly real symmetric; amplitudes that would leave the truncation are
dropped by construction and their damage is measured after the solve as the
ground-state weight sitting on saturated photon states.

Every charge parity is conserved, so the basis splits into sectors that the
Hamiltonian never connects; each sector's lowest eigenpair is found densely
below a size threshold and with a seeded Lanczos solver above it, and the
global minimum over sectors is the exact ground state of the truncated
problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import eigsh

from .model import AtomicSystem, Pair, require_valid
from .symmetries import WeightError, excitation_weights
from .variational import candidates as _variational_candidates

DEFAULT_BASIS_BUDGET = 2_000_000


class BudgetError(RuntimeError):
    """Basis size or refinement budget exceeded; message carries diagnostics."""


@dataclass(frozen=True)
class FockKet:
    """Occupation-number basis state: photons per mode, atoms per level."""

    nu: Tuple[int, ...]
    n: Tuple[int, ...]
    pairs: Tuple[Pair, ...]

    def nu_by_pair(self) -> Dict[Pair, int]:
        return dict(zip(self.pairs, self.nu))


def _atomic_compositions(atom_count: int, n: int) -> List[Tuple[int, ...]]:
    """All occupations (n_1..n_n) summing to atom_count, lexicographic."""
    out: List[Tuple[int, ...]] = []

    def rec(prefix: List[int], remaining: int, slots: int):
        if slots == 1:
            out.append(tuple(prefix + [remaining]))
            return
        for v in range(remaining + 1):
            rec(prefix + [v], remaining - v, slots - 1)

    rec([], atom_count, n)
    return out


@dataclass(frozen=True)
class TruncatedBasis:
    """Deterministic enumeration of the truncated product basis.

    Index order is lexicographic in the concatenated occupation tuple
    (nu..., n...): photon numbers of the first canonical pair vary slowest,
    atomic compositions fastest.
    """

    pairs: Tuple[Pair, ...]
    cutoffs: Tuple[int, ...]
    atom_count: int
    n_levels: int
    atomic_kets: Tuple[Tuple[int, ...], ...]

    @property
    def mode_dims(self) -> Tuple[int, ...]:
        return tuple(c + 1 for c in self.cutoffs)

    @property
    def atomic_dim(self) -> int:
        return len(self.atomic_kets)

    @property
    def size(self) -> int:
        return int(np.prod(self.mode_dims)) * self.atomic_dim

    def cutoff_of(self, pair: Pair) -> int:
        return self.cutoffs[self.pairs.index(tuple(pair))]

    def index(self, ket: FockKet) -> int:
        """Exact inverse of the enumeration."""
        idx = 0
        for v, d in zip(ket.nu, self.mode_dims):
            if not 0 <= v < d:
                raise ValueError(f"photon occupation {v} outside cutoff {d - 1}")
            idx = idx * d + v
        return idx * self.atomic_dim + self._atomic_index[ket.n]

    def ket(self, index: int) -> FockKet:
        index, a = divmod(index, self.atomic_dim)
        nu = [0] * len(self.pairs)
        for m in range(len(self.pairs) - 1, -1, -1):
            index, nu[m] = divmod(index, self.mode_dims[m])
        return FockKet(nu=tuple(nu), n=self.atomic_kets[a], pairs=self.pairs)

    def __post_init__(self):
        object.__setattr__(
            self, "_atomic_index",
            {ket: i for i, ket in enumerate(self.atomic_kets)},
        )

    def nu_columns(self) -> np.ndarray:
        """(size, n_modes) photon occupation of every basis index."""
        dims = self.mode_dims
        total = self.size
        cols = np.empty((total, len(dims)), dtype=np.int64)
        idx = np.arange(total) // self.atomic_dim
        for m in range(len(dims) - 1, -1, -1):
            idx, rem = np.divmod(idx, dims[m])
            cols[:, m] = rem
        return cols

    def occupation_columns(self) -> np.ndarray:
        """(size, n_levels) atomic occupation of every basis index."""
        occ = np.array(self.atomic_kets, dtype=np.int64)
        reps = self.size // self.atomic_dim
        return np.tile(occ, (reps, 1))


def build_basis(system: AtomicSystem, atom_count: int,
                cutoffs: Union[int, Mapping[Pair, int]],
                budget: int = DEFAULT_BASIS_BUDGET) -> TruncatedBasis:
    """Enumerate the truncated basis, refusing sizes above the budget."""
    require_valid(system)
    pairs = system.pairs
    if isinstance(cutoffs, int):
        cut = tuple([cutoffs] * len(pairs))
    else:
        cut = tuple(int(cutoffs[p]) for p in pairs)
    if any(c < 0 for c in cut):
        raise ValueError(f"cutoffs must be nonnegative, got {cut}")
    atomic = _atomic_compositions(atom_count, system.n)
    size = int(np.prod([c + 1 for c in cut])) * len(atomic)
    if size > budget:
        raise BudgetError(
            f"basis of {size} kets (cutoffs {cut}, {len(atomic)} atomic "
            f"configurations) exceeds the budget of {budget}; raise the "
            f"budget or lower the cutoffs"
        )
    return TruncatedBasis(pairs=pairs, cutoffs=cut, atom_count=atom_count,
                          n_levels=system.n, atomic_kets=tuple(atomic))


def _atomic_hop(basis: TruncatedBasis, j: int, k: int) -> sp.csr_matrix:
    """Collective hop b_j^dag b_k on the atomic compositions (1-based j, k)."""
    rows, cols, vals = [], [], []
    index = basis._atomic_index
    for i, ket in enumerate(basis.atomic_kets):
        if ket[k - 1] > 0:
            target = list(ket)
            target[k - 1] -= 1
            target[j - 1] += 1
            rows.append(index[tuple(target)])
            cols.append(i)
            vals.append(math.sqrt((ket[j - 1] + 1) * ket[k - 1]))
    dim = basis.atomic_dim
    return sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()


def _kron_chain(ops: Sequence[sp.spmatrix]) -> sp.csr_matrix:
    out = ops[0]
    for op in ops[1:]:
        out = sp.kron(out, op, format="csr")
    return out


def build_hamiltonian(system: AtomicSystem, basis: TruncatedBasis,
                      rwa: bool = False) -> sp.csr_matrix:
    """Real symmetric Hamiltonian on the truncated basis.

    Diagonal: sum Omega nu + sum omega_j n_j.  Off-diagonal per transition:
    -(mu/sqrt(N_a)) (A_jk + A_kj)(a + a^dag) with the usual bosonic matrix
    elements; with rwa set, only the excitation-preserving half
    A_jk a^dag + A_kj a (photon created when the atom drops) is kept.
    """
    require_valid(system)
    dims = basis.mode_dims
    eye_f = [sp.identity(d, format="csr") for d in dims]
    eye_a = sp.identity(basis.atomic_dim, format="csr")

    def placed(mode: int, fop: sp.spmatrix, aop: sp.spmatrix) -> sp.csr_matrix:
        ops = list(eye_f)
        ops[mode] = fop
        return _kron_chain(ops + [aop])

    H = None
    for m, p in enumerate(basis.pairs):
        term = system.transition(p).Omega * placed(
            m, sp.diags(np.arange(dims[m], dtype=float)), eye_a)
        H = term if H is None else H + term
    atom_diag = sp.diags([
        float(sum(system.omega[j] * ket[j] for j in range(basis.n_levels)))
        for ket in basis.atomic_kets
    ])
    H = H + _kron_chain(eye_f + [atom_diag])

    scale = 1.0 / math.sqrt(basis.atom_count)
    for m, p in enumerate(basis.pairs):
        t = system.transition(p)
        if t.mu == 0.0 or dims[m] == 1:
            continue
        a = sp.diags(np.sqrt(np.arange(1, dims[m], dtype=float)), 1)
        hop = _atomic_hop(basis, t.j, t.k)
        if rwa:
            term = placed(m, a.T, hop) + placed(m, a, hop.T)
        else:
            term = placed(m, (a + a.T).tocsr(), (hop + hop.T).tocsr())
        H = H - (t.mu * scale) * term
    return H.tocsr()


@dataclass(frozen=True)
class SymmetrySector:
    """One charge-parity class of basis indices.

    The two-letter name (parity of the total excitation number, parity of
    the top-level charge) is used whenever the configuration admits
    consistent excitation weights and that pair of parities separates the
    classes; otherwise the name spells out all charge parities.
    """

    label: str
    parity: Tuple[int, ...]
    indices: np.ndarray


def split_sectors(system: AtomicSystem,
                  basis: TruncatedBasis) -> List[SymmetrySector]:
    """Partition the basis by the parities of every level charge.

    The partition depends only on the basis, never on couplings, and the
    Hamiltonian has no matrix element between different classes.
    """
    require_valid(system)
    nu_cols = basis.nu_columns()
    occ = basis.occupation_columns()
    K = occ.copy()
    for m, (j, k) in enumerate(basis.pairs):
        K[:, k - 1] += nu_cols[:, m]
        K[:, j - 1] -= nu_cols[:, m]
    parity = np.mod(K, 2)

    letters = {0: "e", 1: "o"}
    named = None
    try:
        weights = excitation_weights(system)
        lam = np.array(weights.lam, dtype=np.int64)
        M = K @ lam
        short = np.stack([np.mod(M, 2), parity[:, -1]], axis=1)
        # adopt the two-letter naming only if it separates the full classes
        full_keys = [tuple(row) for row in parity]
        short_keys = [tuple(row) for row in short]
        mapping = {}
        ok = True
        for fk, sk in zip(full_keys, short_keys):
            if sk in mapping and mapping[sk] != fk:
                ok = False
                break
            mapping[sk] = fk
        if ok:
            named = short_keys
    except WeightError:
        named = None

    groups: Dict[Tuple[int, ...], List[int]] = {}
    names: Dict[Tuple[int, ...], str] = {}
    for i, row in enumerate(parity):
        key = tuple(row)
        groups.setdefault(key, []).append(i)
        if key not in names:
            if named is not None:
                names[key] = "".join(letters[v] for v in named[i])
            else:
                names[key] = "".join(letters[v] for v in key)
    sectors = [
        SymmetrySector(label=names[key], parity=key,
                       indices=np.array(ix, dtype=np.int64))
        for key, ix in groups.items()
    ]
    sectors.sort(key=lambda s: s.label)
    return sectors


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the per-sector eigensolves and truncation diagnostics."""

    dense_threshold: int = 2000
    seed: int = 0
    boundary_threshold: float = 1e-8
    degeneracy_tol: float = 1e-10
    lanczos_tol: float = 0.0          # 0 = machine precision
    lanczos_maxiter: Optional[int] = None


@dataclass(frozen=True)
class QuantumGroundResult:
    """Exact truncated-basis ground state and its diagnostics.

    Energies and observables are per particle.  delta_nu is the normalized
    photon imbalance of the two designated modes, None while undefined
    (photon-free state).  converged is False when the ground state leans on
    the truncation boundary more than the configured threshold.
    """

    energy: float
    sector: str
    sector_energies: Dict[str, float]
    degenerate_sectors: Tuple[str, ...]
    nu: Dict[Pair, float]
    populations: Tuple[float, ...]
    delta_nu: Optional[float]
    cutoffs: Dict[Pair, int]
    boundary_weight: float
    residual: float
    converged: bool

    def to_json_dict(self, couplings: Optional[Mapping[Pair, float]] = None) -> dict:
        rec = {
            "energy_per_particle": self.energy,
            "sector": self.sector,
            "sector_energies": dict(sorted(self.sector_energies.items())),
            "degenerate_sectors": list(self.degenerate_sectors),
            "observables": {
                "nu": {f"{j}_{k}": v for (j, k), v in sorted(self.nu.items())},
                "populations": list(self.populations),
            },
            "delta_nu": "undefined" if self.delta_nu is None else self.delta_nu,
            "cutoffs": {f"{j}_{k}": c for (j, k), c in sorted(self.cutoffs.items())},
            "boundary_weight": self.boundary_weight,
            "residual": self.residual,
            "converged": self.converged,
        }
        if couplings is not None:
            rec["couplings"] = {f"{j}_{k}": v
                                for (j, k), v in sorted(couplings.items())}
        return rec


def _lowest_eigenpair_irreducible(H: sp.csr_matrix, config: SolverConfig,
                                  seed: int) -> Tuple[float, np.ndarray]:
    dim = H.shape[0]
    if dim == 1:
        return float(H[0, 0]), np.ones(1)
    if dim <= config.dense_threshold:
        vals, vecs = scipy.linalg.eigh(H.toarray(), subset_by_index=[0, 0])
        return float(vals[0]), vecs[:, 0]
    rng = np.random.default_rng(config.seed + seed)
    v0 = rng.standard_normal(dim)
    vals, vecs = eigsh(H, k=1, which="SA", v0=v0, tol=config.lanczos_tol,
                       maxiter=config.lanczos_maxiter)
    return float(vals[0]), vecs[:, 0]


def _lowest_eigenpair(H: sp.csr_matrix, config: SolverConfig,
                      sector_seed: int) -> Tuple[float, np.ndarray]:
    """Lowest eigenpair of one sector block.

    Zero couplings leave extra conserved occupations, so a sector can itself
    be block diagonal; Lanczos from a single start vector may lose weight on
    exactly decoupled blocks.  The sparsity graph's connected components make
    that split explicit, and the minimum over per-component solves is exact.
    """
    H = H.copy()
    H.eliminate_zeros()
    n_comp, membership = connected_components(H, directed=False)
    if n_comp == 1:
        return _lowest_eigenpair_irreducible(H, config, sector_seed)
    best: Tuple[float, np.ndarray, np.ndarray] = None
    for comp in range(n_comp):
        idx = np.nonzero(membership == comp)[0]
        sub = H[idx][:, idx]
        energy, vec = _lowest_eigenpair_irreducible(
            sub, config, sector_seed + 7919 * (comp + 1))
        if best is None or energy < best[0]:
            best = (energy, vec, idx)
    energy, vec, idx = best
    full = np.zeros(H.shape[0])
    full[idx] = vec
    return energy, full


def ground_state(system: AtomicSystem, atom_count: int,
                 cutoffs: Union[int, Mapping[Pair, int]], rwa: bool = False,
                 config: Optional[SolverConfig] = None,
                 budget: int = DEFAULT_BASIS_BUDGET) -> QuantumGroundResult:
    """Global ground state: the minimum over all per-sector lowest eigenpairs.

    Deterministic for a fixed config seed.  Sectors within the degeneracy
    tolerance of the minimum are all reported; observables come from the
    lexicographically first of them.  Raises a RuntimeError with the
    residual norm if an iterative solve fails to converge.
    """
    require_valid(system)
    config = config or SolverConfig()
    basis = build_basis(system, atom_count, cutoffs, budget=budget)
    H = build_hamiltonian(system, basis, rwa=rwa)
    sectors = split_sectors(system, basis)

    found: List[Tuple[str, float, np.ndarray, np.ndarray]] = []
    for s_index, sector in enumerate(sectors):
        Hs = H[sector.indices][:, sector.indices]
        try:
            energy, vec = _lowest_eigenpair(Hs, config, s_index)
        except sp.linalg.ArpackNoConvergence as exc:  # pragma: no cover
            raise RuntimeError(
                f"eigensolver failed to converge in sector {sector.label}: {exc}"
            ) from exc
        found.append((sector.label, energy, vec, sector.indices))

    found.sort(key=lambda item: (item[1], item[0]))
    e_min = found[0][1]
    degenerate = tuple(sorted(
        lab for lab, e, _, _ in found if e - e_min <= config.degeneracy_tol
    ))
    winner = min(
        (item for item in found if item[1] - e_min <= config.degeneracy_tol),
        key=lambda item: item[0],
    )
    label, energy, vec, indices = winner

    Hs = H[indices][:, indices]
    residual = float(np.linalg.norm(Hs @ vec - energy * vec)
                     / np.linalg.norm(vec))
    weights = vec * vec
    weights = weights / weights.sum()
    nu_cols = basis.nu_columns()[indices]
    occ = basis.occupation_columns()[indices]
    nu = {
        p: float(weights @ nu_cols[:, m]) / atom_count
        for m, p in enumerate(basis.pairs)
    }
    populations = tuple(
        float(weights @ occ[:, j]) / atom_count for j in range(basis.n_levels)
    )
    at_boundary = (nu_cols == np.array(basis.cutoffs)).any(axis=1)
    boundary_weight = float(weights[at_boundary].sum())

    dn = None
    if len(basis.pairs) == 2:
        dn = delta_nu_value(nu[basis.pairs[0]], nu[basis.pairs[1]])

    return QuantumGroundResult(
        energy=energy / atom_count,
        sector=label,
        sector_energies={lab: e / atom_count for lab, e, _, _ in found},
        degenerate_sectors=degenerate,
        nu=nu,
        populations=populations,
        delta_nu=dn,
        cutoffs=dict(zip(basis.pairs, basis.cutoffs)),
        boundary_weight=boundary_weight,
        residual=residual,
        converged=boundary_weight <= config.boundary_threshold,
    )


def delta_nu_value(nu_a: float, nu_b: float,
                   eps: float = 1e-12) -> Optional[float]:
    """(nu_b - nu_a)/(nu_b + nu_a), or None when the sum vanishes."""
    total = nu_a + nu_b
    if total <= eps:
        return None
    return (nu_b - nu_a) / total


def delta_nu(result: QuantumGroundResult, pair_a: Pair,
             pair_b: Pair) -> Optional[float]:
    """Normalized photon imbalance between two named modes of a result.

    None marks the undefined 0/0 case (photon-free ground state); a float in
    [-1, 1] otherwise, -1 when mode pair_a dominates and +1 when pair_b does.
    """
    return delta_nu_value(result.nu[tuple(pair_a)], result.nu[tuple(pair_b)])


def converge_cutoff(system: AtomicSystem, atom_count: int,
                    start_cutoffs: Union[int, Mapping[Pair, int]],
                    tol: float, rwa: bool = False,
                    config: Optional[SolverConfig] = None,
                    budget: int = DEFAULT_BASIS_BUDGET,
                    max_doublings: int = 8,
                    ) -> Tuple[Dict[Pair, int], QuantumGroundResult]:
    """Double every cutoff until the ground energy settles within tol.

    Stops when two successive solves agree within tol and the finer one does
    not lean on the truncation boundary; returns that finer result.  Raises
    BudgetError when the doubling budget or the basis budget runs out.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    require_valid(system)
    pairs = system.pairs
    if isinstance(start_cutoffs, int):
        current = {p: start_cutoffs for p in pairs}
    else:
        current = {p: int(start_cutoffs[p]) for p in pairs}
    previous = ground_state(system, atom_count, current, rwa=rwa,
                            config=config, budget=budget)
    last_change = math.inf
    for _ in range(max_doublings):
        finer = {p: 2 * c for p, c in current.items()}
        result = ground_state(system, atom_count, finer, rwa=rwa,
                              config=config, budget=budget)
        last_change = abs(result.energy - previous.energy)
        if last_change < tol and result.converged:
            return finer, result
        current, previous = finer, result
    raise BudgetError(
        f"cutoffs {current} still not converged after {max_doublings} "
        f"doublings (last energy change {last_change:.3e}, boundary weight "
        f"{previous.boundary_weight:.3e})"
    )


def suggest_cutoffs(system: AtomicSystem, atom_count: int,
                    minimum: int = 6, spread: float = 6.0,
                    margin: int = 8) -> Dict[Pair, int]:
    """Starting cutoffs from the variational photon numbers.

    The active mode of each candidate is Poissonian with mean N_a r_c^2;
    the cutoff covers the mean plus `spread` standard deviations plus a
    fixed margin, floored at `minimum`.
    """
    require_valid(system)
    mean = {p: 0.0 for p in system.pairs}
    for cand in _variational_candidates(system):
        if cand.exists and cand.pair is not None:
            mean[cand.pair] = atom_count * cand.photon_amp ** 2
    return {
        p: max(minimum,
               int(math.ceil(m + spread * math.sqrt(m + 1.0) + margin)))
        for p, m in mean.items()
    }
