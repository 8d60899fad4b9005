"""Disordered XXZ chain: field sampling and sparse Hamiltonian assembly.

The model is  H = sum_i J_perp (s^x_i s^x_{i+1} + s^y_i s^y_{i+1})
+ Delta s^z_i s^z_{i+1} + sum_i h_i s^z_i  with spin-1/2 operators
s = sigma/2, random fields h_i uniform on [-W, W], and open or periodic
boundary.  Everything is real symmetric in the z-product basis; hbar = 1
and energies are in units of the hopping.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .hilbert import _check_length, site_occupations

BOUNDARIES = ("open", "periodic")
DENSE_LIMIT = 4096  # largest dimension dense_spectrum will accept


@dataclass(frozen=True)
class DisorderRealization:
    """One sample of the random field array, tagged for exact replay."""

    fields: np.ndarray
    w: float
    seed: int
    realization_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "fields", np.asarray(self.fields, dtype=np.float64))
        if self.w < 0:
            raise ValueError("disorder strength must be >= 0")
        if np.any(np.abs(self.fields) > self.w):
            raise ValueError("field amplitude exceeds disorder strength")

    @property
    def length(self) -> int:
        return self.fields.size

    def to_json(self) -> str:
        return json.dumps(
            {
                "seed": self.seed,
                "realization_index": self.realization_index,
                "w": self.w,
                "length": self.length,
                "fields": self.fields.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "DisorderRealization":
        d = json.loads(text)
        if len(d["fields"]) != d["length"]:
            raise ValueError("field array length does not match record")
        return cls(
            fields=np.array(d["fields"], dtype=np.float64),
            w=d["w"],
            seed=d["seed"],
            realization_index=d["realization_index"],
        )


def sample_disorder(length: int, w: float, seed: int, realization_index: int = 0) -> DisorderRealization:
    """Draw i.i.d. uniform fields on [-W, W], deterministic per (seed, index).

    The stream is PCG64 keyed by ``SeedSequence(seed, spawn_key=(index,))``,
    so distinct realizations of one ensemble are independent and the whole
    ensemble is reproducible bit-for-bit from the master seed.
    """
    _check_length(length)
    if w < 0:
        raise ValueError("disorder strength must be >= 0")
    ss = np.random.SeedSequence(seed, spawn_key=(realization_index,))
    rng = np.random.default_rng(ss)
    fields = rng.uniform(-w, w, size=length)
    return DisorderRealization(fields=fields, w=w, seed=seed, realization_index=realization_index)


@dataclass(frozen=True)
class SparseHamiltonian:
    """Real-symmetric sparse operator in the z-product basis plus its parameters."""

    matrix: sp.csr_matrix
    length: int
    delta: float
    jperp: float
    fields: np.ndarray
    boundary: str
    model: str = "xxz"

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def max_abs(self) -> float:
        return float(np.abs(self.matrix.data).max()) if self.matrix.nnz else 0.0


def _bonds(length: int, boundary: str) -> list[tuple[int, int]]:
    if boundary not in BOUNDARIES:
        raise ValueError(f"boundary must be one of {BOUNDARIES}")
    bonds = [(i, i + 1) for i in range(length - 1)]
    # periodic wrap bond; for L = 2 it would duplicate the single bond, so skip
    if boundary == "periodic" and length > 2:
        bonds.append((length - 1, 0))
    return bonds


def build_hamiltonian(
    length: int,
    delta: float,
    jperp: float,
    disorder: DisorderRealization | np.ndarray,
    boundary: str = "periodic",
) -> SparseHamiltonian:
    """Assemble the XXZ + random-field Hamiltonian as a CSR matrix.

    Diagonal entries are sum_i Delta sigma^z_i sigma^z_{i+1}/4 + h_i sigma^z_i/2;
    the xx+yy pair contributes jperp/2 between configurations that differ by
    one adjacent up-down exchange, so every off-diagonal element connects
    states of equal magnetization.
    """
    if length < 2:
        raise ValueError("chain needs at least 2 sites")
    _check_length(length)
    fields = np.asarray(getattr(disorder, "fields", disorder), dtype=np.float64)
    if fields.shape != (length,):
        raise ValueError(f"need {length} fields, got shape {fields.shape}")
    bonds = _bonds(length, boundary)

    dim = 1 << length
    sigma = 2.0 * site_occupations(length) - 1.0  # (D, L) of +-1
    diag = sigma @ (fields / 2.0)
    for i, j in bonds:
        diag += (delta / 4.0) * sigma[:, i] * sigma[:, j]

    idx = np.arange(dim, dtype=np.int64)
    rows, cols = [], []
    if jperp != 0.0:
        for i, j in bonds:
            differ = ((idx >> i) ^ (idx >> j)) & 1 == 1
            a = idx[differ]
            rows.append(a)
            cols.append(a ^ ((1 << i) | (1 << j)))
    if rows:
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        vals = np.full(rows.shape, jperp / 2.0)
        matrix = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
        matrix += sp.diags(diag, format="csr")
    else:
        matrix = sp.diags(diag, format="csr")
    matrix.sum_duplicates()
    return SparseHamiltonian(
        matrix=matrix.tocsr(),
        length=length,
        delta=delta,
        jperp=jperp,
        fields=fields,
        boundary=boundary,
    )


def build_phenomenological_two_spin(v_int: float) -> SparseHamiltonian:
    """Two-spin dephasing model sigma^z_1 + sigma^z_2 + V sigma^z_1 sigma^z_2.

    Note the Pauli (not spin-1/2) normalization: the spectrum is
    {2+V, -V, -V, -2+V}.
    """
    sigma = 2.0 * site_occupations(2) - 1.0
    diag = sigma[:, 0] + sigma[:, 1] + v_int * sigma[:, 0] * sigma[:, 1]
    return SparseHamiltonian(
        matrix=sp.diags(diag, format="csr"),
        length=2,
        delta=v_int,
        jperp=0.0,
        fields=np.ones(2),
        boundary="open",
        model="two_spin_phenomenological",
    )


@dataclass(frozen=True)
class EigenDecomposition:
    """Full spectrum of a Hermitian operator, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dimension(self) -> int:
        return self.eigenvalues.size


def dense_spectrum(h: SparseHamiltonian) -> EigenDecomposition:
    """Dense eigendecomposition oracle, limited to dimension 4096 (L <= 12)."""
    if h.dimension > DENSE_LIMIT:
        raise ValueError(f"dimension {h.dimension} exceeds dense limit {DENSE_LIMIT}")
    values, vectors = np.linalg.eigh(h.matrix.toarray())
    return EigenDecomposition(eigenvalues=values, eigenvectors=vectors)
