"""Hamiltonian assembly and full dense eigendecomposition.

The matrix is assembled in units of J, where it depends on (L, N, U/J)
only; recoil-unit energies are recovered by multiplying with J_Er.  All
eigenpairs are kept because the scattering sums run over the complete
excitation spectrum.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .config import InteractionSpec, LatticeSpec
from .errors import ConvergenceError
from .fock import FockBasis

_CACHE_MAGIC = b"MWSPEC01"


@dataclass
class HamiltonianMatrix:
    """Real symmetric matrix stored as a diagonal plus one off-diagonal triangle."""

    dim: int
    diag: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    scale_Er: float

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.dim, self.dim))
        dense[np.arange(self.dim), np.arange(self.dim)] = self.diag
        dense[self.rows, self.cols] = self.vals
        dense[self.cols, self.rows] = self.vals
        return dense


def lattice_bonds(L: int):
    """Nearest-neighbor bonds as unordered site pairs, wrap bond included.

    For L=2 the wrap bond coincides with the interior bond and is kept once.
    """
    return sorted({tuple(sorted((j, (j + 1) % L))) for j in range(L)})


def build_hamiltonian(basis: FockBasis, interaction: InteractionSpec,
                      lattice: LatticeSpec) -> HamiltonianMatrix:
    """Assemble the fixed-N Hamiltonian in units of J."""
    occ = basis.occ
    dim = len(basis)
    diag = 0.5 * interaction.U_over_J * (occ * (occ - 1)).sum(axis=1).astype(float)

    rows, cols, vals = [], [], []
    states = np.arange(dim)
    for i, j in lattice_bonds(basis.L):
        for src, dst in ((j, i), (i, j)):
            movable = occ[:, src] > 0
            moved = occ[movable].copy()
            moved[:, dst] += 1
            moved[:, src] -= 1
            amp = np.sqrt((occ[movable, dst] + 1.0) * occ[movable, src])
            targets = basis.rank_rows(moved)
            keep = targets < states[movable]
            rows.append(states[movable][keep])
            cols.append(targets[keep])
            vals.append(-amp[keep])
    return HamiltonianMatrix(
        dim=dim,
        diag=diag,
        rows=np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64),
        cols=np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64),
        vals=np.concatenate(vals) if vals else np.zeros(0),
        scale_Er=lattice.J_Er,
    )


@dataclass
class Spectrum:
    """Complete eigendecomposition; energies ascending, in E_r units.

    energies_J keeps the raw eigenvalues in units of J so that cached and
    freshly computed spectra agree bit for bit.
    """

    energies: np.ndarray
    vectors: np.ndarray
    energies_J: np.ndarray
    ground_index: int = 0

    def __post_init__(self):
        self.energies.flags.writeable = False
        self.vectors.flags.writeable = False
        self.energies_J.flags.writeable = False


def diagonalize(h: HamiltonianMatrix) -> Spectrum:
    """All eigenpairs of the assembled matrix."""
    dense = h.to_dense()
    try:
        energies_j, vectors = scipy.linalg.eigh(
            dense, driver="evd", check_finite=False, overwrite_a=True)
    except scipy.linalg.LinAlgError as exc:
        raise ConvergenceError(f"dense eigensolver failed: {exc}") from exc
    return Spectrum(
        energies=energies_j * h.scale_Er,
        vectors=vectors,
        energies_J=energies_j,
    )


def ground_matrix_elements(spectrum: Spectrum, basis: FockBasis) -> np.ndarray:
    """Table of <phi_n| n_j |phi_0> for every eigenstate n and site j.

    Row 0 holds the ground-state densities.  The number operators are
    diagonal in the occupation basis, so the table is one dense product.
    """
    v0 = spectrum.vectors[:, spectrum.ground_index]
    weighted = basis.occ.astype(float) * v0[:, None]
    return spectrum.vectors.T @ weighted


def cache_key(u_over_j: float) -> str:
    """Interaction strength rounded to 12 significant digits."""
    return f"{u_over_j:.11e}"


def spectrum_cache_path(cache_dir: str, L: int, N: int, key: str) -> str:
    return os.path.join(cache_dir, f"L{L}_N{N}_U{key}.spec")


def save_spectrum(path: str, L: int, N: int, key: str, spectrum: Spectrum) -> None:
    """Write eigenvalues (units of J) and eigenvectors as little-endian doubles.

    The file is published atomically so concurrent scans can share a cache
    directory with a single writer per key.
    """
    dim = spectrum.vectors.shape[0]
    key_bytes = key.encode("ascii")
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<IIQI", L, N, dim, len(key_bytes)))
        fh.write(key_bytes)
        fh.write(spectrum.energies_J.astype("<f8").tobytes())
        fh.write(np.ascontiguousarray(spectrum.vectors).astype("<f8").tobytes())
    os.replace(tmp, path)


def load_spectrum(path: str, J_Er: float) -> tuple[int, int, str, Spectrum]:
    """Read a cached spectrum back; energies are rescaled with the given J_Er.

    Raises ValueError for any malformed file, truncation included, so callers
    can treat a damaged cache entry uniformly.
    """
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _CACHE_MAGIC:
            raise ValueError(f"{path}: not a spectrum cache file")
        try:
            L, N, dim, keylen = struct.unpack("<IIQI", fh.read(20))
            key = fh.read(keylen).decode("ascii")
            energies_j = np.frombuffer(fh.read(8 * dim), dtype="<f8").copy()
            vectors = np.frombuffer(fh.read(8 * dim * dim), dtype="<f8").copy()
            vectors = vectors.reshape(dim, dim)
        except (struct.error, UnicodeDecodeError, ValueError) as exc:
            raise ValueError(f"{path}: corrupt spectrum cache file") from exc
    if energies_j.shape != (dim,):
        raise ValueError(f"{path}: corrupt spectrum cache file")
    spectrum = Spectrum(
        energies=energies_j * J_Er,
        vectors=vectors,
        energies_J=energies_j,
    )
    return int(L), int(N), key, spectrum
