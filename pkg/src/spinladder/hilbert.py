"""State vectors and matrix-free operator action on the Ising basis.

Basis states are indexed by an integer code in [0, 2^n): bit k-1 holds
site k, with 1 = up and 0 = down.  The bit count of a code is the number
of up spins, so magnetization sectors are popcount classes and every bond
term preserves them.

State vectors are plain complex128 numpy arrays; all operations here are
pure and accept either a single vector of shape (dim,) or a batch of
column vectors of shape (dim, k).
"""

from __future__ import annotations

import numpy as np

from .model import BondKind, HamiltonianTerms

#: largest spin count for which dense matrices are built (dim 2^14 = 16384)
DENSE_CAP_SITES = 14


class DimensionCapError(ValueError):
    """Requested dense representation exceeds the configured spin cap."""


def basis_state(n_sites: int, code: int) -> np.ndarray:
    """Unit vector for the Ising configuration encoded by ``code``."""
    dim = 1 << n_sites
    if not 0 <= code < dim:
        raise ValueError(f"code {code} outside [0, {dim})")
    psi = np.zeros(dim, dtype=np.complex128)
    psi[code] = 1.0
    return psi


def sz_diagonal(n_sites: int, site: int) -> np.ndarray:
    """Diagonal of S^z at ``site`` (1-based): +1/2 for up, -1/2 for down."""
    if not 1 <= site <= n_sites:
        raise ValueError(f"site {site} outside 1..{n_sites}")
    codes = np.arange(1 << n_sites)
    return np.where((codes >> (site - 1)) & 1, 0.5, -0.5)


def local_sz(state: np.ndarray, site: int) -> float:
    """Expectation value <S^z_site> of a normalized state."""
    n_sites = int(np.log2(state.shape[0]))
    w = sz_diagonal(n_sites, site)
    return float(w @ (np.abs(state) ** 2))


def apply_terms(
    state: np.ndarray, terms: HamiltonianTerms, scale: float = 1.0
) -> np.ndarray:
    """Return scale * H |psi> without forming the matrix.

    XY bonds exchange the occupation of their two sites with the bond
    amplitude; ZZ bonds multiply by amplitude/4 with sign + for aligned
    and - for anti-aligned spins.
    """
    dim = 1 << terms.n_sites
    if state.shape[0] != dim:
        raise ValueError(f"state dimension {state.shape[0]} != {dim}")
    codes = np.arange(dim)
    out = np.zeros_like(state, dtype=np.complex128)
    for t in terms.terms:
        pa, pb = t.site_a - 1, t.site_b - 1
        ba = (codes >> pa) & 1
        bb = (codes >> pb) & 1
        if t.kind is BondKind.XY:
            mask = ba != bb
            src = codes[mask]
            dst = src ^ ((1 << pa) | (1 << pb))
            out[dst] += t.amplitude * state[src]
        else:
            za = np.where(ba, 0.5, -0.5)
            zb = np.where(bb, 0.5, -0.5)
            diag = t.amplitude * za * zb
            out += diag[:, None] * state if state.ndim == 2 else diag * state
    if scale != 1.0:
        out *= scale
    return out


def dump_state(path, state: np.ndarray) -> None:
    """Debug dump: little-endian interleaved re/im doubles.

    Not part of the stable interchange format.
    """
    np.asarray(state, dtype="<c16").tofile(path)


def load_state(path) -> np.ndarray:
    return np.fromfile(path, dtype="<c16")


def dense_matrix(terms: HamiltonianTerms, cap: int = DENSE_CAP_SITES) -> np.ndarray:
    """Dense real-symmetric matrix whose action equals ``apply_terms``."""
    if terms.n_sites > cap:
        raise DimensionCapError(
            f"{terms.n_sites} spins exceed the dense cap of {cap}; "
            "use the matrix-free path"
        )
    dim = 1 << terms.n_sites
    codes = np.arange(dim)
    H = np.zeros((dim, dim))
    for t in terms.terms:
        pa, pb = t.site_a - 1, t.site_b - 1
        ba = (codes >> pa) & 1
        bb = (codes >> pb) & 1
        if t.kind is BondKind.XY:
            src = codes[ba != bb]
            dst = src ^ ((1 << pa) | (1 << pb))
            H[dst, src] += t.amplitude
        else:
            za = np.where(ba, 0.5, -0.5)
            zb = np.where(bb, 0.5, -0.5)
            H[codes, codes] += t.amplitude * za * zb
    return H
