"""Product initial states and their Hamiltonian-unbiasedness statistics.

Local spin directions are the six tokens ``+z -z +x -x +y -y``.  In the
{up_z, down_z} basis the local kets are fixed as up_x = (1, 1)/sqrt(2),
down_x = (1, -1)/sqrt(2), up_y = (1, i)/sqrt(2), down_y = (1, -i)/sqrt(2);
observables used here are insensitive to these phase choices.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import ceil, sqrt

import numpy as np

from .hamiltonian import EigenDecomposition

# local kets indexed by bit value: [amplitude on down_z, amplitude on up_z]
_S2 = 1.0 / sqrt(2.0)
LOCAL_KETS = {
    "+z": np.array([0.0, 1.0], dtype=np.complex128),
    "-z": np.array([1.0, 0.0], dtype=np.complex128),
    "+x": np.array([_S2, _S2], dtype=np.complex128),
    "-x": np.array([-_S2, _S2], dtype=np.complex128),
    "+y": np.array([1j * _S2, _S2], dtype=np.complex128),
    "-y": np.array([-1j * _S2, _S2], dtype=np.complex128),
}

# presets usable as initial states; all but the z ones approximate a HUB
# at strong disorder
PRESETS = ("neel_x", "neel_y", "neel_z", "ferro_x", "ferro_y", "domains_x", "domains_y")
HUB_PRESETS = ("neel_x", "neel_y", "ferro_x", "ferro_y", "domains_x", "domains_y")


def preset_directions(name: str, length: int) -> list[str]:
    """Expand a named preset to its per-site direction list."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {PRESETS}")
    kind, axis = name.split("_")
    if kind == "neel":
        return [("+" if i % 2 == 0 else "-") + axis for i in range(length)]
    if kind == "ferro":
        return [f"+{axis}"] * length
    # two polarized domains: first ceil(L/2) sites up, the rest down
    n_up = ceil(length / 2)
    return [f"+{axis}"] * n_up + [f"-{axis}"] * (length - n_up)


def product_state(spec: str | list[str], length: int | None = None) -> np.ndarray:
    """Tensor-product state vector from a preset name or direction list."""
    if isinstance(spec, str):
        if length is None:
            raise ValueError("a preset name needs the chain length")
        directions = preset_directions(spec, length)
    else:
        directions = list(spec)
        if length is not None and len(directions) != length:
            raise ValueError(f"direction list has {len(directions)} entries, expected {length}")
    if not directions:
        raise ValueError("empty direction list")
    psi = np.array([1.0], dtype=np.complex128)
    for token in directions:  # site 0 ends up in the least significant bit
        try:
            ket = LOCAL_KETS[token]
        except KeyError:
            raise ValueError(f"unknown direction token {token!r}") from None
        psi = np.kron(ket, psi)
    return psi


@dataclass(frozen=True)
class HubStats:
    """Statistics of D |<v|E_nu>|^2 over all eigenstates of one Hamiltonian.

    A state drawn from an exact Hamiltonian-unbiased basis has min = max = 1
    and participation entropy ln D; an energy eigenstate has max = D and
    participation entropy 0.
    """

    min: float
    max: float
    mean: float
    participation_entropy: float
    dimension: int

    @property
    def participation_fraction(self) -> float:
        """Participation entropy over its maximum ln D."""
        return self.participation_entropy / np.log(self.dimension)


def hub_stats(psi: np.ndarray, eig: EigenDecomposition) -> HubStats:
    """Eigenbasis overlap statistics of a normalized state."""
    psi = np.asarray(psi)
    if psi.shape != (eig.dimension,):
        raise ValueError(f"state has shape {psi.shape}, spectrum dimension {eig.dimension}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"state not normalized: |psi| = {norm!r}")
    p = np.abs(eig.eigenvectors.conj().T @ psi) ** 2
    dim = eig.dimension
    scaled = dim * p
    pos = p[p > 0]
    entropy = float(-np.sum(pos * np.log(pos)))
    return HubStats(
        min=float(scaled.min()),
        max=float(scaled.max()),
        mean=float(scaled.mean()),
        participation_entropy=entropy,
        dimension=dim,
    )
