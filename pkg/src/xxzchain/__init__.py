"""Disordered XXZ spin-chain dynamics.

Krylov time evolution of product states, single-site and half-chain
entanglement entropies, total correlations, disorder ensembles, power
spectra, and logarithmic-growth fits.
"""
from ._version import __version__
from .analysis import LogFit, fit_log_growth, local_minima
from .hamiltonian import (
    DisorderRealization,
    EigenDecomposition,
    SparseHamiltonian,
    build_hamiltonian,
    build_phenomenological_two_spin,
    dense_spectrum,
    sample_disorder,
)
from .hilbert import (
    SectorDecomposition,
    SpinConfiguration,
    config_to_index,
    index_to_config,
    sector_decomposition,
)
from .observables import (
    EntropyRecord,
    block_rdm,
    entropy_record,
    single_site_rdm,
    vn_entropy,
)
from .propagator import (
    KrylovConfig,
    PropagationError,
    evolve_on_grid,
    exact_expv,
    lanczos_expv,
)
from .runner import (
    EnsembleAverages,
    EnsembleResult,
    ExperimentConfig,
    aggregate_directory,
    load_result,
    run_experiment,
)
from .spectral import (
    PeakList,
    PowerSpectrum,
    cos_power_comb,
    detect_peaks,
    power_spectrum,
    spectrum_from_series,
    two_spin_entropy,
)
from .states import HubStats, hub_stats, preset_directions, product_state

__all__ = [name for name in dir() if not name.startswith("_")]
