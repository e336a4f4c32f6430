"""Conditional quantum dynamics, discord and environment-record redundancy.

Exact dense linear algebra on small Hilbert spaces (total dimension up to
``2**14``). Submodules:

``qstate``      states, density matrices, partial traces, conditioning
``dynamics``    c-not, c-shift, Hadamard-Fourier transform, interaction Hamiltonians
``infotheory``  entropies, mutual information, action cost of records
``discord``     measurement-based information, discord, dephasing
``witness``     branching environments and redundancy ratios
``cli``         scenario runner (``einselection run|sweep|validate``)
"""

__version__ = "0.1.0"

from .qstate import (  # noqa: E402
    DensityMatrix,
    MeasurementBasis,
    PureState,
    SubsystemLayout,
    apply_unitary,
    compose,
    condition,
    partial_trace,
    reduced_density,
    spectrum,
    to_density,
)
from .infotheory import entropy, mutual_information  # noqa: E402

__all__ = [
    "DensityMatrix",
    "MeasurementBasis",
    "PureState",
    "SubsystemLayout",
    "apply_unitary",
    "compose",
    "condition",
    "entropy",
    "mutual_information",
    "partial_trace",
    "reduced_density",
    "spectrum",
    "to_density",
]
