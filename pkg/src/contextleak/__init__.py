"""
contextleak: incompatibility of physical contexts as information leakage.

Density matrices, POVMs, quantum instruments with their Naimark parent
instruments, entropic quantities, and the entropy-difference and
Holevo-leak measures of how much one measurement disturbs another.
All information quantities are in nats.
"""

from .errors import ContextLeakError
from .info import (
    coherent_information,
    concurrence,
    conditional_entropy,
    entropy,
    holevo_chi,
    mutual_information,
    old_information,
    shannon,
)
from .instruments import (
    NaimarkExtension,
    depolarizing_instrument,
    implements,
    luders_instrument,
    naimark_extension,
    parent_instrument,
    post_process,
    random_instrument,
)
from .ipc import (
    LeakReport,
    MemoryContext,
    chi_alice,
    ipc_modified,
    leak,
    memory_gap,
    min_leak_over_eve,
    new_ipc_mem,
    old_ipc,
    old_ipc_generalized,
    old_ipc_mem,
    sharp_relation_residual,
)
from .maps import Channel, Instrument, KrausMap, apply_instrument, choi_matrix, compose, induced_channel
from .measurements import Observable, luders_channel, pauli_observable, random_povm, random_pvm, validate
from .scenarios import Example2Config, probe_conjecture, run_example1, run_example2
from .states import Context, DensityMatrix, Ensemble, maximally_mixed, pure, random_density

__version__ = "0.1.0"

__all__ = [
    "Channel",
    "Context",
    "ContextLeakError",
    "DensityMatrix",
    "Ensemble",
    "Example2Config",
    "Instrument",
    "KrausMap",
    "LeakReport",
    "MemoryContext",
    "NaimarkExtension",
    "Observable",
    "apply_instrument",
    "chi_alice",
    "choi_matrix",
    "coherent_information",
    "compose",
    "concurrence",
    "conditional_entropy",
    "depolarizing_instrument",
    "entropy",
    "holevo_chi",
    "implements",
    "induced_channel",
    "ipc_modified",
    "leak",
    "luders_channel",
    "luders_instrument",
    "maximally_mixed",
    "memory_gap",
    "min_leak_over_eve",
    "mutual_information",
    "naimark_extension",
    "new_ipc_mem",
    "old_information",
    "old_ipc",
    "old_ipc_generalized",
    "old_ipc_mem",
    "parent_instrument",
    "pauli_observable",
    "post_process",
    "probe_conjecture",
    "pure",
    "random_density",
    "random_instrument",
    "random_povm",
    "random_pvm",
    "run_example1",
    "run_example2",
    "shannon",
    "sharp_relation_residual",
    "validate",
]
