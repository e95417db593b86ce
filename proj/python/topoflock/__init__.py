"""Python bindings for the topoflock core."""

from ._core import (
    ConfigInvalid,
    KernelSpec,
    TopoflockError,
    __version__,
    eval_commutator,
    eval_L,
    hydro_integrate,
    lambda2,
    preset_config,
    preset_names,
    region_contains,
    run_config,
    swarm_step,
    topo_distance,
)

__all__ = [
    "ConfigInvalid",
    "KernelSpec",
    "TopoflockError",
    "__version__",
    "eval_commutator",
    "eval_L",
    "hydro_integrate",
    "lambda2",
    "preset_config",
    "preset_names",
    "region_contains",
    "run_config",
    "swarm_step",
    "topo_distance",
]
