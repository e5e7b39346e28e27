"""Fixed points of entanglement-breaking channels and contextuality checks."""

from ._broadcastlab import (
    BroadcastlabError,
    approx_check,
    atomic_decomposition,
    check_measurements,
    check_states,
    fixed_space,
    interval_effect,
    pvm_embed,
    qchannel_element,
    run_cli,
)

__all__ = [
    "BroadcastlabError",
    "approx_check",
    "atomic_decomposition",
    "check_measurements",
    "check_states",
    "fixed_space",
    "interval_effect",
    "pvm_embed",
    "qchannel_element",
    "run_cli",
]
