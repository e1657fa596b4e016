"""Driven Cooper-pair box: transition matrices, microreversibility and work statistics."""

from ._microrev import (
    BiasPoint,
    DetectorParams,
    DeviceParams,
    Direction,
    DriveProtocol,
    PropagatorConfig,
    TransitionMatrix,
    beta_ratio,
    bk_equality,
    build_hamiltonian,
    default_protocol,
    dephasing_ratio,
    detection_probability,
    energy_ladder,
    evolve,
    gibbs_weights,
    microrev_deviation,
    reverse_protocol,
    run_protocol,
    sample_drive,
    work_distribution,
)

__all__ = [name for name in dir() if not name.startswith("_")]
