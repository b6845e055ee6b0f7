"""Photon-subtracted SU(1,1) interferometer: phase sensitivity, quantum Fisher
information, photon-number limits, and a brute-force Fock-space oracle."""

from ._core import (
    LimitsReport,
    NumericalError,
    Params,
    PhaseOptimum,
    QfiReport,
    SensitivityReport,
    ValidationError,
    csv,
    figure_ids,
    internal_photon_number,
    limits,
    optimal_phase,
    oracle_qfi,
    oracle_sensitivity,
    parse_config,
    qcrb,
    qfi_ideal,
    qfi_lossy,
    run_config,
    run_figure,
    sensitivity_ideal,
    sensitivity_lossy,
    verify,
)

__all__ = [name for name in dir() if not name.startswith("_")]
