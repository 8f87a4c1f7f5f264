"""Curved combustion fronts: wave profiles, implicit polytope surfaces, snapshots."""

from ._core import (
    DomainError,
    FrontConfiguration,
    Nonlinearity,
    NumericalError,
    Surface,
    ValidationError,
    WaveProfile,
    build_profile,
    check_profile,
    check_scaling,
    check_surface,
    find_wave_speed,
    measure_speed_1d,
    read_snapshot,
    shooting_function,
)

__all__ = [
    "DomainError",
    "FrontConfiguration",
    "Nonlinearity",
    "NumericalError",
    "Surface",
    "ValidationError",
    "WaveProfile",
    "build_profile",
    "check_profile",
    "check_scaling",
    "check_surface",
    "find_wave_speed",
    "measure_speed_1d",
    "read_snapshot",
    "shooting_function",
]
