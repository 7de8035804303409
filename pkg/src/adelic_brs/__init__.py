"""Exact construction and verification of polytopal bounded remainder sets on adelic tori."""

from __future__ import annotations

__version__ = "0.1.0"

from .exactnum import QuadReal, padic_abs, padic_frac, padic_val  # noqa: E402
from .adeles import AdeleVector, GammaVector, PrimeSet, check_ergodic, weyl_sum  # noqa: E402
from .brs import RotationSpec, VolumeSpec, construct_brs  # noqa: E402
from .harness import birkhoff_series, enumerate_volumes, lemma_chain_check  # noqa: E402

__all__ = [
    "QuadReal", "padic_abs", "padic_frac", "padic_val",
    "AdeleVector", "GammaVector", "PrimeSet", "check_ergodic", "weyl_sum",
    "RotationSpec", "VolumeSpec", "construct_brs",
    "birkhoff_series", "enumerate_volumes", "lemma_chain_check",
]
