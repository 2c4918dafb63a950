"""Numerical verification toolkit for rank-one hyperbolic boundary analysis."""

from .models import MODEL_NAMES, GroupElement, LieAlgebraElement, RankOneModel, build_model
from .group import (
    NbarCoordinates, iwasawa_kan, decompose_ANK, decompose_NAK, bruhat_nbar,
    nbar_exp, nbar_log, script_N, script_Q, angle_bracket, weyl_element,
)

__all__ = [
    "MODEL_NAMES", "GroupElement", "LieAlgebraElement", "RankOneModel",
    "build_model", "NbarCoordinates", "iwasawa_kan", "decompose_ANK",
    "decompose_NAK", "bruhat_nbar", "nbar_exp", "nbar_log", "script_N",
    "script_Q", "angle_bracket", "weyl_element",
]

__version__ = "0.1.0"
