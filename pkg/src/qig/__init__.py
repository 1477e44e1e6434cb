"""Quantum information geometry: monotone metrics, divergences, metric
extraction and universal geodesics on faithful density matrices."""
from .matcore import DimensionError, DomainError
from .states import UnfoldedPoint, UnfoldedTangent, fold, unfold
from .metrics import MonotoneFunction, builtin_f, petz_metric
from .divergences import GFunction, builtin_g, get_divergence
from .extraction import extract_tensor, f_from_g
from .geodesics import fr_geodesic, universal_geodesic
from .channels import KrausMap, apply_channel, random_kraus

__version__ = "0.1.0"
