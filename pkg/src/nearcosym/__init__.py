"""Chart based numerical verification of almost contact metric structures."""

from .chart import (
    Box,
    ChartManifold,
    DegenerateMetricError,
    DomainError,
    FrameError,
    PointGeometry,
    TangentVector,
    TensorField,
    TensorValue,
)
from .structures import (
    AlmostContactStructure,
    FramePoint,
    StructureError,
    StructurePoint,
    axiom_residuals,
    nearly_cosymplectic_residual,
    orthonormal_frame,
)
from .models import REGISTRY, build_model, model_names
from .catalog import CATALOG, IdentityCheck, catalog_by_id, evaluate_identity

__version__ = "0.1.0"

__all__ = [
    "Box",
    "ChartManifold",
    "DegenerateMetricError",
    "DomainError",
    "FrameError",
    "PointGeometry",
    "TangentVector",
    "TensorField",
    "TensorValue",
    "AlmostContactStructure",
    "FramePoint",
    "StructureError",
    "StructurePoint",
    "axiom_residuals",
    "nearly_cosymplectic_residual",
    "orthonormal_frame",
    "REGISTRY",
    "build_model",
    "model_names",
    "CATALOG",
    "IdentityCheck",
    "catalog_by_id",
    "evaluate_identity",
    "__version__",
]
