from ._shapestar import (
    DeformableModel,
    Error,
    Observation,
    ParseError,
    Reconstruction,
    gnc_surrogate,
    generate,
    geodesic_rotation_error,
    load_model,
    load_observation,
    save_model,
    save_observation,
    shape_sharp,
    shape_star,
    weight_update,
)

__all__ = [
    "DeformableModel",
    "Error",
    "Observation",
    "ParseError",
    "Reconstruction",
    "gnc_surrogate",
    "generate",
    "geodesic_rotation_error",
    "load_model",
    "load_observation",
    "save_model",
    "save_observation",
    "shape_sharp",
    "shape_star",
    "weight_update",
]
