"""Python access to the phpvd core: preprocessing, CFGs, metrics and models."""

from ._core import (  # noqa: F401
    Cfg,
    Model,
    ConfusionReport,
    ConfigMismatch,
    LengthMismatch,
    LexError,
    MissingCheckpoint,
    ParseError,
    PhpvdError,
    Prediction,
    build_cfg,
    confusion,
    extract_functions,
    generate_synthetic,
    load_model,
    normalize,
    predict,
    scan,
    tokenize,
    train,
)

__all__ = [
    "Cfg",
    "Model",
    "ConfusionReport",
    "ConfigMismatch",
    "LengthMismatch",
    "LexError",
    "MissingCheckpoint",
    "ParseError",
    "PhpvdError",
    "Prediction",
    "build_cfg",
    "confusion",
    "extract_functions",
    "generate_synthetic",
    "load_model",
    "normalize",
    "predict",
    "scan",
    "tokenize",
    "train",
]
