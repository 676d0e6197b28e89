"""Data depth functions, depth-based classification, and DD-plot tooling."""

from .datamodel import (
    DataMatrix,
    GeneratorSpec,
    LabeledSample,
    generate_two_class,
    load_csv,
    save_csv,
)
from .depths import DepthSpace, DepthSpec, depth, depth_space
from .errors import (
    DegenerateDataError,
    DepthcraftError,
    FormatError,
    ParameterError,
    SizeError,
    SolverError,
)
from .estimators import ScatterEstimate, inv_sqrt, mcd_estimate, moment_estimate

__version__ = "0.1.0"

__all__ = [
    "DataMatrix",
    "DepthSpace",
    "DepthSpec",
    "DegenerateDataError",
    "DepthcraftError",
    "FormatError",
    "GeneratorSpec",
    "LabeledSample",
    "ParameterError",
    "ScatterEstimate",
    "SizeError",
    "SolverError",
    "depth",
    "depth_space",
    "generate_two_class",
    "inv_sqrt",
    "load_csv",
    "mcd_estimate",
    "moment_estimate",
    "save_csv",
    "__version__",
]
