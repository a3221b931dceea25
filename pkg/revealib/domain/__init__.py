from .types import (
    CUSTOM_1D_FORMS,
    FEASIBILITY_TOL,
    SIMPLEX_TOL,
    Domain,
    DomainKind,
    Instance,
    NoiseMode,
    Observation,
    ParameterPoint,
    ParameterSpace,
    SpaceKind,
    UtilityForm,
    UtilityKind,
)
from .utility import LOG_FLOOR, c_map, eval_f, f1
from .serialization import InstanceStream, dumps_stream, loads_stream, read_stream, write_stream
