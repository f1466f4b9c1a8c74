"""Discrete invariant idempotent (max-plus) measures of countable IFS, their
fuzzification and Higuchi fractal dimension."""
from .engine import IterationConfig, IterationReport, iterate, markov_step, word_oracle
from .errors import (ConfigError, DegenerateFit, EmptySupport, InvalidScale, InvalidTruncation,
                     MaxPlusIFSError, NonFiniteInput, NotContractive, OracleBudgetExceeded,
                     OutOfDomain, ShapeMismatch, UnknownFamily)
from .fuzzy import discrete_dtheta, fuzzify, superlevel_set
from .grid import UniformGrid, discretize_map, project
from .higuchi import (FitResult, HiguchiResult, curve_lengths_1d, hfd_1d, hfd_2d,
                      least_squares_fit, surface_areas_2d)
from .ifs import (AffineMap, CountableSystem, PartialSystem, build_partial, builtin_family,
                  contraction_rate, resolution_delta)
from .maxplus import BOTTOM, odot, oplus, renormalize, sup_of

__version__ = "0.1.0"
