"""Fixed-point iteration for multivalued weak contractions in cone metric spaces."""

from .cone_order import ConeSpec, cone_contains, estimate_normality, leq, norm, strictly_less
from .contraction import (ContractionCertificate, LinearComparator, certify,
                          check_uniqueness_condition, sample_pairs)
from .errors import EmptyFixedPointSetError, InvalidArgument, NoCertificateError
from .kernels import BACKEND
from .metric_space import (MetricSpec, check_metric_axioms, componentwise_metric, distance,
                           scalar_metric)
from .setmap import (AffineSingle, BallMap, FiniteSet, PerturbedFamily, TimeDependent, TwoBranch,
                     directed_distance, evaluate, hausdorff, select)
from .solvers import (ConvergenceReport, SolverConfig, fixed_point_set, lambda_iterate,
                      picard_selection, residual, stability_experiment)

__version__ = "0.1.0"
