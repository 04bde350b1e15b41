"""Batched evaluation and path tracking for polyhedral homotopies.

The extended Jacobians of many points are computed with two dense matrix
products, and Euler and Newton directions come from one QR factorization
per point.
"""

from .errors import (DegenerateTangent, DuplicateMonomial, EmptySupport, MonomialOverflow,
                     ParseError, PhgError, RankDeficient, ShapeError, SingularJacobian,
                     StartPointInvalid, UsageError, ZeroCoordinate)
from .evaluation import (ExtendedJacobianBatch, PointBatch, eval_extended_jacobian_log,
                         eval_scalar_oracle, evaluate_batch, rescale_to_homogeneous,
                         to_log_coords)
from .directions import (BorderedJacobian, DirectionPair, assemble_bordered,
                         euler_newton_direct, euler_newton_unified)
from .generators import gen_chandra, gen_cyclic, gen_random, random_torus_points, seed_on_path
from .kernels import HAVE_COMPILED, batched_qr, gemm, get_backend
from .system import (HomogenizedSystem, HomotopyTables, LaurentSystem, build_tables,
                     homogenize, parse_system, dump_system, tables_for, union_support, unmix)
from .tracker import (Status, TrackOptions, TrackResult, chordal_distance, euler_newton_step,
                      retrace_check, track_batch)

__version__ = "0.1.0"
