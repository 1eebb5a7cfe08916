"""vexlab: a numerical laboratory for variable-exponent Lebesgue spaces.

Grids and sampled functions, a closed-form expression DSL, the modular
functional and Luxemburg norm, the discrete uncentered maximal operator
(exhaustive oracle plus prefix-sum implementation), verdict engines for
the modular-inequality criteria, the explicit certifying weight, and an
adversarial falsifier with pinned reproductions.
"""

from .conditions import (ConditionReport, DefectField, NoAdmissibleKappa,
                         OmegaCertificate, PreconditionError,
                         TruncationSchedule, check_embedding,
                         check_finite_measure, check_lerner, check_touching,
                         construct_omega, defect_exponent,
                         defect_integral_estimate, ess_range,
                         geometric_radii)
from .dsl import EvalError, Expr, ParseError, parse, to_source
from .experiments import (ConditionsNotMet, FalsifyBudgetError,
                          InequalityReport, LogHolderDiagnostic, Witness,
                          estimate_constants, falsify, fourier_check,
                          log_holder_diagnostic, modular_log_check,
                          reproduce_example, step_profiles)
from .grid import (ExponentField, GridDomain, GridError, GridFunction,
                   ball_restrict, indicator, integrate, make_box,
                   make_interval, measure, restrict_mask, sample,
                   tail_restrict)
from .maximal import (MaxOpResult, Operator, apply_operator,
                      fourier_modulus_op, identity_op, maximal_fast,
                      maximal_op, maximal_oracle)
from .modular import (ModularValue, NormConvergenceError, luxemburg_norm,
                      modular, unit_ball_check)

__version__ = "0.1.0"
