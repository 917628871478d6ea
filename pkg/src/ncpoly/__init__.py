"""Orthogonal polynomials in noncommuting variables.

Moment functionals on the free monoid, Gram-kernel orthonormalization,
three-term recurrence blocks and their inversion, truncated block Jacobi
operators, a decision procedure for the positivity (moment) problem, and
kernel identities evaluated at matrix points of the row ball and its
half-space Cayley image.
"""

from . import cli, functional, jacobi, opeval, orthopoly, recurrence, serialize, words
from .errors import (ConsistencyError, ConvergenceError, DataIncompleteError,
                     MembershipError, NCPolyError, PositivityError,
                     ValidationError)
from .functional import (GramMatrix, MomentFunctional, from_representation,
                         gram, inner_product, kernel_entry, strict_positivity)
from .jacobi import BlockJacobi, HamburgerResult, hamburger_check
from .opeval import (KernelResult, OperatorTuple, cayley, cayley_inverse,
                     cd_full_check, cd_inner_identity, cd_kernel, f_sandwich,
                     membership, reproduction_check, separating_tuples,
                     szego_ball, szego_siegel)
from .orthopoly import (OrthoBasis, SzegoData, determinant_formula, evaluate,
                        orthogonalize, orthonormality_residual, szego_recursion)
from .recurrence import RecurrenceCoeffs, extract, favard, residual_check
from .words import EMPTY, Word, concat, enumerate_level, involution, words_up_to

__version__ = "0.1.0"

__all__ = [
    "BlockJacobi", "ConsistencyError", "ConvergenceError", "DataIncompleteError",
    "EMPTY", "GramMatrix", "HamburgerResult", "KernelResult", "MembershipError",
    "MomentFunctional", "NCPolyError", "OperatorTuple", "OrthoBasis",
    "PositivityError", "RecurrenceCoeffs", "SzegoData", "ValidationError",
    "Word", "cayley", "cayley_inverse", "cd_full_check", "cd_inner_identity",
    "cd_kernel", "cli", "concat", "determinant_formula", "enumerate_level",
    "evaluate", "extract", "f_sandwich", "favard", "from_representation",
    "functional", "gram", "hamburger_check", "inner_product", "involution",
    "jacobi", "kernel_entry", "membership", "opeval", "orthogonalize",
    "orthonormality_residual", "orthopoly", "recurrence", "reproduction_check",
    "residual_check", "separating_tuples", "serialize", "strict_positivity",
    "szego_ball", "szego_recursion", "szego_siegel", "words", "words_up_to",
]
