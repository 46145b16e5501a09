"""Exact Jordan-Chevalley decomposition over Q and F_p.

Splits a square matrix A into a semisimple part D and a nilpotent
part N with A = D + N and DN = ND, by a Newton-style iteration on a
square-free annihilating polynomial — no eigenvalues, no field
extensions, every result exact and certified.
"""

from .field import (
    Field,
    FieldElement,
    FieldMismatchError,
    PrimeField,
    QQ,
    Rationals,
    ScalarParseError,
    UnsupportedFieldError,
)
from .poly import (
    DuplicateRootError,
    ExtGcd,
    Poly,
    PolyParseError,
    SquareFreeCert,
    bezout_for,
    compose,
    compose_mod,
    derivative,
    divides,
    ext_gcd,
    format_poly,
    gcd,
    is_squarefree,
    lcm,
    parse_poly,
    pow_mod,
    squarefree_from_roots,
    squarefree_part,
    squarefree_part_char0,
)
from .matrix import (
    DimensionMismatchError,
    Mat,
    MatrixParseError,
    block_diag,
    companion,
    eval_poly,
    eval_poly_bsgs,
    format_matrix,
    is_nilpotent,
    jordan_block,
    matrix_from_json_dict,
    matrix_to_json_dict,
    minimal_polynomial,
    parse_matrix,
    random_block_companion,
    random_matrix,
    random_monic,
    read_matrix,
    write_matrix,
)
from .chevalley import (
    AnnihilatorError,
    Decomposition,
    IterationMode,
    NonConvergenceError,
    SidecarParseError,
    TraceStep,
    VerificationReport,
    iteration_trace,
    jordan_chevalley,
    read_decomposition,
    verify,
    write_decomposition,
)

__version__ = "0.1.0"

__all__ = [
    "AnnihilatorError",
    "Decomposition",
    "DimensionMismatchError",
    "DuplicateRootError",
    "ExtGcd",
    "Field",
    "FieldElement",
    "FieldMismatchError",
    "IterationMode",
    "Mat",
    "MatrixParseError",
    "NonConvergenceError",
    "Poly",
    "PolyParseError",
    "PrimeField",
    "QQ",
    "Rationals",
    "ScalarParseError",
    "SidecarParseError",
    "SquareFreeCert",
    "TraceStep",
    "UnsupportedFieldError",
    "VerificationReport",
    "bezout_for",
    "block_diag",
    "companion",
    "compose",
    "compose_mod",
    "derivative",
    "divides",
    "eval_poly",
    "eval_poly_bsgs",
    "ext_gcd",
    "format_matrix",
    "format_poly",
    "gcd",
    "is_nilpotent",
    "is_squarefree",
    "iteration_trace",
    "jordan_block",
    "jordan_chevalley",
    "lcm",
    "matrix_from_json_dict",
    "matrix_to_json_dict",
    "minimal_polynomial",
    "parse_matrix",
    "parse_poly",
    "pow_mod",
    "random_block_companion",
    "random_matrix",
    "random_monic",
    "read_decomposition",
    "read_matrix",
    "squarefree_from_roots",
    "squarefree_part",
    "squarefree_part_char0",
    "verify",
    "write_decomposition",
    "write_matrix",
]
