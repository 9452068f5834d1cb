"""Van der Waerden numbers through propositional satisfiability."""

from .certify import (
    DuplicateError,
    MalformedModel,
    ParseError,
    RangeError,
    VerifyReport,
    decode_model,
    encode_partition,
    parse_certificate,
    permute_blocks,
    reflect,
    verify,
    write_certificate,
)
from .dpll import Assignment, ResourceBudget, SolveResult, Status, enumerate_models, solve_complete
from .encoder import (
    CAtom,
    CardLit,
    CnfTheory,
    CTheory,
    SymmetryMode,
    encode_cnf,
    encode_ps,
    read_dimacs,
    read_xdimacs,
    var_of,
    var_unmap,
    write_dimacs,
    write_xdimacs,
)
from .model import Certificate, Params, Partition, Progression, ap_count, ap_enumerate, is_ap_free
from .search import search_exact, search_lower_bound, theoretical_bounds
from .walk import WalkConfig, breakcount, solve_local

__version__ = "0.1.0"
