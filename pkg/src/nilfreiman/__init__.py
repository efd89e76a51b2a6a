"""Exact tools for approximate subgroups of unitriangular groups U_n(Q)."""

from .approxcert import ApproxCert, Clause, certify, check_calculus, doubling, verify_cert
from .finset import CosetSet, SymSet, coset_product, intersect_subgroup, power, product, quotient_mod
from .freiman import (
    CentralizerWitness,
    CoverResult,
    GleasonWitness,
    TrivialSetError,
    check_a10,
    check_centralizer_bound,
    cover,
    find_central_element,
    gleason_check,
    verify_cover,
)
from .generators import CORPUS, GOLDEN, InstanceSpec, central_interval, heisenberg_box, unitri_box, word_ball
from .kernels import Limits, ResourceCapExceeded, backend, get_backend, limits, set_backend
from .subalg import (
    InvariantViolation,
    QuotientCtx,
    Subalgebra,
    SubalgebraError,
    canon_coset,
    centralizer_preimage,
    contains_elt,
    extend_by,
    is_ideal,
    lie_closure,
    lower_central_series,
)
from .unigroup import NilVec, UniTri, canonical_key, comm, exp, inv, log, mul

__version__ = "0.1.0"
