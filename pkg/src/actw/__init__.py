"""Workbench for infinitary action logic with the exponential modality."""

from .syntax import (
    Bang,
    DSequent,
    FragmentClass,
    Formula,
    Join,
    Meet,
    One,
    Prod,
    RSlash,
    Sequent,
    Slash,
    Star,
    Var,
    Zero,
    classify_bang,
    complexity,
    parse_dsequent,
    parse_formula,
    parse_sequent,
    print_formula,
    print_sequent,
    subformulas,
)
from .calculus import (
    Derivation,
    RuleId,
    RuleInstance,
    SchemaCertificate,
    StarFamily,
    backward_finitary,
    check_derivation,
    invert,
    omega_premises,
    validate_instance,
)
from .dyadic import absorb, backward_bsc, backward_dyadic, to_dyadic, weaken_zone
from .ordinals import OrdVec, base_step, lift, mu, mu_sequent, ord_add, ord_compare, ord_shift, rho, rho_inv
from .search import (
    DERIVABLE,
    UNDERIVABLE,
    UNKNOWN,
    Verdict,
    bsc_prove,
    cparam,
    decide_ne_star_free,
    derive_from_hypotheses,
    enumerate_fin,
    prove_bounded,
    prove_flat_bounded,
    rank_upper_bound,
    verify_schema,
)
from .reductions import (
    HypothesisSet,
    RewritingSystem,
    TuringMachine,
    build_H,
    compile_tm,
    embed,
    f0,
    f1,
    gen_formulas,
    gen_main_sequent,
    pair,
    srs_reach,
    tm_run,
    triple,
    unpair,
    untriple,
    upsilon,
)
