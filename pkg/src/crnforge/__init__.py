"""crnforge: compile, simulate, and certify deterministic chemical computation.

Piecewise-affine functions over the naturals compile into chemical
reaction networks whose stochastic dynamics stably compute them; a
Gillespie simulator measures convergence times and an exhaustive
bounded-reachability verifier certifies correctness at desk scale.
"""

from importlib import resources

from .core import (
    Configuration,
    Crc,
    Crd,
    Crn,
    Reaction,
    Species,
    applicable,
    apply,
    enabled,
    initial_configuration,
    is_terminal,
    output_counts,
    vote,
)
from .semilinear import (
    AffinePiece,
    Guard,
    LinearSet,
    Mod,
    PiecewiseAffineFn,
    SemilinearSet,
    Threshold,
    disambiguate_guards,
    eval_fn,
    eval_guard,
    eval_piece,
    hat_fn,
    hat_transform,
    linear_contains,
    semilinear_contains,
)
from .exact import solve_exact
from .decompose import extract_affine
from .compiler import (
    CompileOptions,
    VoterBinding,
    compile_affine,
    compile_guard,
    compile_mod,
    compile_piecewise,
    compile_search,
    compile_threshold,
    graph_decider,
    search_crc,
    two_voter_form,
)
from .kinetics import (
    SimLimits,
    SimResult,
    VolumePolicy,
    propensity,
    run_trials,
    simulate,
    step,
)
from .verifier import (
    DEFAULT_CAP,
    VerifyReport,
    check_stable_computation,
    check_stable_decision,
    inputs_up_to_norm,
    output_stable_set,
    reachable_set,
)
from .bench import ScalingRow, fit_loglog, scaling_run

__version__ = "0.1.0"


def data_path(name: str):
    """Path to a bundled example file (fig1a.crn, fig2.json, ...)."""
    return resources.files("crnforge").joinpath("data", name)
