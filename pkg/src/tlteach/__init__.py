"""Machine teaching of bounded temporal formulas by demonstration.

A library plus CLI for simulating teacher/learner sessions in which a teacher
selects labeled trajectories that prune a learner's hypothesis space of
bounded temporal formulas until the learner adopts the target.
"""

from .errors import (
    BudgetExceededError,
    FormulaSyntaxError,
    InfeasibleInstanceError,
    InfeasibleLengthError,
    IterationCapError,
    MalformedDemonstrationError,
    NoProgressError,
    UncoverableError,
)
from .formulas import (
    And,
    Atom,
    F,
    Formula,
    G,
    Implies,
    Label,
    Not,
    Or,
    Threshold,
    TrueF,
    implies_bruteforce,
    implies_syntactic,
    minimal_length,
    normalize,
    parse,
    render,
)
from .semantics import (
    Demonstration,
    Trajectory,
    check_demonstration,
    format_trajectory,
    strong_sat,
    strongly_inconsistent,
    verdict,
    weak_sat,
)
from .learner import (
    HypothesisSet,
    LearnerState,
    PreferenceModel,
    VersionSpace,
    check_cover_closure,
    check_order_consistency,
    color_manhattan_preference,
    learner_step,
    local_preference,
    manhattan_preference,
    noisy_preference,
    preferred_set,
    preferred_version_space,
    prune,
    ranked_preference,
    uniform_preference,
)
from .solver import (
    IpInstance,
    IpSolution,
    build_ip,
    objective_value,
    solve_ip,
    to_lp,
)
from .domains import (
    StateDomain,
    generate_hypothesis_grid,
    gridworld_domain,
    inject_constraints,
    load_color_map,
    numeric_domain,
    parse_trajectory,
    random_rollout,
    valid_trajectory,
)
from .teaching import (
    StepChoice,
    StepRecord,
    TeacherConfig,
    TeachingTranscript,
    boundary_oracle,
    compute_demonstration,
    cost_metrics,
    enumerate_demo_pool,
    exhaustive_teach,
    ip_teach,
    min_demo_length,
    optimal_cover_teach,
    positive_only_teach,
    rg_teach,
    teachability_checks,
    teaching_complexity,
    worst_case_costs,
)

__version__ = "0.1.0"
