from .exact import (
    ExactModel,
    ExactModelTask,
    TablePolicy,
    SlotPolicy,
    StateSlotPolicy,
    enumerate_policies,
    exact_J,
    exact_Q,
    exact_Q_policy,
    load_model,
    parse_model,
    reference_policy,
    serialize_model,
    state_distribution,
    two_level_chooser,
    indistinct_branch_chooser,
    shared_feature_chooser,
)
from .bounds import (
    BoundReport,
    check_difference_identity,
    check_regret_bound,
    random_models,
    run_training,
)
from .counterexamples import (
    reference_rollin_failure,
    reference_rollout_failure,
    one_step_deviations,
)
from .snake import (
    best_neighbor_descent,
    longest_snake,
    longest_snake_bruteforce,
    snake_costs,
    snake_lower_bound,
)
