"""Learning generative models of spatial object relations from demonstrations
and planning object placements with them in simulated tabletop scenes."""

from .geometry import (
    AABB,
    CylCoords,
    ObjectCatalog,
    ObjectModel,
    Pose,
    RelationFrame,
    Scene,
    build_relation_frame,
    from_cylindrical,
    to_cylindrical,
    world_aabb,
)
from .stats import (
    CylindricalDistribution,
    Gaussian2D,
    GaussianAccumulator,
    VonMises,
    VonMisesAccumulator,
    finalize,
    mle_gaussian,
    mle_vonmises,
)
from .relations import (
    Demonstration,
    RelationCommand,
    RelationModel,
    RelationSymbol,
    augment_first_sample,
    demonstration_to_cyl,
    update_batch,
    update_incremental,
)
from .grounding import GroundingCatalog, ground, verbalize_query
from .memory import LongTermMemory
from .planner import PlanConfig, PlanResult, PlanStatus, Workspace, check_feasible, plan
from .baselines import baseline_place, baseline_plan
from .harness import (
    LearningScenario,
    MetricsRow,
    SimContext,
    Task,
    aggregate,
    evaluate_model,
    run_interaction,
    run_learning_scenario,
)
from .synth import (
    default_grounding_catalog,
    default_object_catalog,
    default_relation_symbols,
    default_workspace,
    generate_synthetic_demos,
    ground_truth_distribution,
)

__version__ = "0.1.0"
