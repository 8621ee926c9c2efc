"""Sampling-based optimal path planning with informed sampling and
point-cloud guidance, plus problem generators and a benchmark harness."""

from .config import PlannerConfig
from .errors import (
    ContractViolationError,
    DegenerateDomainError,
    GenerationError,
    GuidanceUnavailableError,
    InfeasibleFocusError,
    InfeasibleSpaceError,
    PlanningError,
)
from .geometry import distance, sample_uniform_box, sample_unit_ball
from .guidance import (
    GuidanceSet,
    PointCloud,
    RemoteGuidanceProvider,
    add_one_hot_features,
    bfs_connectivity,
    infer_guidance,
    normalize_coordinates,
    point_cloud_sampling,
    pointnet_guide,
)
from .grid import OccupancyGrid, OracleGuidanceProvider, astar, label_guidance, rasterize
from .informed import InformedSet, informed_membership, informed_or_uniform, informed_sample
from .planners import VARIANTS, RunRecord, irrt_star, nirrt_star, plan, rrt_star
from .problems import (
    gen_center_block,
    gen_narrow_passage,
    gen_random_world_2d,
    gen_random_world_3d,
)
from .rng import RngHandle, derive_seed
from .tree import Tree, extend_and_rewire, in_goal_region, near, nearest, solution_cost, steer
from .world import (
    Ball,
    Box,
    ProblemInstance,
    World,
    collision_free_segment,
    is_free,
    load_problem,
    sample_free,
    save_problem,
)

__version__ = "0.1.0"
