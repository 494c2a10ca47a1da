"""symlab: a numerical laboratory for subspace symmetrizations.

The package implements seven symmetrization operators with respect to a
linear subspace (Steiner, Schwarz, Minkowski, Minkowski-Blaschke, fiber,
inner and outer rotational), constructions of small subspace families whose
reflections or rotational symmetries force spherical symmetry, and an
experiment harness that iterates the operators along schedules and verdicts
the convergence behaviour.
"""

from .bodies import (
    DirectionGrid,
    OriginBall,
    Polytope,
    SupportVector,
    VoxelSet,
    ball_deviation,
    bounding_radius,
    convert,
    devoxelize,
    hausdorff_distance,
    mean_width,
    support_of,
    volume,
    voxelize_polytope,
    voxelize_support,
)
from .errors import InputError, NumericalError, SymlabError
from .groups import (
    FamilyDiagnostics,
    check_family,
    is_rotationally_symmetric,
    is_symmetric,
    orbit_density,
    partition_product_body,
)
from .harness import (
    ConvergenceReport,
    ExperimentConfig,
    KuratowskiEstimate,
    config_hash,
    iterate,
    kuratowski_limits,
    preset_config,
    run_batch,
    run_experiment,
    run_preset,
)
from .operators import (
    apply,
    cyl_hull,
    fiber,
    inner_rotational,
    layering,
    minkowski,
    minkowski_blaschke,
    minkowski_voxel,
    outer_rotational,
    schwarz,
    steiner,
    translate_or_cube,
)
from .schedules import (
    Schedule,
    cyclic_with_repeats,
    dense_random,
    explicit,
    make_family,
    round_robin,
    schedule_from_config,
)
from .subspaces import (
    PrincipalForm,
    Subspace,
    canonical_pair,
    klain_triple,
    orthonormalize,
    principal_angles,
    project,
    reflect,
    subspace_distance,
    subspaces_equal,
    surrogate_angles,
)

__all__ = [
    # errors
    "InputError",
    "NumericalError",
    "SymlabError",
    # subspaces
    "PrincipalForm",
    "Subspace",
    "canonical_pair",
    "klain_triple",
    "orthonormalize",
    "principal_angles",
    "project",
    "reflect",
    "subspace_distance",
    "subspaces_equal",
    "surrogate_angles",
    # bodies
    "DirectionGrid",
    "OriginBall",
    "Polytope",
    "SupportVector",
    "VoxelSet",
    "ball_deviation",
    "bounding_radius",
    "convert",
    "devoxelize",
    "hausdorff_distance",
    "mean_width",
    "support_of",
    "volume",
    "voxelize_polytope",
    "voxelize_support",
    # operators
    "apply",
    "cyl_hull",
    "fiber",
    "inner_rotational",
    "layering",
    "minkowski",
    "minkowski_blaschke",
    "minkowski_voxel",
    "outer_rotational",
    "schwarz",
    "steiner",
    "translate_or_cube",
    # schedules and families
    "Schedule",
    "cyclic_with_repeats",
    "dense_random",
    "explicit",
    "make_family",
    "round_robin",
    "schedule_from_config",
    # groups
    "FamilyDiagnostics",
    "check_family",
    "is_rotationally_symmetric",
    "is_symmetric",
    "orbit_density",
    "partition_product_body",
    # harness
    "ConvergenceReport",
    "ExperimentConfig",
    "KuratowskiEstimate",
    "config_hash",
    "iterate",
    "kuratowski_limits",
    "preset_config",
    "run_batch",
    "run_experiment",
    "run_preset",
]

__version__ = "0.1.0"
