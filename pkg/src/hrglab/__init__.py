"""hrglab: a simulation laboratory for random hyperbolic graphs.

Vertices are points on the curvature -alpha^2 hyperbolic disk of radius R
with N = nu * e^{R/2}; two vertices are adjacent iff their hyperbolic
distance is at most R.  The package samples the model at scale, builds the
adjacency graph in near-linear time, and measures the structural facts the
model is known for: power-law degrees, clustering, the core clique, and
doubly-logarithmic typical distances.
"""

from .geometry import (
    ModelParams,
    PolarPoint,
    TubeClass,
    TubeParams,
    area_disk,
    circle_length,
    hyperbolic_distance,
    radial_cdf,
    radial_quantile,
    relative_angle,
    signed_angle,
    tube_classify,
    tube_threshold,
)
from .points import PointSet, Region, SectorBand, expected_count_in_region, sample_binomial, sample_conditional, sample_poisson
from .build import Graph, build_bucketed, build_naive, is_adjacent
from .analysis import (
    ComponentLabeling,
    DistanceSample,
    bfs_distances,
    clustering_coefficient,
    connected_components,
    degree_histogram,
    sample_pair_distances,
    tail_exponent_estimate,
)
from .probes import (
    CoreReport,
    ExplodingPath,
    Umbrella,
    distance_to_core,
    extract_core,
    find_exploding_path,
    layer_max_type_trace,
    simultaneous_breadth_exploration,
    verify_spanning_overlap,
)

__version__ = "0.1.0"
