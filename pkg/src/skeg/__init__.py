"""Approximate smallest k-enclosing geodesic discs in simple polygons."""
from .algorithms import (
    Disc,
    MergeResult,
    SkegResult,
    di_algo,
    dispatch_choice,
    interval_depths,
    kth_nn_distance,
    main_algo,
    merge_algo,
    planar_2approx,
    rs_algo,
    rs_sample_size,
)
from .decomposition import DecompNode, DecompTree, SiteAssignment, build_decomp_tree, locate_sites
from .errors import (
    DegenerateVertex,
    DuplicateSites,
    EmptyGrid,
    KTooLarge,
    NoBalancedDiagonal,
    PointOutsidePolygon,
    PolygonError,
    SelfIntersecting,
    SiteOutsidePolygon,
    SkegError,
    TooFewVertices,
)
from .geodesic import (
    ChordInterval,
    DistanceFunction,
    Funnel,
    GeodesicPath,
    HyperbolicPiece,
    build_funnel,
    chord_disc_intersection,
    distance_function,
    geodesic_distance,
    path_midpoint,
    project_onto_chord,
    shortest_path,
)
from .geometry import (
    Chord,
    Point,
    Polygon,
    Triangulation,
    generate_star_polygon,
    is_convex,
    simplify_polygon,
    triangulate,
    validate_polygon,
)
from .oracle import (
    OptBracket,
    VisibilityOracle,
    brute_depths,
    dijkstra_distance,
    grid_oracle,
    grid_oracle_auto,
    pair_candidate_oracle,
    random_simple_polygon,
    random_sites,
)

__version__ = "0.1.0"
