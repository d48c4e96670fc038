"""Dyadic-scale planar geometry laboratory.

Separated point sets with measured regularity constants, Katz-Tao
decompositions, block-uniform measures, point-line duality, incidence
counting, radial projection scans, seeded generators, and the canned
experiment suites. All operations are deterministic given their seeds.
"""

from ._frostlab import (
    ArcSet,
    DyadicMeasure,
    Line,
    Point2,
    PointSet,
    Tube,
    UniformityProfile,
    __version__,
    arc_content,
    cantor_product,
    check_duality_incidence,
    check_fu_ren,
    check_uniform,
    content_estimate,
    count_incidences,
    covering_number,
    dualize_line,
    dualize_point,
    estimate_dimension,
    exceptional_scan,
    extract_regular_subset,
    from_angle_form,
    furstenberg_config,
    grid_set,
    heavy_directions,
    katz_tao_decompose,
    min_block_size,
    multiplicity_buckets,
    radial_project,
    random_delta_set,
    run_experiment,
    seeded_measure,
    set_on_line,
    stable_scale_search,
    to_angle_form,
    uniformize,
    verify_delta_set,
    verify_katz_tao,
)

__all__ = [
    "ArcSet",
    "DyadicMeasure",
    "Line",
    "Point2",
    "PointSet",
    "Tube",
    "UniformityProfile",
    "__version__",
    "arc_content",
    "cantor_product",
    "check_duality_incidence",
    "check_fu_ren",
    "check_uniform",
    "content_estimate",
    "count_incidences",
    "covering_number",
    "dualize_line",
    "dualize_point",
    "estimate_dimension",
    "exceptional_scan",
    "extract_regular_subset",
    "from_angle_form",
    "furstenberg_config",
    "grid_set",
    "heavy_directions",
    "katz_tao_decompose",
    "min_block_size",
    "multiplicity_buckets",
    "radial_project",
    "random_delta_set",
    "run_experiment",
    "seeded_measure",
    "set_on_line",
    "stable_scale_search",
    "to_angle_form",
    "uniformize",
    "verify_delta_set",
    "verify_katz_tao",
]
