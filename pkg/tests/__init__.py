__all__ = [
    "test_data_models", "test_utils_data", "test_geometry", "test_quadtree",
    "test_range_structures", "test_solvers", "test_median_means", "test_kcenter",
    "test_extent", "test_service", "test_cli"
]
