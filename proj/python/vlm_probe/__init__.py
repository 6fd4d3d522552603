"""Python access to the vlm-probe analysis core.

Everything heavy lives in the compiled ``_core`` module; this package just
re-exports it under friendlier names.
"""

from ._core import (
    Resources,
    ResourceNotFound,
    VlmProbeError,
    __version__,
    adjust_p_values,
    analyze,
    box_summary,
    build_feature_matrix,
    linfit_band,
    pearson,
    read_scores,
    run_cli,
    student_t_critical,
    student_t_sf2,
    validate_scores,
    welch_ttest,
)


def main(argv=None):
    import sys

    return run_cli(list(sys.argv[1:] if argv is None else argv))


__all__ = [
    "Resources",
    "ResourceNotFound",
    "VlmProbeError",
    "__version__",
    "adjust_p_values",
    "analyze",
    "box_summary",
    "build_feature_matrix",
    "linfit_band",
    "main",
    "pearson",
    "read_scores",
    "run_cli",
    "student_t_critical",
    "student_t_sf2",
    "validate_scores",
    "welch_ttest",
]
