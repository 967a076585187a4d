"""Quadratic interpolation models, simplex derivatives and subspace conversions."""

from ._subdfo import (
    ModelResult,
    SampleSet,
    SubdfoError,
    SubspaceFrame,
    compare_models,
    detect_subspace,
    fit_dqi,
    fit_lfu,
    fit_mfn,
    fit_mn,
    fit_qgsd,
    gsg,
    gsh,
    hat_sampleset,
    lift_lfu,
    lift_mfn,
    lift_mn,
    lift_qgsd,
    restrict_hessian,
    restrict_model,
    run_suite,
    smat,
    svec,
)

__all__ = [
    "ModelResult",
    "SampleSet",
    "SubdfoError",
    "SubspaceFrame",
    "compare_models",
    "detect_subspace",
    "fit_dqi",
    "fit_lfu",
    "fit_mfn",
    "fit_mn",
    "fit_qgsd",
    "gsg",
    "gsh",
    "hat_sampleset",
    "lift_lfu",
    "lift_mfn",
    "lift_mn",
    "lift_qgsd",
    "restrict_hessian",
    "restrict_model",
    "run_suite",
    "smat",
    "svec",
]
