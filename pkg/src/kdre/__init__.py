"""Multivariate direct kernel density-ratio estimation."""

from kdre.cdf import ConditionalCdfModel, delta_projection, ecdf
from kdre.core import BandwidthSpec, GaussianSpec, GridSpec, RatioField, SampleSet, lattice_points
from kdre.estimators import (
    DirectKdre,
    IndirectKdre,
    estimate_direct,
    estimate_indirect,
    evaluate_field,
    fit_direct,
    kde,
)
from kdre.kernels import KernelSpec
from kdre.oracle import GaussianPair, gaussian_conditional_cdf, mc_limit_integral, mvn_pdf, true_ratio
from kdre.synth import SeededStream, sample_mvn

__all__ = [
    "BandwidthSpec",
    "ConditionalCdfModel",
    "DirectKdre",
    "GaussianPair",
    "GaussianSpec",
    "GridSpec",
    "IndirectKdre",
    "KernelSpec",
    "RatioField",
    "SampleSet",
    "SeededStream",
    "delta_projection",
    "ecdf",
    "estimate_direct",
    "estimate_indirect",
    "evaluate_field",
    "fit_direct",
    "gaussian_conditional_cdf",
    "kde",
    "lattice_points",
    "mc_limit_integral",
    "mvn_pdf",
    "sample_mvn",
    "true_ratio",
]
