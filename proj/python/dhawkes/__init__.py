"""Branching point-process models for online discussion trees."""

from ._core import (
    Cluster,
    ClusterSet,
    DataError,
    HarmonicSpec,
    ModelParams,
    PosteriorSamples,
    cluster_loglik,
    clusters_from_csv,
    crps_hat,
    dataset_loglik,
    fit,
    homogeneous_cluster_loglik,
    ks_statistic,
    load_clusters,
    log_evidence,
    lpd,
    periodogram,
    simulate,
    transmission_proportion,
)

__all__ = [
    "Cluster",
    "ClusterSet",
    "DataError",
    "HarmonicSpec",
    "ModelParams",
    "PosteriorSamples",
    "cluster_loglik",
    "clusters_from_csv",
    "crps_hat",
    "dataset_loglik",
    "fit",
    "homogeneous_cluster_loglik",
    "ks_statistic",
    "load_clusters",
    "log_evidence",
    "lpd",
    "periodogram",
    "simulate",
    "transmission_proportion",
]
