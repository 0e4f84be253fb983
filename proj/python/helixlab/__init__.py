"""Frenet apparatus, helix classification and curve synthesis on Riemannian 3-manifolds."""

from ._core import (
    Curve,
    Expr,
    FrenetSample,
    HelixlabError,
    MetricField,
    ScalarField,
    __version__,
    check_constant_precession,
    classify,
    example_2_1,
    frenet,
    frenet_series,
    integrate_profile,
    precession_fixture,
    run_cli,
    verify,
)

__all__ = [
    "Curve",
    "Expr",
    "FrenetSample",
    "HelixlabError",
    "MetricField",
    "ScalarField",
    "check_constant_precession",
    "classify",
    "example_2_1",
    "frenet",
    "frenet_series",
    "integrate_profile",
    "precession_fixture",
    "run_cli",
    "verify",
]
