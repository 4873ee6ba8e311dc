"""
Exact certificates for the recursive (k+ε) strategy and the ladder of achievable targets.
"""

from flowgame.certificates.cert import (
    BASE_CERT,
    Ladder,
    StrategyCert,
    build_cert,
    cert_from_document,
    cert_hash,
    cert_to_document,
    ladder,
    ladder_from_document,
    monotone_height,
    validate_cert,
)
from flowgame.certificates.formulas import (
    d_of_u,
    integral_expansion,
    integral_I,
    integrand,
    quadrature_I,
    riemann_S,
    riemann_S_float,
    subtree_quota_a,
    threshold_d,
    threshold_floor,
)
from flowgame.certificates.search import choose_eps, choose_n

__all__ = [
    "BASE_CERT",
    "Ladder",
    "StrategyCert",
    "build_cert",
    "cert_from_document",
    "cert_hash",
    "cert_to_document",
    "ladder",
    "ladder_from_document",
    "monotone_height",
    "validate_cert",
    "d_of_u",
    "integral_expansion",
    "integral_I",
    "integrand",
    "quadrature_I",
    "riemann_S",
    "riemann_S_float",
    "subtree_quota_a",
    "threshold_d",
    "threshold_floor",
    "choose_eps",
    "choose_n",
]
