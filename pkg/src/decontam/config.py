"""Numerical tolerances shared by the exact and finite-sample engines."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # representation noise: tiny negatives are clamped to zero at construction
    clamp: float = 1e-12
    # decision threshold for equality, support membership and sums
    eq: float = 1e-9
    # LP pivot / reduced-cost threshold
    pivot: float = 1e-12
    # condition-number ceiling used when deciding invertibility
    max_cond: float = 1e12


TOL = Tolerances()

# Deviation radii for the estimators. The uniform VC bound is far larger than
# the actual deviation at moderate n, so by default it is shrunk by a constant
# factor (rates are unaffected) and each signed mixture gets the l1-weighted
# radius of its coefficients. EPS_SCALE = 1 with RADIUS = "shared" reproduces
# the unscaled bound shared by every estimator.
EPS_SCALE = 0.04
RADIUS = "l1"
