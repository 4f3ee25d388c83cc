"""Minimal-horizon estimates across the model gallery.

For each model the quantified-test profiles give a lower estimate of the
minimal null-control horizon; where a closed form is known the two are
printed side by side.  The pointwise model at x0 = 1/2 shows the
unobservable case: a vanishing eigenfunction value forces +inf.
"""

import math

from nullcontrol import (
    PiecewiseConstant,
    academic_lf,
    cascade_boundary_q,
    pointwise_heat,
    tstar_estimate,
    two_diffusion_boundary,
)

GALLERY = [
    ("pointwise heat, x0 = sqrt(2)-1", pointwise_heat(math.sqrt(2.0) - 1.0), 120),
    ("pointwise heat, x0 = 1/2 (unobservable)", pointwise_heat(0.5), 12),
    ("two-branch academic, tau = 0.2", academic_lf(0.2), 24),
    ("boundary cascade, q = 1 on (0.2, 0.8)", cascade_boundary_q(
        PiecewiseConstant(((0.2, 0.8, 1.0),))), 40),
    ("two diffusions, d = 2 (boundary)", two_diffusion_boundary(2.0), 30),
]

for label, model, K in GALLERY:
    est = tstar_estimate(model, K)
    parts = ", ".join(f"{name} {tail:.4f}" for name, tail in est.components.items())
    tmin = model.tmin_profile(K)
    closed = f"   closed-form tail {tmin.tail_estimate:.4f}" if tmin is not None else ""
    print(f"{label}\n  lower estimate {est.lower:.4f}  ({parts}){closed}\n")
