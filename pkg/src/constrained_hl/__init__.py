"""Constrained Hastings-Levitov HL(0) growth in the upper half-plane.

Particles are slits of half-plane capacity ``1/(2n)`` attached uniformly on
the mapped-out interval ``[-L_k, R_k]``. The package provides the exact
endpoint dynamics, the full conformal maps, cluster geometry, Loewner-Kufarev
comparison flows and the exterior-disc variant.
"""

from .conformal import (compose_forward, compose_inverse, endpoint_update, push_bounds,
                        slit_forward, slit_inverse, sqrt_upper)
from .disc import (DiscResult, disc_run, halfplane_to_disc, mobius_to_halfplane,
                   tau_alpha_prediction)
from .ensemble import EnsembleSummary, ensemble
from .geometry import (EnvelopePolyline, GeometrySummary, diameter, envelope, hcap_estimate,
                       height_bound, max_height)
from .growth import (DyadicLedger, GrowthState, StoppingReport, Trace, dyadic_index,
                     endpoints_at_steps, first_stopping_time, new_state, ode_prediction,
                     replay, run, scale_push_stats, step, stopping_times, theorem_ratio)
from .io import RunConfig
from .loewner import (DrivingMeasure, deterministic_map, discrepancy_report, driver_drift,
                      solve_characteristic)
from .svg import emit_svg

__version__ = "0.1.0"
