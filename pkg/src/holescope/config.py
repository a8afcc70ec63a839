"""Central table of numeric defaults.

Every tunable used by the library and the CLI is read from ``DEFAULTS`` so
that a run can be reproduced from its manifest alone.
"""

DEFAULTS = {
    # exact arithmetic
    "bit_budget": 4096,          # max bits of numerator/denominator in exact mode
    "eps_tol": 1e-12,            # float-mode point equality
    # survival
    "component_cap": 10**7,      # max components of an IntervalSet pullback
    # orbits
    "node_cap": 2_000_000,       # max itinerary tree nodes per enumeration
    # rasters
    "resolution": 512,
    "horizon": 1000,
    "raster_max_components": 48,  # per-cell forward-image component budget
    "raster_history": 4,          # look-back used to certify survival early
    "probe_radius": 8,
    "exact_anchor_horizon": 10_000,
    # tent family
    "tent_periodic_tol": 1e-10,
    "tent_rect_eps": 0.02,
    "tent_nmax": 10_000,
    # cli
    "seed": 0,
}


def get(key, override=None):
    return DEFAULTS[key] if override is None else override
