"""Global dynamics of the Ricci flow on two families of flag manifolds with two
isotropy summands, studied through the Poincaré compactification."""

from .algebra import Poly2
from .analysis import (
    Classification,
    Equilibrium,
    RayDirection,
    classify_equilibrium,
    infinity_equilibria,
    invariant_rays,
    named_equilibria,
)
from .compactify import (
    Chart,
    VectorField,
    central_projection,
    chart_coords,
    chart_to_sphere,
    chart_transition,
    compactified_field,
    disc_projection,
)
from .flow import (
    IntegrationConfig,
    Region,
    basin_sweep,
    classify_basin,
    integrate_compactified,
    integrate_raw,
    omega_limit,
    orbit_deviation,
    sector_of,
)
from .models import (
    Family,
    FlagModel,
    Metric,
    einstein_defect,
    fibration_info,
    make_model,
    polynomial_field,
    raw_rhs,
    ricci_components,
)

__version__ = "0.1.0"
