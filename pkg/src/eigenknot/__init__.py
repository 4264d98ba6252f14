"""eigenknot: inverse localization of Helmholtz fields into high-degree
spherical harmonics and S^3 Dirac eigenfields, with extraction and
topological certification of the nodal curves of the spinor components."""

__version__ = "0.1.0"

from . import harmonics, helmholtz, nodal, specialfn, sphere, spinor3, torus
from .harmonics import UltrasphericalSum, multi_synthesize, synthesize
from .helmholtz import (
    BesselSum,
    HerglotzDensity,
    design_bessel_sum,
    eval_bessel_sum,
    eval_herglotz,
    herglotz_discretize,
    hopf_link_design,
)
from .nodal import NodalCurve, extract_nodal, hausdorff_dist, linking_number
from .sphere import Chart, chart_to_sphere, geodesic_dist, random_chart, sphere_to_chart
from .spinor3 import (
    SpinorField3,
    adapted_chart,
    dirac_apply,
    dirac_project,
    dirac_residual,
)
from .torus import LatticeDirectionSet, cap_discrepancy, lattice_directions, torus_localize

__all__ = [
    "__version__",
    "specialfn",
    "sphere",
    "helmholtz",
    "harmonics",
    "spinor3",
    "nodal",
    "torus",
    "BesselSum",
    "HerglotzDensity",
    "UltrasphericalSum",
    "SpinorField3",
    "NodalCurve",
    "LatticeDirectionSet",
    "Chart",
    "chart_to_sphere",
    "sphere_to_chart",
    "geodesic_dist",
    "random_chart",
    "eval_herglotz",
    "eval_bessel_sum",
    "herglotz_discretize",
    "design_bessel_sum",
    "hopf_link_design",
    "synthesize",
    "multi_synthesize",
    "adapted_chart",
    "dirac_apply",
    "dirac_project",
    "dirac_residual",
    "extract_nodal",
    "linking_number",
    "hausdorff_dist",
    "lattice_directions",
    "cap_discrepancy",
    "torus_localize",
]
