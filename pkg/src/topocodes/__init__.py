"""Surface and color codes from tilings of closed surfaces."""

from .color import (ColoringRefusal, FaceColoring, color_cover_faces, double_cover,
                    is_three_colorable, shrunk_lattice)
from .css import CssCode, color_code, css_validate, surface_code
from .distance import (DistanceReport, color_distance, color_distance_bounds, color_distance_exact,
                       combinatorial_systole, css_distance_exact, planarity_certificate,
                       refinement_inequality_check, surface_distance)
from .errors import TopoError
from .gf2 import BitMatrix, echelon, kernel_basis, rank
from .hyperbolic import (TrianglePresentation, catalog_lookup, cayley_tiling, coset_enumerate,
                         infinite_ball, verify_injectivity_radius)
from .tiling import CombinatorialMap, dual_map, load_map, save_map, validate_map

__version__ = "0.1.0"
