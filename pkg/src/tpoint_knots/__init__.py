"""Lorenz T-points, heteroclinic knots, and the figure-eight template.

Numerically locates the T-points of the Lorenz equations, classifies the
invariant heteroclinic knot through its Alexander polynomial, and certifies
at desk scale that every knot carried by the figure-eight template is a
positive, fibered, prime braid closure.
"""

from .dynamics import (ParamSet, Trajectory, equilibria, eigen_split,
                       integrate, jacobian, sigma_image, vector_field,
                       wing_centers)
from .heteroclinic import (ClosedCurve3, GapResult, TPointResult, find_tpoint,
                           gap, stable_separatrix_wing, trace_heteroclinic_knot,
                           unstable_separatrix)
from .knots import (GaussCode, PlanarDiagram, alexander, classify_curve,
                    gauss_code, identify, is_positive, is_prime_diagram,
                    project, seifert_circles, seifert_genus)
from .braids import (BraidWord, burau_alexander, closure_components,
                     closure_diagram, genus_positive, parse_braid, permutation)
from .templates import (Band, KnotReport, TemplateSpec, cat_map_count,
                        enumerate_words, figure8_template, knot_report,
                        lorenz_template, orientable, restrict, word_to_braid)
from .plmodel import (LAMBDA, PLMap, Q3, cone_check, figure8_plmap, itinerary,
                      lorenz_plmap, model_template_correspondence,
                      periodic_point, step)
from .laurent import LaurentPoly

__version__ = "0.1.0"
