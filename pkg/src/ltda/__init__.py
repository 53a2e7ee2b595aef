"""Labeled Gromov-Hausdorff distances and generalized persistence landscapes."""

__version__ = "0.1.0"

from .metric_space import (LabeledMetricSpace, ChromaticInput, from_point_cloud, from_distance_matrix, validate,
                           diam_Q, hausdorff, restrict, permute_labels, stabilize, chromatic_to_labeled)
from .gh import (GHResult, MapPair, GHBudgetExceeded, distortion_maps, codistortion, gh_k_exact, gh_plain,
                 gh_perm_exact, gh_stab_exact, gh_lower_bound_diam)
from .poset import (WeightedPoset, Discretization, PosetPath, power_poset, chain_poset, weight_constant,
                    weight_diameter, weight_hausdorff_fraction, poset_distance, enumerate_paths)
from .filtration import FilteredComplex, GapAnnotation, vietoris_rips, path_complex
from .persistence import (Barcode, Landscape1D, ExplicitModule, barcode, extend_bars, landscape_1d, evaluate_1d,
                          oracle_generalized_landscape)
from .landscape import (GeneralizedLandscape, SampledLandscape, generalized_landscape, interpolate, restrict_to,
                        image_landscape, sup_distance, mse_distance)
