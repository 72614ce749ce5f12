"""Polytope calculus over shared normals, and brick regions in the plane."""

from .bricks import (BrickError, brick_area, brick_minkowski_sum, bm_split_trace, bm_verify,
                     homothetic_bricks, random_brick_region, validate_region)
from .polytope import (AType, GeometryError, PolytopeFamily, af_atlas, box_normals, box_offsets,
                       facet_balance, facet_support, family_atype, mixed_volume,
                       mixed_volume_polarization, mv_identities, mv_matrix, perturb_family,
                       polygon_mixed_area, random_family, regular_polygon_normals, verify_af, volume)
