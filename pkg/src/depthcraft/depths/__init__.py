"""Depth engines: seven global notions, a localized variant, class potentials."""

from .api import CloudStats, depth, depth_space, eval_depth, freeze_cloud
from .halfspace import depth_halfspace_approx, depth_halfspace_exact
from .mahalanobis import depth_mahalanobis
from .projection import depth_projection, uniform_directions
from .simplicial import depth_simplicial, depth_simplicial_volume
from .spatial import depth_spatial, depth_spatial_local, potential
from .spec import NOTIONS, DepthSpace, DepthSpec
from .zonoid import depth_zonoid, in_convex_hull

__all__ = [
    "CloudStats",
    "DepthSpace",
    "DepthSpec",
    "NOTIONS",
    "depth",
    "depth_halfspace_approx",
    "depth_halfspace_exact",
    "depth_mahalanobis",
    "depth_projection",
    "depth_simplicial",
    "depth_simplicial_volume",
    "depth_space",
    "depth_spatial",
    "depth_spatial_local",
    "depth_zonoid",
    "eval_depth",
    "freeze_cloud",
    "in_convex_hull",
    "potential",
    "uniform_directions",
]
