"""Shadow-problem toolkit: do balls centred on a sphere block every line or ray through its centre?"""

__version__ = "0.1.0"

from .errors import UmbraError  # noqa: E402
from .geom import (  # noqa: E402
    Ball,
    Configuration,
    ConvexBody,
    Mode,
    SphericalCap,
    Topology,
    line_hits_ball,
    occlusion_caps,
    ray_hits_ball,
    ray_hits_polytope,
    validate_configuration,
)
from .coverage import (  # noqa: E402
    AngularInterval,
    CoverageVerdict,
    Status,
    cover_s1,
    cover_s2,
    cover_sample,
    shadow_verdict,
)

__all__ = [
    "AngularInterval",
    "Ball",
    "Configuration",
    "ConvexBody",
    "CoverageVerdict",
    "Mode",
    "SphericalCap",
    "Status",
    "Topology",
    "UmbraError",
    "cover_s1",
    "cover_s2",
    "cover_sample",
    "line_hits_ball",
    "occlusion_caps",
    "ray_hits_ball",
    "ray_hits_polytope",
    "shadow_verdict",
    "validate_configuration",
]
