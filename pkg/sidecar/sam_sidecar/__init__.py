"""HTTP sidecar serving object masks for (image, text prompt, boxes) requests.

Two modes. ``model`` runs a text-prompted detector plus a promptable
mask model (Grounding DINO + SAM); ``stub`` serves canned fixtures and
box-interior masks so everything downstream can be tested without
weights. Both speak the same one-endpoint protocol: POST /segment.
"""

from .config import SidecarConfig
from .service import create_app

__all__ = ["SidecarConfig", "create_app"]
