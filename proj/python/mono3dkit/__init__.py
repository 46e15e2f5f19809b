"""Monocular 3D detection toolkit.

Geometry-driven guidance-cuboid generation from 2D detections, visible-surface
perspective warping, interval-classification refinement, and KITTI-style 3D
detection metrics. All heavy lifting lives in the C++ extension module.
"""

from ._mono3dkit import *  # noqa: F401,F403
from ._mono3dkit import __doc__ as _core_doc

__version__ = "0.1.0"
