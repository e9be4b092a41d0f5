"""Special Lagrangian multi-sections with Calabi symmetry.

Closed-form construction data, level-set tracing, central charges and
stability walls, boundary deformation flows, and split-bundle boundary
analysis, all backed by the C++ core.
"""

from ._core import *  # noqa: F401,F403

__version__ = "0.1.0"
