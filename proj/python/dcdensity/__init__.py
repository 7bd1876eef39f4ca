"""Divide-and-conquer Bayesian density estimation.

Thin wrapper over the compiled extension module. Supports both the installed
layout (extension inside the package) and the build-tree layout (extension on
PYTHONPATH next to the package sources).
"""

try:
    from ._dcdensity import *  # noqa: F401,F403
    from ._dcdensity import __version__  # noqa: F401
except ImportError:  # build tree: extension lives outside the package
    from _dcdensity import *  # noqa: F401,F403
    from _dcdensity import __version__  # noqa: F401
