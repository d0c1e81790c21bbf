"""Thermal-state numerics on spin lattices.

The heavy lifting lives in the compiled extension ``thermalab._core``; this
package re-exports its public surface.
"""

from thermalab._core import *  # noqa: F401,F403
from thermalab._core import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
