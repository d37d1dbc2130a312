"""FBG smart-insole acquisition chain.

The compiled extension carries the implementation; this package just
re-exports it.
"""

from ._fbgsole import *  # noqa: F401,F403
from ._fbgsole import __doc__  # noqa: F401
