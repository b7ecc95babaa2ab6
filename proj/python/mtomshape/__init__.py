"""Rate-adaptive geometric constellation shaping with many-to-one labeling.

Thin wrapper over the C++ core: constellation construction, the surrogate
WDM channel, Monte Carlo AIR estimation, the shaping optimizer, rate
planning, the Maxwell-Boltzmann baseline and CMA-ES link calibration.
"""

from mtomshape._core import *  # noqa: F401,F403
