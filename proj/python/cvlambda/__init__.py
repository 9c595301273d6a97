"""Continuous-variable entanglement in a coherently prepared Lambda medium."""

from ._core import *  # noqa: F401,F403
from ._core import __version__, run_scenario  # noqa: F401
