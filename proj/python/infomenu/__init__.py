"""Revenue-maximizing menus of information experiments."""

from ._infomenu import *  # noqa: F401,F403
from ._infomenu import __version__  # noqa: F401
