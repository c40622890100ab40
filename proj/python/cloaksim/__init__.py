from ._cloaksim import *  # noqa: F401,F403
from ._cloaksim import __version__
