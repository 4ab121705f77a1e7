from .configs import *  # noqa: F401,F403
