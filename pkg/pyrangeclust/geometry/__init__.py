__all__ = ["points", "cells"]

from .points import *
from .cells import *
