__all__ = ["exceptions", "misc", "wrappers", "data"]

from .exceptions import *
from .misc import *
from .wrappers import *
from .data import *
