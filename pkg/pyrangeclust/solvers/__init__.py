__all__ = ["cost", "center", "primitives", "search", "oracle", "dispatch"]

from .cost import *
from .center import *
from .primitives import *
from .search import *
from .oracle import *
from .dispatch import *
