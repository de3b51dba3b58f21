__all__ = ["quadtree", "persistent", "range_tree", "projections", "coreset_tree", "service"]

from .quadtree import *
from .persistent import *
from .range_tree import *
from .projections import *
from .coreset_tree import *
from .service import *
