__all__ = ["main"]

from .utils import *
from .geometry import *
from .models import *
from .solvers import *
from .index import *
from .engines import *
from .validation import *
