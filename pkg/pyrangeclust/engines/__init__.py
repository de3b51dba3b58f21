__all__ = ["access", "median_means", "kcenter", "extent", "service"]

from .access import *
from .median_means import *
from .kcenter import *
from .extent import *
from .service import *
