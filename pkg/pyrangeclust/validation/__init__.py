__all__ = ["oracles", "suites"]

from .oracles import *
from .suites import *
