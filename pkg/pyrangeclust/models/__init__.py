__all__ = ["requests", "responses"]

from .requests import *
from .responses import *
