"""Knowledge-based logic model checking over social network models."""

from os.path import dirname, join, abspath


__version__ = "0.1.0"

DATADIR = join(dirname(abspath(__file__)), "data")

from .errors import *
from .workflows import *
from .kripke import *
from .check_config import *
from .snm import *
from .utils import *
