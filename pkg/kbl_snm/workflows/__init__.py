"""kbl_snm workflows"""

from .syntax import *
from .deduction import *
from .canonical import *
from .checker import *
from .cost import *
from .translate import *
from .generate import *
from .bench import *
