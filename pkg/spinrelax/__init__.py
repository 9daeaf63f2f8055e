from .utils import *
from .spectral import *
from .rates import *
from .lso import *
from .dynamics import *
from .oracle import *
from .validity import *
from .scenario import *

__version__ = '0.1.0'
