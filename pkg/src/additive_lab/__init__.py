"""Local statistics of additive arithmetic functions over sieved integer ranges."""

from .additive import AdditiveFunction, Mode, builtin, evaluate
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["AdditiveFunction", "Mode", "builtin", "evaluate", "BACKEND", "__version__"]
