"""lorentzlab checks synthetic Lorentzian geometry on finite samples."""

from .Catalog import Catalog  # noqa: F401
from .Config import Budget, Tolerances  # noqa: F401
from .Curves import CausalCurve  # noqa: F401
from .Exemplars import ExemplarSpec, build_exemplar, extension_pair, sprinkle  # noqa: F401
from .Extension import ExtensionCandidate  # noqa: F401
from .ExtReal import ExtReal  # noqa: F401
from .Models import ModelSpace, TriangleSides  # noqa: F401
from .Schema import load_space, save_space  # noqa: F401
from .Space import SpaceDescription  # noqa: F401
