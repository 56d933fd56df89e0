"""boxlab: box-density experiments for 3-uniform hypergraphs.

The core objects are palettes of colour patterns, the hypergraphs they
induce from random edge colourings, exact searches for palette colourings
of cliques, trees of indices with their subsystems, and reduced
hypergraphs together with fortresses and the randomized builder.
"""

from .builder import *  # noqa: F401,F403
from .constants import *  # noqa: F401,F403
from .construct import *  # noqa: F401,F403
from .errors import BoxlabError, DimensionError, FormatError, PreconditionError, StructuralError
from .hypercore import *  # noqa: F401,F403
from .palette import *  # noqa: F401,F403
from .ramsey import *  # noqa: F401,F403
from .reduced import *  # noqa: F401,F403
from .systems import *  # noqa: F401,F403

__version__ = "0.1.0"
