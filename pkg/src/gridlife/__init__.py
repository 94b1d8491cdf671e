"""Microgrid scheduling with transformer insulation life as a first-class cost.

The package splits the problem the way the economics split: a mixed-integer
master schedules units, storage, adjustable loads, and grid exchange against
energy prices, while a thermal subproblem prices the insulation life the
exchange profile burns off the distribution transformer. Optimality cuts
carry the thermal sensitivities back into the master until the two agree.
"""

__version__ = "0.1.0"

from . import benders, dataio, milp, scheduling, thermal  # noqa: F401

__all__ = ["thermal", "milp", "scheduling", "benders", "dataio", "__version__"]
