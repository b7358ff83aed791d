# handlers/__init__.py
# Реестр команд CLI: имя -> функция RunConfig -> ConvergenceReport.

from handlers.bounds import cmd_bounds
from handlers.compare import cmd_compare
from handlers.converge import cmd_converge
from handlers.moments import cmd_moments
from handlers.statistical import cmd_statistical


def get_handlers():
    return {
        "moments": cmd_moments,
        "converge": cmd_converge,
        "bounds": cmd_bounds,
        "statistical": cmd_statistical,
        "compare": cmd_compare,
    }
