from .ac import cmd_ac
from .compare import cmd_compare
from .simulate import cmd_simulate
from .singular import cmd_singular

__all__ = ["cmd_ac", "cmd_compare", "cmd_simulate", "cmd_singular"]
