"""cDMN: decision tables with quantification and constraints, compiled to
typed first-order logic and solved over finite domains."""

from .engine import (GroundProblem, SolveConfig, SolveResult, ground,
                     oracle_enumerate, solve, solve_models, solve_optimize)
from .errors import CdmnError
from .fo import NULL, Structure, Theory
from .glossary import Vocabulary, build_vocabulary
from .grid import TableBlock, load_grid, read_workbook, segment_blocks
from .translate import ALL, CompiledModel, Task, compile_model, compile_workbook

__all__ = [
    "ALL", "NULL", "CdmnError", "CompiledModel", "GroundProblem", "SolveConfig",
    "SolveResult", "Structure", "TableBlock", "Task", "Theory", "Vocabulary",
    "build_vocabulary", "compile_model", "compile_workbook", "ground", "load_grid",
    "oracle_enumerate", "read_workbook", "segment_blocks", "solve", "solve_models",
    "solve_optimize",
]
