"""Two-stage equation-prediction harness for algebra word problems."""

__version__ = "0.1.0"

from .expr import Equation, EquationSet, format_canonical
from .parser import parse_equation, parse_equation_set
from .classify import SystemClass, classify
from .solve import check_solution, solve_system
from .equivalence import equivalent
from .codegen import transpile
from .consensus import AnswerVector, cluster, vote
from .gateway import LiveGateway, MockGateway, RecordingGateway, ReplayGateway
from .gateway_types import Completion, SamplingConfig
from .matching import match_answers
from .pipeline import StrategyConfig, Trace, run_strategy
from .records import ProblemRecord, generate_synthetic, load_problems
from .evaluate import EvalConfig, Report, evaluate

__all__ = [
    "AnswerVector",
    "Completion",
    "Equation",
    "EquationSet",
    "EvalConfig",
    "LiveGateway",
    "MockGateway",
    "ProblemRecord",
    "RecordingGateway",
    "ReplayGateway",
    "Report",
    "SamplingConfig",
    "StrategyConfig",
    "SystemClass",
    "Trace",
    "check_solution",
    "classify",
    "cluster",
    "equivalent",
    "evaluate",
    "format_canonical",
    "generate_synthetic",
    "load_problems",
    "match_answers",
    "parse_equation",
    "parse_equation_set",
    "run_strategy",
    "solve_system",
    "transpile",
    "vote",
    "__version__",
]
