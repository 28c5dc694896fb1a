"""Planning, execution and the qtp command line"""

from .planner import ExecutionPlan, validate_and_plan
from .runner import OutputRecord, RunManifest, run
from .cli import main

__all__ = [
    'ExecutionPlan',
    'validate_and_plan',
    'OutputRecord',
    'RunManifest',
    'run',
    'main',
]
