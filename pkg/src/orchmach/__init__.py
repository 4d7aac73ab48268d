"""Orchestrated Turing machine breeds: fast simulator, analysis toolkit,
experiment harness."""

from .backend import BACKEND_NAME
from .engine import (Breed, PathPolicy, PolicyError, PreferPolicy,
                     RandomPolicy, ReplayMismatchError, RunTrace,
                     ScriptedPolicy, om1_run, om2_run, om3_run,
                     reference_om1_run, reference_om2_run, replay)
from .machines import (BLANK, LEFT, ONE, RIGHT, STAY, ZERO, RunResult,
                       TuringMachine, decode_rule_index, encode_rule_index,
                       parse_rule_index_text, tm_run)

__version__ = "0.1.0"
