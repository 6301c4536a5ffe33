"""Minimal AgentSpeak-style BDI interpreter, independent of any backend."""

from .agent import *  # noqa: F401,F403
from .agent import __all__ as _agent_all
from .interpreter import ActionError, act, applicable_plan, deliberate, run_cycle, sense
from .terms import *  # noqa: F401,F403
from .terms import __all__ as _terms_all

__all__ = [*_agent_all, *_terms_all,
           "ActionError", "act", "applicable_plan", "deliberate", "run_cycle", "sense"]
