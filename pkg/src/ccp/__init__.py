"""
ccp - Compile causal action descriptions into successor state axioms and
STRIPS-like action descriptions.
"""

from __future__ import annotations

from importlib import resources

from .compiler import CompileOptions, compile_action, compile_domain
from .grounder import ground
from .syntax import parse_description, validate_description

__version__ = "0.1.0"


def bundled_domain(name: str) -> str:
    """Source text of a bundled fixture, e.g. ``bundled_domain("blocks3")``."""
    return resources.files(__package__).joinpath("domains", f"{name}.adl").read_text()


__all__ = ["BUNDLED", "CompileOptions", "bundled_domain", "compile_action", "compile_domain",
           "ground", "parse_description", "validate_description"]

BUNDLED = ("blocks3", "blocks4ops", "blocks4ops_modified", "monkey", "cyclic", "explode")
