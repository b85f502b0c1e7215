"""
conftest.py - Shared fixtures: bundled domains, grounded and compiled once per session.
"""

from __future__ import annotations

import functools

import pytest

from ccp import bundled_domain
from ccp.compiler import build_action_theory, compile_domain
from ccp.grounder import ground


@functools.lru_cache(maxsize=None)
def grounded(name: str):
    return ground(bundled_domain(name))


@functools.lru_cache(maxsize=None)
def compiled(name: str):
    return compile_domain(grounded(name))


def compiled_action(name: str, action: str):
    gt = grounded(name)
    a = gt.action(action)
    ca = next(c for c in compiled(name) if c.action == a)
    return gt, build_action_theory(gt, a), ca


@pytest.fixture
def blocks3():
    return grounded("blocks3")
