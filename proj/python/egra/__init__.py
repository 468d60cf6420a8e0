# Copyright 2026  EGRA Toolkit Authors
# Licensed under the Apache License, Version 2.0

"""Consensus labeling, a fine-tuning harness and evaluation tools for
early-grade reading assessment recordings."""

from ._core import *  # noqa: F401,F403
from ._core import EgraError, InvalidArgumentError, NotFoundError  # noqa: F401

__version__ = "0.1.0"
