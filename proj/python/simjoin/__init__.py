# Copyright 2026 The simjoin Authors.
# SPDX-License-Identifier: Apache-2.0

"""Dynamic similarity joins with enumeration."""

from ._simjoin import (
    Error,
    GridJoin,
    L1Join,
    LinfJoin,
    LshJoin,
    Metric,
    Side,
    TriangleJoin,
    WspdJoin,
    distance,
    generate_workload,
    oracle_join,
    run_workload,
)

__all__ = [
    "Error",
    "GridJoin",
    "L1Join",
    "LinfJoin",
    "LshJoin",
    "Metric",
    "Side",
    "TriangleJoin",
    "WspdJoin",
    "distance",
    "generate_workload",
    "oracle_join",
    "run_workload",
]
