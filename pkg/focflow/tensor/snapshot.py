"""
Binary metric snapshots.

Layout (all little-endian): the 5-byte magic ``FOCF1``; n, N1, N2 as int64;
L1, L2 as float64; then the g11, g12 and g22 planes as row-major float64.
"""

import logging
from pathlib import Path

import numpy as np

from ..constants import SNAPSHOT_MAGIC
from ..utils.validators import FlowLabError
from .grid import Grid2Chart, MetricField2

logger = logging.getLogger(__name__)

_INT_HEADER = np.dtype("<i8")
_FLOAT = np.dtype("<f8")


def snapshot_bytes(g):
    chart = g.chart
    parts = [
        SNAPSHOT_MAGIC,
        np.array([2, chart.N1, chart.N2], dtype=_INT_HEADER).tobytes(),
        np.array([chart.L1, chart.L2], dtype=_FLOAT).tobytes(),
        np.ascontiguousarray(g.as_array(), dtype=_FLOAT).tobytes(order="C"),
    ]
    return b"".join(parts)


def metric_from_bytes(payload):
    magic_len = len(SNAPSHOT_MAGIC)
    if payload[:magic_len] != SNAPSHOT_MAGIC:
        raise FlowLabError("not a focflow snapshot (bad magic)")
    offset = magic_len
    n, n1, n2 = np.frombuffer(payload, dtype=_INT_HEADER, count=3, offset=offset)
    offset += 3 * _INT_HEADER.itemsize
    if n != 2:
        raise FlowLabError(f"snapshot dimension {n} is not supported")
    l1, l2 = np.frombuffer(payload, dtype=_FLOAT, count=2, offset=offset)
    offset += 2 * _FLOAT.itemsize
    count = 3 * int(n1) * int(n2)
    if len(payload) - offset != count * _FLOAT.itemsize:
        raise FlowLabError("snapshot payload is truncated or oversized")
    planes = np.frombuffer(payload, dtype=_FLOAT, count=count, offset=offset)
    chart = Grid2Chart(float(l1), float(l2), int(n1), int(n2))
    return MetricField2.from_array(planes.reshape(3, int(n1), int(n2)).astype(float), chart)


def write_snapshot(path, g):
    path = Path(path)
    path.write_bytes(snapshot_bytes(g))
    logger.debug("wrote snapshot %s", path)
    return path


def read_snapshot(path):
    return metric_from_bytes(Path(path).read_bytes())
