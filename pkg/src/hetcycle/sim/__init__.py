"""Trajectory integration, neighbourhood events and basin sampling."""

from __future__ import annotations

from .basin import BasinResult, SampleOutcome, basin_sample, box_start, connection_point, follow
from .events import (
    ContractionEstimate,
    InsufficientDataError,
    VisitEvent,
    contraction_estimate,
    detect_visits,
    follows_cycle,
    read_event_log,
    visit_sequence,
    write_event_log,
)
from .integrate import IntegrationError, Trajectory, export_csv, integrate, read_csv, resume
from .planar import final_attractor, planar_run

__all__ = [name for name in dir() if not name.startswith("_")]
