"""Deterministic tools: design numbers, ideal fringe, sensitivity."""

import logging

from pydantic import Field

from ..cli import cmd_design, cmd_fringe, cmd_sensitivity, format_summary
from ..config import config_from_text
from ..server import mcp
from ..shared.constants import APD_RATE_LIMIT_HZ, CLASSICAL_FOG_SIGMA_RAD
from ..shared.errors import SagnacSimError
from ..shared.fields import field_config_text
from ..shared.schema import FRINGE_CURVE_COLUMNS, format_error_csv, frame_to_csv

_LOGGER = logging.getLogger(__name__)


@mcp.tool(
    title="Interferometer design numbers",
    description="Omega_pi, loop transit time, mean photons in the loop, scale factor, heralded g2 and dark rates",
)
def sagnac_design(config_text: str | None = field_config_text):
    try:
        report = cmd_design(config_from_text(config_text))
    except SagnacSimError as exc:
        _LOGGER.exception(str(exc))
        return format_error_csv(str(exc), "sagnac_design")
    return format_summary(report.pairs())


@mcp.tool(
    title="Ideal Sagnac fringe",
    description="Noise-free probabilities of the two output ports versus rotation rate, as CSV",
)
def sagnac_fringe(
    config_text: str | None = field_config_text,
    omega_min: float = Field(0.0, description="first rotation rate (rad/s)"),
    omega_max: float = Field(10.0, description="last rotation rate (rad/s)"),
    points: int = Field(101, description="number of evenly spaced points", strict=False),
):
    try:
        frame = cmd_fringe(config_from_text(config_text), omega_min, omega_max, points)
    except SagnacSimError as exc:
        _LOGGER.exception(str(exc))
        return format_error_csv(str(exc), "sagnac_fringe")
    return frame_to_csv(frame, FRINGE_CURVE_COLUMNS).strip()


@mcp.tool(
    title="Gyroscope sensitivity",
    description="Shot-noise phase error, integration time for a target phase resolution and rotation-rate resolution",
)
def sagnac_sensitivity(
    config_text: str | None = field_config_text,
    rate: float = Field(APD_RATE_LIMIT_HZ, description="detected photons per second"),
    target_sigma: float = Field(CLASSICAL_FOG_SIGMA_RAD, description="target phase resolution (rad)"),
):
    try:
        report = cmd_sensitivity(config_from_text(config_text), rate, target_sigma)
    except SagnacSimError as exc:
        _LOGGER.exception(str(exc))
        return format_error_csv(str(exc), "sagnac_sensitivity")
    table = frame_to_csv(report.table, list(report.table.columns)).strip()
    return f"{format_summary(report.pairs())}\n\n{table}"
