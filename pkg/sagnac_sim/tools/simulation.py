import asyncio
import logging

from fastmcp import Context

from ..cli import fit_run, format_summary
from ..config import config_from_text
from ..server import mcp
from ..shared.errors import SagnacSimError
from ..shared.fields import field_config_text, field_seed
from ..shared.schema import format_error_csv, frame_to_csv
from ..shared.utils import choose_seed, resolve_threads, run_records

_LOGGER = logging.getLogger(__name__)


@mcp.tool(
    title="Monte Carlo Sagnac run",
    description="Replays the spin-down measurement: per-bin photon counting on both ports, dark subtraction, "
    "averaging over records and fringe fit; returns the summary and the averaged fringe as CSV",
)
async def sagnac_run(
    config_text: str | None = field_config_text,
    seed: int | None = field_seed,
    ctx: Context | None = None,
):
    if ctx:
        await ctx.report_progress(0, 100, "Loading configuration...")
    try:
        config = config_from_text(config_text)
        seed, seed_auto = choose_seed(seed, config)
        threads = resolve_threads()
    except SagnacSimError as exc:
        _LOGGER.exception(str(exc))
        return format_error_csv(str(exc), "sagnac_run")

    if ctx:
        await ctx.report_progress(20, 100, "Simulating records...")

    loop = asyncio.get_running_loop()
    try:
        records = await loop.run_in_executor(None, lambda: run_records(config, seed, threads, use_cache=True))
    except SagnacSimError as exc:
        _LOGGER.exception(str(exc))
        return format_error_csv(str(exc), "sagnac_run")

    if ctx:
        await ctx.report_progress(80, 100, "Fitting fringes...")

    summary, fringe = fit_run(config, records, seed, seed_auto)

    if ctx:
        await ctx.report_progress(100, 100, "Run complete")

    return f"{format_summary(summary.pairs())}\n\n{frame_to_csv(fringe, list(fringe.columns)).strip()}"
