from .config import REFERENCE_CONFIG_TEXT
from .server import mcp
from .shared.schema import RECORD_COLUMNS, RECORD_EXTRA_COLUMNS


@mcp.resource("config://reference")
def resource_reference_config():
    """The reference configuration, ready to edit and pass as `config_text`"""
    return REFERENCE_CONFIG_TEXT


@mcp.resource("schema://records-csv")
def resource_records_schema():
    """Column contract of the per-bin run CSV"""
    fixed = "\n".join(f"    - {col}" for col in RECORD_COLUMNS)
    extra = "\n".join(f"    - {col}" for col in RECORD_EXTRA_COLUMNS)
    return f"""
    Run CSV, one row per (record, bin), ordered by record then bin:
{fixed}
    Trailing columns, so a re-read rebuilds every bin exactly:
{extra}
    net_port* = max(counts - expected_dark, 0). Floats use 17 significant digits.
    """
