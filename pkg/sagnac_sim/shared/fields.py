from pydantic import Field

field_config_text = Field(
    None,
    description="Optional config, one `section.field = value` per line (e.g. geometry.fiber_length_m = 550); empty uses the reference parameters",
)
field_seed = Field(None, description="64-bit master seed; empty picks one and reports it in the summary", ge=0)
