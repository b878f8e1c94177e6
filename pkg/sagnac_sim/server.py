import importlib.metadata

from fastmcp import FastMCP

try:
    __version__ = importlib.metadata.version("sagnac-sim")
except importlib.metadata.PackageNotFoundError:
    __version__ = "0.0.0-dev"

mcp = FastMCP(name="sagnac-sim", version=__version__)

INSTRUCTIONS = """
# Sagnac-Sim - single-photon fibre gyroscope simulator

You drive a simulator of a single-photon Sagnac interferometer: heralded 1550 nm photons
enter a rotating 550 m fibre loop through a 50/50 beam splitter and are counted by two
gated InGaAs APDs on the two output ports.

## Tool selection

- **Design numbers?** -> `sagnac_design` (Omega_pi, loop transit time, photons in the loop,
  scale factor, heralded g2, dark rates).
- **Ideal fringe?** -> `sagnac_fringe` (noise-free port probabilities versus rotation rate).
- **Full experiment?** -> `sagnac_run` (Monte Carlo spin-down, dark subtraction, record
  averaging, fitted visibility and Omega_pi for both ports). Always pass a `seed` when the
  result has to be reproducible; the summary reports the seed actually used.
- **Gyroscope sensitivity?** -> `sagnac_sensitivity` (shot-noise phase error and required
  integration time).

## Configuration

Every tool accepts `config_text` in the `section.field = value` format served by the
resource `config://reference`; omit it to use the reference parameters. Override only the keys you
need, `geometry.*` keys are mandatory whenever `config_text` is given.

## Output

- Tables are CSV with a header row; floats carry 17 significant digits.
- Summaries are `key=value` lines.
- Failures come back as CSV with columns `error,source,fallback`.
"""

mcp.instructions = INSTRUCTIONS
