from .server import mcp


@mcp.prompt("reproduce-fringe")
def prompt_reproduce_fringe(seed: int = 1):
    """Replay the spin-down measurement and judge the fitted fringes"""
    return f"""
    You are checking a single-photon Sagnac gyroscope simulation. Run these steps:
    1. Call `sagnac_design` and note omega_pi_rad_s and the dark rates.
    2. Call `sagnac_run` with seed={seed} and no config, so the reference parameters from `config://reference` apply.
    3. For both ports compare the fitted omega_pi against omega_pi_analytic, within three standard errors.
    4. Report the visibilities; the two ports should be complementary (one bright where the other is dark).
    5. Call `sagnac_sensitivity` and state how long a 1e7 /s count rate needs to reach 1 microradian.
    """
