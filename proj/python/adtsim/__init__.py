"""All-digital transmitter chain simulation and baseband-equivalent modeling."""

from adtsim._adtsim import (
    Compensator,
    FirBankModel,
    RateConfig,
    align_gain_delay,
    apply_nonlinearity,
    band_extract_demod,
    encode,
    enumerate_monomials,
    eval_compensated,
    eval_monomials,
    fit_compensator,
    fit_model,
    gen_stimulus,
    model_forward,
    nmse_db,
    run_sweep,
    simulate_reference,
    upconvert_interleave,
    validate,
)

__all__ = [
    "Compensator",
    "FirBankModel",
    "RateConfig",
    "align_gain_delay",
    "apply_nonlinearity",
    "band_extract_demod",
    "encode",
    "enumerate_monomials",
    "eval_compensated",
    "eval_monomials",
    "fit_compensator",
    "fit_model",
    "gen_stimulus",
    "model_forward",
    "nmse_db",
    "run_sweep",
    "simulate_reference",
    "upconvert_interleave",
    "validate",
]
