"""Python access to the mdtube solver, analytic references and run tables."""

from ._mdtube import (
    ERRORS_SCHEMA,
    SEGMENTS_SCHEMA,
    TRANSPIRATION_SCHEMA,
    Config,
    ConfigError,
    ConvergenceError,
    CriterionResult,
    DiffusionLaw,
    DomainError,
    Error,
    MultiTubeSolution,
    NumericError,
    Result,
    SingleTubeSolution,
    TubeSpec,
    kernel_profile_f,
    reconstruct_interface,
    run,
    soil_pressure,
    solve_multi_tube,
    verify,
)

__all__ = [
    "ERRORS_SCHEMA",
    "SEGMENTS_SCHEMA",
    "TRANSPIRATION_SCHEMA",
    "Config",
    "ConfigError",
    "ConvergenceError",
    "CriterionResult",
    "DiffusionLaw",
    "DomainError",
    "Error",
    "MultiTubeSolution",
    "NumericError",
    "Result",
    "SingleTubeSolution",
    "TubeSpec",
    "kernel_profile_f",
    "reconstruct_interface",
    "run",
    "soil_pressure",
    "solve_multi_tube",
    "verify",
    "with_overrides",
]


def with_overrides(config, **sections):
    """Return a copy of ``config`` with keys replaced, e.g.
    ``with_overrides(cfg, grid={"levels": 3}, study={"k_values": "1"})``."""
    lines = config.to_ini().splitlines()
    section = None
    pending = {s: dict(v) for s, v in sections.items()}
    out = []
    for line in lines:
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1]
        elif "=" in stripped and section in pending:
            key = stripped.split("=", 1)[0].strip()
            if key in pending[section]:
                line = f"{key} = {_format(pending[section].pop(key))}"
        out.append(line)
    leftover = {s: keys for s, keys in pending.items() if keys}
    if leftover:
        raise KeyError(f"unknown keys: {leftover}")
    return Config.parse("\n".join(out) + "\n")


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ", ".join(_format(v) for v in value)
    return repr(value) if isinstance(value, float) else str(value)
