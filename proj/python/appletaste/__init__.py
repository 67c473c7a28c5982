"""Python access to the apple-tasting simulator."""

from ._appletaste import (
    BudgetExceeded,
    DomainError,
    FiniteClass,
    ParameterError,
    ParseError,
    ProtocolError,
    classify,
    d1_k,
    effective_width,
    expat_bounds,
    fit_power_law,
    glue,
    hamming_ball_class,
    littlestone_dim,
    minimax,
    read_class,
    run_csv_header,
    run_sweep,
    sample_random_class,
    singletons_class,
    universal_class,
    width_depth,
    write_class,
)


def play(learner, adversary, *, n=None, T, k=0, seed=1, **params):
    """Plays a single grid cell and returns its result row as a dict.

    Extra keyword arguments go to the [params] section (eta, L, c,
    class_file, random_class_d, vs_threshold).
    """
    lines = [
        "[sweep]",
        f"learner = {learner}",
        f"adversary = {adversary}",
        f"T = {T}",
        f"k = {k}",
        f"seeds = {seed}",
        "threads = 1",
    ]
    if n is not None:
        lines.append(f"n = {n}")
    if params:
        lines.append("[params]")
        lines.extend(f"{key} = {value}" for key, value in params.items())
    rows = run_sweep("\n".join(lines) + "\n")
    return rows[0] if rows else None


__all__ = [name for name in dir() if not name.startswith("_")]
