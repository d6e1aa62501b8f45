"""Linear DAG structure learning: GOLEM-style penalized likelihood fits,
a NOTEARS baseline, simulators and structure metrics.

The heavy lifting lives in the compiled extension; this package re-exports it.
"""

from ._core import (
    GolemError,
    center_columns,
    dag_penalty,
    dagify,
    fit_golem,
    fit_golem_nv_warmstart,
    fit_notears,
    generate_graph,
    is_dag,
    metrics,
    postprocess,
    sample,
    score,
    score_gradient,
    threshold,
)

__all__ = [
    "GolemError",
    "center_columns",
    "dag_penalty",
    "dagify",
    "fit_golem",
    "fit_golem_nv_warmstart",
    "fit_notears",
    "generate_graph",
    "is_dag",
    "metrics",
    "postprocess",
    "sample",
    "score",
    "score_gradient",
    "threshold",
]
