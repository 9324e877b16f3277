"""Experiment orchestration: catalog access, runs, scaling, plots, CLI."""

from dcnetsim.harness.catalog import (
    CATALOG,
    CatalogEntry,
    catalog_scenario,
    catalog_topology,
    desk_scale_names,
    scaling_names,
    write_catalog_scenarios,
)
from dcnetsim.harness.experiment import (
    ExperimentError,
    ExperimentReport,
    ObjectiveReport,
    check_objectives,
    default_events,
    run_experiment,
    sharing_residual,
    voltage_residual,
)
from dcnetsim.harness.plots import emit_plots, emit_scaling_plot
from dcnetsim.harness.scaling import loglog_slope, run_scaling, write_scaling_csv

__all__ = [
    "CATALOG",
    "CatalogEntry",
    "catalog_scenario",
    "catalog_topology",
    "desk_scale_names",
    "scaling_names",
    "write_catalog_scenarios",
    "ExperimentError",
    "ExperimentReport",
    "ObjectiveReport",
    "check_objectives",
    "default_events",
    "run_experiment",
    "sharing_residual",
    "voltage_residual",
    "emit_plots",
    "emit_scaling_plot",
    "loglog_slope",
    "run_scaling",
    "write_scaling_csv",
]
