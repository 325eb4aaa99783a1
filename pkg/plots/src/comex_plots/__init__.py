"""Panel rendering for comex trajectory CSVs."""

from .panels import PanelSpec, SchemaError, load_series, render_panels, self_test

__all__ = ["PanelSpec", "SchemaError", "load_series", "render_panels", "self_test"]
