"""CSV-to-figure renderer for adagames experiment outputs.

Consumes only the frozen schema-1 CSV tables (see the main package's
docs/formats.md); it never imports the simulation library itself.
"""

from adaplots.schema import SchemaError, read_table
from adaplots.render import FigureSpec, render

__all__ = ["FigureSpec", "SchemaError", "read_table", "render"]
