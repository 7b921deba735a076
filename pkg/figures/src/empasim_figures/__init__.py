"""Figure rendering for exported simulator datasets."""

from .datasets import SchemaError, load_csv, load_trace
from .render import KINDS, FigureSpec, render

__version__ = "0.1.0"
