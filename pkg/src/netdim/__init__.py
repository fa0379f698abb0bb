"""Geometric protean graphs and latent metric dimension estimation."""

from .errors import InputError, NetdimError, NumericError
from .graph import Graph, load_edge_list, save_edge_list

__all__ = [
    "Graph",
    "InputError",
    "NetdimError",
    "NumericError",
    "load_edge_list",
    "save_edge_list",
]

__version__ = "0.1.0"
