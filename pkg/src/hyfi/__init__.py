"""HyFi: hypergraph contrastive learning with weak positive pairs."""
from importlib import metadata

try:
    __version__ = metadata.version("hyfi")
except metadata.PackageNotFoundError:
    __version__ = "0.0.0+local"
