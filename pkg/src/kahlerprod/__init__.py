"""Numerical workbench for the almost complex structure on products of
momentum-map level sets."""
from .errors import GeometryError
from .gallery import GalleryInstance, parse_instance
from .product import ProductACS, ProductPoint, ProductTangent

__version__ = "0.1.0"

__all__ = ["GeometryError", "GalleryInstance", "ProductACS", "ProductPoint", "ProductTangent",
           "parse_instance", "__version__"]
