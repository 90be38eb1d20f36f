# Image recognition — pixel grids, shape subnets, signature classification
from src.service.image.engine import (
    Classification,
    ImageEngine,
    ImageEntry,
    ImageModel,
    SubnetSignature,
    subnet_signature,
)
from src.service.image.grid import PixelGrid, load_grid, quantize
from src.service.image.transform import Direction, image_to_subnet

__all__ = [
    "Classification",
    "Direction",
    "ImageEngine",
    "ImageEntry",
    "ImageModel",
    "PixelGrid",
    "SubnetSignature",
    "image_to_subnet",
    "load_grid",
    "quantize",
    "subnet_signature",
]
