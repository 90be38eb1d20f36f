# Mesh core — values, structural records, the mesh and its central mechanism
from src.mesh.mesh import CentralScratch, Mesh
from src.mesh.model import (
    Connection,
    ConnectionKind,
    Neuron,
    NeuronRef,
    Subnet,
    SubnetRef,
    SubnetRole,
)

__all__ = [
    "CentralScratch",
    "Connection",
    "ConnectionKind",
    "Mesh",
    "Neuron",
    "NeuronRef",
    "Subnet",
    "SubnetRef",
    "SubnetRole",
]
