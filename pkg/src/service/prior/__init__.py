# Prior knowledge — number systems, months, time structure, operators
from src.service.prior.builders import (
    PriorCatalog,
    build_catalog,
    build_decimal_subnet,
    build_integer_subnet,
    build_month_subnet,
    build_operator_subnets,
    build_time_subnet,
    decimal_grid,
    ensure_decimal,
    ensure_integer,
    link_attribute_to_prior,
    link_neuron_to_prior,
    link_prior,
)

__all__ = [
    "PriorCatalog",
    "build_catalog",
    "build_decimal_subnet",
    "build_integer_subnet",
    "build_month_subnet",
    "build_operator_subnets",
    "build_time_subnet",
    "decimal_grid",
    "ensure_decimal",
    "ensure_integer",
    "link_attribute_to_prior",
    "link_neuron_to_prior",
    "link_prior",
]
