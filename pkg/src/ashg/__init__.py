"""Core stability toolkit for additively separable hedonic games."""

from ashg.instance import AshgInstance, Partition, utility, partition_utility, is_blocking

__all__ = [
    "AshgInstance",
    "Partition",
    "utility",
    "partition_utility",
    "is_blocking",
]
