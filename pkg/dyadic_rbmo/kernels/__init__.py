"""Calderón-Zygmund kernels on discrete measures."""

from .base import Kernel, KernelConditions, KernelSpec, kernel_conditions
from .cauchy import CauchyKernel
from .registry import KERNEL_REGISTRY, parse_kernel_flag
from .riesz import RieszKernel
from .table import TableKernel

__all__ = [
    "Kernel",
    "KernelSpec",
    "KernelConditions",
    "kernel_conditions",
    "CauchyKernel",
    "RieszKernel",
    "TableKernel",
    "KERNEL_REGISTRY",
    "parse_kernel_flag",
]
