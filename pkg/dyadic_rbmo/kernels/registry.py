"""Kernel registry and ``--kernel`` flag parsing."""

from typing import Dict, Type

from .base import Kernel
from .cauchy import CauchyKernel
from .riesz import RieszKernel
from .table import TableKernel
from config.constants import CUSTOM_KERNEL_PREFIX, DEFAULT_EPSILON, ERROR_UNKNOWN_KERNEL, RIESZ_KERNEL_PREFIX

KERNEL_REGISTRY: Dict[str, Type[Kernel]] = {
    "cauchy": CauchyKernel,
    "riesz": RieszKernel,
    "custom": TableKernel,
}


def parse_kernel_flag(flag: str, epsilon: float = DEFAULT_EPSILON) -> Kernel:
    """
    Build a kernel from ``cauchy``, ``riesz:<j>`` or ``custom:<path>``.

    Raises:
        ValueError: If the flag names no known kernel
        FileNotFoundError: If a custom kernel file is missing
    """
    text = flag.strip()
    if text == "cauchy":
        return CauchyKernel(epsilon=epsilon)
    if text.startswith(RIESZ_KERNEL_PREFIX):
        component = text[len(RIESZ_KERNEL_PREFIX):]
        if not component.isdigit():
            raise ValueError(f"{ERROR_UNKNOWN_KERNEL}: '{flag}' (expected riesz:<component>)")
        return RieszKernel(int(component), epsilon=epsilon)
    if text == "riesz":
        return RieszKernel(0, epsilon=epsilon)
    if text.startswith(CUSTOM_KERNEL_PREFIX):
        return TableKernel.from_file(text[len(CUSTOM_KERNEL_PREFIX):], epsilon=epsilon)
    raise ValueError(f"{ERROR_UNKNOWN_KERNEL}: '{flag}' (choose from {', '.join(sorted(KERNEL_REGISTRY))})")
