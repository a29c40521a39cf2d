"""
Memory checks before large simulations
"""
import logging
from typing import Tuple

import psutil

from utils.exceptions import InsufficientMemoryError

logger = logging.getLogger(__name__)


class MemoryManager:
    """Estimate the footprint of a simulation batch and compare it with free memory"""

    # Python objects and array headers of one SimPair (in bytes)
    PAIR_OVERHEAD_BYTES = 600

    # Safety margin (in MB) to leave for system
    SAFETY_MARGIN_MB = 512

    def get_available_memory(self) -> float:
        """
        Get available system memory in MB

        Returns:
            Available memory in MB
        """
        try:
            return psutil.virtual_memory().available / (1024 * 1024)
        except Exception as e:
            logger.error(f"Error getting memory info: {str(e)}")
            return 0

    def estimate_batch_mb(self, n_sim: int, param_dim: int, data_size: int, summary_dim: int) -> float:
        """
        Approximate memory of n_sim simulated pairs plus the matrices and PIT
        values derived from them
        """
        floats_per_pair = 2 * param_dim + data_size + 2 * summary_dim + 2
        bytes_per_pair = self.PAIR_OVERHEAD_BYTES + 8 * floats_per_pair
        return n_sim * bytes_per_pair / (1024 * 1024)

    def check_memory_available(self, required_mb: float) -> Tuple[bool, float, str]:
        """
        Check if required_mb plus the safety margin is free

        Returns:
            Tuple of (is_available, available_mb, message)
        """
        available_mb = self.get_available_memory()
        is_available = available_mb >= required_mb + self.SAFETY_MARGIN_MB
        if is_available:
            message = f"✓ Memory OK: ~{required_mb:.0f} MB required, {available_mb:.0f} MB available"
        else:
            message = (
                f"⚠️ Insufficient memory: ~{required_mb:.0f} MB required "
                f"(+ {self.SAFETY_MARGIN_MB} MB margin), {available_mb:.0f} MB available. "
                f"Reduce --n-sim or close other applications."
            )
        logger.info(f"Memory check: Required={required_mb:.0f}MB, Available={available_mb:.0f}MB, "
                    f"Result={'OK' if is_available else 'INSUFFICIENT'}")
        return is_available, available_mb, message

    def check_batch(self, n_sim: int, param_dim: int, data_size: int, summary_dim: int) -> float:
        """
        Raise InsufficientMemoryError when a batch of n_sim pairs would not fit

        Returns:
            Estimated batch size in MB
        """
        required_mb = self.estimate_batch_mb(n_sim, param_dim, data_size, summary_dim)
        is_available, _, message = self.check_memory_available(required_mb)
        if not is_available:
            raise InsufficientMemoryError(message)
        return required_mb

