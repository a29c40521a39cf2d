from unittest.mock import patch

import pytest

from utils.exceptions import InsufficientMemoryError
from utils.memory_manager import MemoryManager


def test_batch_estimate_grows_with_size():
    manager = MemoryManager()
    small = manager.estimate_batch_mb(1000, 1, 1, 1)
    large = manager.estimate_batch_mb(100000, 1, 1, 1)
    assert large == pytest.approx(100 * small)
    assert manager.estimate_batch_mb(1000, 3, 20, 20) > small


def test_check_batch_passes_with_plenty_of_memory():
    manager = MemoryManager()
    with patch.object(MemoryManager, "get_available_memory", return_value=64000.0):
        assert manager.check_batch(50000, 1, 1, 1) > 0


def test_check_batch_raises_when_memory_is_short():
    manager = MemoryManager()
    with patch.object(MemoryManager, "get_available_memory", return_value=100.0):
        with pytest.raises(InsufficientMemoryError):
            manager.check_batch(10 ** 7, 3, 20, 20)
