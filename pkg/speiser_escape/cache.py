"""
Pole inventory cache.
Keeps the largest inventory computed per model and serves smaller disks from it.
"""

import logging
import threading
from typing import Hashable, Optional

from speiser_escape.models import ModelFunction, PoleInventory

logger = logging.getLogger(__name__)


class InventoryCache:
    """In-memory cache of pole inventories keyed by model."""

    def __init__(self, max_entries: int = 16):
        self._cache: dict[Hashable, PoleInventory] = {}
        self._lock = threading.Lock()
        self.max_entries = max_entries

    @staticmethod
    def _key(model: ModelFunction) -> Optional[Hashable]:
        try:
            hash(model)
        except TypeError:
            return None
        return model

    def get(self, model: ModelFunction, radius: float) -> Optional[PoleInventory]:
        """
        Get an inventory covering ``radius``.

        Args:
            model: Model function
            radius: Disk radius

        Returns:
            Inventory restricted to the disk, or None if not cached
        """
        key = self._key(model)
        if key is None:
            return None
        with self._lock:
            entry = self._cache.get(key)
        if entry is None or entry.radius < radius:
            return None
        return entry.within(radius)

    def set(self, model: ModelFunction, inventory: PoleInventory) -> None:
        key = self._key(model)
        if key is None:
            return
        with self._lock:
            current = self._cache.get(key)
            if current is not None and current.radius >= inventory.radius:
                return
            if current is None and len(self._cache) >= self.max_entries:
                self._cache.pop(next(iter(self._cache)))
            self._cache[key] = inventory

    def inventory(self, model: ModelFunction, radius: float) -> PoleInventory:
        """Cached inventory for ``radius``, computing and storing it on a miss."""
        cached = self.get(model, radius)
        if cached is not None:
            return cached
        logger.debug(f"Building pole inventory for {model.variant} up to radius {radius:g}")
        inventory = model.pole_inventory(radius)
        self.set(model, inventory)
        return inventory

    def clear(self) -> None:
        """Clear all cache entries."""
        with self._lock:
            self._cache.clear()


# Global inventory cache instance
inventory_cache = InventoryCache()
