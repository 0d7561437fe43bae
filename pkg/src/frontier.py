import heapq
from typing import Hashable, Optional, Set, Tuple

from .eventlog import emit


class OrbitFrontier:
    """
    Priority queue of states for breadth-first orbit search, ordered by
    (depth, canonical key).

    States already expanded are discarded when popped.
    """

    def __init__(self):
        self._heap = []
        self._expanded: Set[Hashable] = set()
        self.discarded = 0

    def push(self, depth: int, key: Hashable) -> None:
        heapq.heappush(self._heap, (depth, key))

    def pop(self) -> Optional[Tuple[int, Hashable]]:
        """
        Next state that has not been expanded yet, marked as expanded.

        Returns:
            (depth, key), or None if the frontier is exhausted
        """
        while self._heap:
            depth, key = heapq.heappop(self._heap)
            if key not in self._expanded:
                self._expanded.add(key)
                return depth, key
            self.discarded += 1
            if self.discarded % 10000 == 0:
                emit("FrontierDiscarded", discarded=self.discarded, depth=depth, reason="already expanded")
        return None

    def seen(self, key: Hashable) -> bool:
        return key in self._expanded

    @property
    def expanded(self) -> int:
        return len(self._expanded)

    def is_empty(self) -> bool:
        return not self._heap

    def __len__(self) -> int:
        return len(self._heap)
