from src.frontier import OrbitFrontier


class TestOrbitFrontier:

    def test_empty_frontier(self):
        frontier = OrbitFrontier()
        assert frontier.is_empty()
        assert len(frontier) == 0
        assert frontier.pop() is None

    def test_single_state(self):
        frontier = OrbitFrontier()
        frontier.push(0, (1, 0, 0))

        assert not frontier.is_empty()
        assert frontier.pop() == (0, (1, 0, 0))
        assert frontier.is_empty()
        assert frontier.seen((1, 0, 0))
        assert frontier.expanded == 1

    def test_ordering_by_depth_then_key(self):
        frontier = OrbitFrontier()
        frontier.push(2, (0, 1))
        frontier.push(1, (2, 2))
        frontier.push(1, (0, 2))
        frontier.push(0, (5, 5))

        assert frontier.pop() == (0, (5, 5))
        assert frontier.pop() == (1, (0, 2))
        assert frontier.pop() == (1, (2, 2))
        assert frontier.pop() == (2, (0, 1))
        assert frontier.pop() is None

    def test_expanded_states_are_discarded(self):
        frontier = OrbitFrontier()
        frontier.push(0, 'a')
        frontier.push(1, 'a')
        frontier.push(1, 'b')

        assert frontier.pop() == (0, 'a')
        assert frontier.pop() == (1, 'b')
        assert frontier.pop() is None
        assert frontier.discarded == 1
        assert frontier.expanded == 2

    def test_seen_only_after_pop(self):
        frontier = OrbitFrontier()
        frontier.push(0, 'x')
        assert not frontier.seen('x')
        frontier.pop()
        assert frontier.seen('x')
