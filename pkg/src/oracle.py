"""
Brute-force orbit oracle over small finite rings Z/n and F_p.

States are raw residue tuples. A unimodular row is (x1, x2, x3); a skew
matrix of size k is the tuple of its strictly upper entries in row-major
order, so a 4x4 matrix is (m01, m02, m03, m12, m13, m23).
"""
import itertools
import json
import math
import os
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import SizeLimit, Unsupported
from .eventlog import emit
from .formats import Record, parse_record
from .frontier import OrbitFrontier
from .matrix import Matrix
from .ring import RingSpec, bezout_witness, ring_parse
from .symbol import classical_vaserstein

State = Tuple[int, ...]

PROGRESS_EVERY = 50000


@dataclass
class OrbitPartition:
    """Orbits of a finite universe, each sorted, ordered by their minimal element."""
    ring: RingSpec
    universe: str
    orbits: List[List[State]]
    generators: str
    stats: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self._index = {state: k for k, orbit in enumerate(self.orbits) for state in orbit}

    def orbit_index(self, state: State) -> int:
        try:
            return self._index[tuple(state)]
        except KeyError:
            raise ValueError(f"{state} is not in the universe of {self.universe}") from None

    @property
    def size(self) -> int:
        return len(self._index)

    def __len__(self) -> int:
        return len(self.orbits)


class CanonicalUnionFind:
    """Union-find whose root is always the smallest member, so merges are order independent."""

    def __init__(self, items: Iterable[State]):
        self._parent = {item: item for item in items}

    def find(self, item: State) -> State:
        root = item
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[item] != root:
            self._parent[item], item = root, self._parent[item]
        return root

    def union(self, a: State, b: State) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        lo, hi = min(ra, rb), max(ra, rb)
        self._parent[hi] = lo
        return True

    def groups(self) -> Dict[State, List[State]]:
        out: Dict[State, List[State]] = {}
        for item in self._parent:
            out.setdefault(self.find(item), []).append(item)
        return out


def _check_ring(ring: RingSpec, max_ring_size: int) -> int:
    if not ring.is_finite:
        raise Unsupported(f"the oracle needs a finite ring, got {ring}")
    n = ring.size()
    if n > max_ring_size:
        raise SizeLimit(f"ring {ring} has {n} elements, limit is {max_ring_size}")
    if not ring.two_is_unit():
        raise Unsupported(f"2 is not a unit in {ring}")
    return n


def _bfs_orbits(universe: Sequence[State], neighbours: Callable[[State], Iterable[State]],
                label: str) -> Tuple[List[List[State]], Dict[str, int]]:
    """Connected components of the universe under `neighbours`, each found by BFS from its minimum."""
    members = set(universe)
    assigned = set()
    orbits = []
    frontier = OrbitFrontier()
    for start in sorted(universe):
        if start in assigned:
            continue
        frontier.push(0, start)
        orbit = []
        while True:
            popped = frontier.pop()
            if popped is None:
                break
            depth, state = popped
            orbit.append(state)
            if frontier.expanded % PROGRESS_EVERY == 0:
                emit("OrbitProgress", universe=label, expanded=frontier.expanded, orbits=len(orbits), depth=depth)
            for nxt in neighbours(state):
                if nxt not in members:
                    raise ValueError(f"generator leaves the {label} universe: {state} -> {nxt}")
                if not frontier.seen(nxt):
                    frontier.push(depth + 1, nxt)
        orbit.sort()
        assigned.update(orbit)
        orbits.append(orbit)
    stats = {'expanded': frontier.expanded, 'discarded': frontier.discarded}
    return orbits, stats


def check_closed(partition: OrbitPartition, neighbours: Callable[[State], Iterable[State]]) -> bool:
    """True iff every generator maps every orbit into itself."""
    for k, orbit in enumerate(partition.orbits):
        for state in orbit:
            for nxt in neighbours(state):
                if partition.orbit_index(nxt) != k:
                    return False
    return True


# -- unimodular rows --------------------------------------------------------

def row_is_unimodular(row: State, n: int) -> bool:
    return math.gcd(math.gcd(math.gcd(row[0], row[1]), row[2]), n) == 1


def row_neighbours(n: int) -> Callable[[State], List[State]]:
    """Right multiplication by every E_ij(lam): x_j += lam x_i."""
    moves = [(i, j, lam) for i in range(3) for j in range(3) if i != j for lam in range(1, n)]

    def step(row: State) -> List[State]:
        out = []
        for i, j, lam in moves:
            nxt = list(row)
            nxt[j] = (nxt[j] + lam * row[i]) % n
            out.append(tuple(nxt))
        return out
    return step


def orbits_um3(ring: RingSpec, max_ring_size: int = 9) -> OrbitPartition:
    """
    E_3-orbits of unimodular rows of length 3.

    Raises:
        Unsupported: ring is infinite or 2 is not a unit
        SizeLimit: ring has more than max_ring_size elements
    """
    n = _check_ring(ring, max_ring_size)
    started = time.perf_counter()
    universe = [r for r in itertools.product(range(n), repeat=3) if row_is_unimodular(r, n)]
    orbits, stats = _bfs_orbits(universe, row_neighbours(n), 'Um_3')
    emit("OrbitsComputed", universe="Um_3", ring=str(ring), states=len(universe), orbits=len(orbits),
         seconds=round(time.perf_counter() - started, 3))
    return OrbitPartition(ring, 'Um_3', orbits, 'E_ij(lam), lam in R', stats)


# -- skew matrices ------------------------------------------------------------

def skew_pairs(size: int) -> List[Tuple[int, int]]:
    return [(k, l) for k in range(size) for l in range(k + 1, size)]


def _congruence_moves(size: int) -> List[List[Tuple[int, int, int]]]:
    """
    For each E_ij(1), i != j, the update of M -> E^T M E on upper entries.

    Column j gains column i and row j gains row i, so only pairs touching j
    change. Each entry is (position, sign, source position).
    """
    pairs = skew_pairs(size)
    index = {p: k for k, p in enumerate(pairs)}

    def entry(k: int, l: int) -> Optional[Tuple[int, int]]:
        if k == l:
            return None
        return (1, index[(k, l)]) if k < l else (-1, index[(l, k)])

    moves = []
    for i in range(size):
        for j in range(size):
            if i == j:
                continue
            updates = []
            for pos, (k, l) in enumerate(pairs):
                src = entry(k, i) if l == j else entry(i, l) if k == j else None
                if src is not None:
                    updates.append((pos, src[0], src[1]))
            moves.append(updates)
    return moves


def congruence_neighbours(n: int, size: int) -> Callable[[State], List[State]]:
    moves = _congruence_moves(size)

    def step(t: State) -> List[State]:
        out = []
        for updates in moves:
            nxt = list(t)
            for pos, sign, src in updates:
                nxt[pos] = (nxt[pos] + sign * t[src]) % n
            out.append(tuple(nxt))
        return out
    return step


def pfaffian4(t: State, n: int) -> int:
    m01, m02, m03, m12, m13, m23 = t
    return (m01 * m23 - m02 * m13 + m03 * m12) % n


def encode_skew(M: Matrix) -> State:
    """Upper entries of a skew matrix over Z/n as residues."""
    if not M.is_skew():
        raise ValueError("matrix is not skew")
    return tuple(M[k, l].value for k, l in skew_pairs(M.rows))


def _stabilized(t: State, n: int) -> State:
    """t + psi_2 as a 6x6 state."""
    values = dict(zip(skew_pairs(4), t))
    values[(4, 5)] = 1 % n
    return tuple(values.get(p, 0) for p in skew_pairs(6))


def _merge_at_level_one(orbits: List[List[State]], n: int, max_states: int) -> Tuple[List[List[State]], bool, int]:
    """
    Merge size-4 orbits whose stabilizations meet under size-6 congruence.

    One BFS per orbit representative shares a state -> root map; touching a
    state owned by another root merges the two. Once max_states states are
    owned, searches only walk states that are already owned.
    """
    reps = [orbit[0] for orbit in orbits]
    uf = CanonicalUnionFind(reps)
    owner: Dict[State, State] = {}
    step = congruence_neighbours(n, 6)
    truncated = False
    for rep in reps:
        frontier = OrbitFrontier()
        frontier.push(0, _stabilized(rep, n))
        while True:
            popped = frontier.pop()
            if popped is None:
                break
            depth, state = popped
            other = owner.get(state)
            if other is not None:
                uf.union(rep, other)
                continue
            if len(owner) >= max_states:
                if not truncated:
                    emit("OracleTruncated", states=len(owner), max_states=max_states)
                truncated = True
                break
            owner[state] = rep
            for nxt in step(state):
                if not frontier.seen(nxt):
                    frontier.push(depth + 1, nxt)
    by_rep = {orbit[0]: orbit for orbit in orbits}
    merged = [sorted(s for r in group for s in by_rep[r]) for group in uf.groups().values()]
    merged.sort(key=lambda orbit: orbit[0])
    return merged, truncated, len(owner)


def orbits_a4(ring: RingSpec, stab_levels: int = 1, max_states: int = 200000,
              max_ring_size: int = 9) -> OrbitPartition:
    """
    Elementary congruence classes of skew 4x4 matrices with Pfaffian 1.

    At level 1 two classes are merged when their sums with psi_2 meet under
    size-6 elementary congruence; the size-6 search visits at most
    max_states states and records truncation in `stats`.

    Raises:
        ValueError: stab_levels is not 0 or 1
        Unsupported: ring is infinite or 2 is not a unit
        SizeLimit: ring has more than max_ring_size elements
    """
    if stab_levels not in (0, 1):
        raise ValueError("stab_levels must be 0 or 1")
    n = _check_ring(ring, max_ring_size)
    started = time.perf_counter()
    universe = [t for t in itertools.product(range(n), repeat=6) if pfaffian4(t, n) == 1 % n]
    orbits, stats = _bfs_orbits(universe, congruence_neighbours(n, 4), 'A_4')
    stats.update(level0_orbits=len(orbits), truncated=False, level1_states=0)
    if stab_levels == 1 and len(orbits) > 1:
        orbits, truncated, visited = _merge_at_level_one(orbits, n, max_states)
        stats.update(truncated=truncated, level1_states=visited)
    emit("OrbitsComputed", universe="A_4", ring=str(ring), states=len(universe), orbits=len(orbits),
         stab_levels=stab_levels, seconds=round(time.perf_counter() - started, 3))
    return OrbitPartition(ring, 'A_4', orbits, f"E^T (.) E, E = E_ij(1), stabilization <= {stab_levels}", stats)


# -- symbol map ---------------------------------------------------------------

def _symbol_state(ring: RingSpec, row: State) -> State:
    a = Matrix.row(ring, [ring(x) for x in row])
    b = Matrix.column(ring, bezout_witness(a.entries()))
    return encode_skew(classical_vaserstein(a, b))


@dataclass
class SymbolMapReport:
    ring: RingSpec
    rows: OrbitPartition
    classes: OrbitPartition
    mapping: List[int]
    well_defined: Optional[bool]
    stab_levels: int

    @property
    def injective(self) -> bool:
        return len(set(self.mapping)) == len(self.mapping)

    @property
    def surjective(self) -> bool:
        return set(self.mapping) == set(range(len(self.classes)))

    @property
    def verdict(self) -> str:
        if self.injective and self.surjective:
            return 'bijective'
        if self.injective:
            return 'injective'
        if self.surjective:
            return 'surjective'
        return 'neither'

    def summary(self) -> str:
        r, c = len(self.rows), len(self.classes)
        return f"{r} orbit{'' if r == 1 else 's'} / {c} class{'' if c == 1 else 'es'} / {self.verdict}"

    def to_record(self) -> Record:
        record = Record('oracle-report').add('ring', self.ring)
        record.add('stab_levels', self.stab_levels)
        record.add('rows', self.rows.size).add('row_orbits', len(self.rows))
        record.add('pfaffian_one_matrices', self.classes.size).add('classes', len(self.classes))
        for k, target in enumerate(self.mapping):
            record.add('map', f"{k} -> {target}")
        record.add('injective', 'yes' if self.injective else 'no')
        record.add('surjective', 'yes' if self.surjective else 'no')
        record.add('well_defined', 'not checked' if self.well_defined is None
                   else 'yes' if self.well_defined else 'no')
        record.add('truncated', 'yes' if self.classes.stats.get('truncated') else 'no')
        if len(self.classes) > 1:
            record.add('note', f"classes are distinct at level <= {self.stab_levels}")
        record.add('summary', self.summary())
        return record


def symbol_map_report(ring: RingSpec, stab_levels: int = 1, max_states: int = 200000,
                      max_ring_size: int = 9, check_well_defined: Optional[bool] = None) -> SymbolMapReport:
    """
    The map from row orbits to Pfaffian-1 classes induced by the classical symbol.

    One representative per row orbit is mapped. With check_well_defined
    (default: |R| <= 5) every member of every orbit is mapped and must land
    in its representative's class.
    """
    rows = orbits_um3(ring, max_ring_size)
    classes = orbits_a4(ring, stab_levels, max_states, max_ring_size)
    mapping = [classes.orbit_index(_symbol_state(ring, orbit[0])) for orbit in rows.orbits]
    if check_well_defined is None:
        check_well_defined = ring.size() <= 5
    well_defined = None
    if check_well_defined:
        well_defined = all(classes.orbit_index(_symbol_state(ring, row)) == mapping[k]
                           for k, orbit in enumerate(rows.orbits) for row in orbit)
    return SymbolMapReport(ring, rows, classes, mapping, well_defined, stab_levels)


def read_report(text: str) -> Record:
    return parse_record(text, 'oracle-report')


# -- runs -----------------------------------------------------------------------

class OutputManager:
    """Writes oracle reports and run parameters into one directory."""

    def __init__(self, output_dir: str = "runs"):
        self.output_dir = output_dir
        os.makedirs(output_dir, exist_ok=True)

    def write_report(self, report: SymbolMapReport, filename: str = "report.txt") -> str:
        path = os.path.join(self.output_dir, filename)
        with open(path, 'w') as f:
            f.write(report.to_record().dumps())
        return path

    def write_parameters(self, params: Dict[str, Any]) -> str:
        path = os.path.join(self.output_dir, "parameters.json")
        with open(path, 'w') as f:
            json.dump(params, f, indent=2)
        return path


def validate_oracle_parameters(params: Dict[str, Any]) -> None:
    """
    Validate oracle parameters.

    Raises:
        ValueError: if parameters are invalid
    """
    for param in ['ring']:
        if param not in params:
            raise ValueError(f"Missing required parameter: {param}")
    ring_parse(params['ring'])
    if params.get('stab_levels', 1) not in (0, 1):
        raise ValueError("stab_levels must be 0 or 1")
    if params.get('max_states', 200000) <= 0:
        raise ValueError("max_states must be positive")
    if params.get('max_ring_size', 9) < 2:
        raise ValueError("max_ring_size must be at least 2")


def run_oracle(params: Dict[str, Any]) -> SymbolMapReport:
    """
    Run the symbol map oracle and, if output_dir is given, write the report
    and parameters.json under output_dir/run_name.
    """
    validate_oracle_parameters(params)
    ring = ring_parse(params['ring'])
    emit("OracleStart", ring=str(ring), stab_levels=params.get('stab_levels', 1))
    report = symbol_map_report(ring,
                               stab_levels=params.get('stab_levels', 1),
                               max_states=params.get('max_states', 200000),
                               max_ring_size=params.get('max_ring_size', 9),
                               check_well_defined=params.get('check_well_defined'))
    if params.get('output_dir'):
        run_name = params.get('run_name', str(ring).replace('/', '_'))
        output = OutputManager(os.path.join(params['output_dir'], run_name))
        output.write_parameters(params)
        path = output.write_report(report)
        emit("ReportWritten", path=path)
    emit("OracleComplete", ring=str(ring), summary=report.summary())
    return report
