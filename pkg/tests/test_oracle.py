import json
import os

import pytest

from src.elem import BlockDecomposition, ElemWord, elementary
from src.errors import SizeLimit, Unsupported
from src.matrix import Matrix, congruence, standard_form
from src.oracle import (CanonicalUnionFind, _merge_at_level_one, check_closed, congruence_neighbours,
                        encode_skew, orbits_a4, orbits_um3, pfaffian4, read_report, row_neighbours,
                        run_oracle, skew_pairs, symbol_map_report, validate_oracle_parameters)
from src.ring import ring_parse

F3 = ring_parse('F_3')


def decode_skew(ring, state, size=4):
    values = dict(zip(skew_pairs(size), state))

    def entry(i, j):
        if i < j:
            return values[(i, j)]
        if i > j:
            return -values[(j, i)]
        return 0
    return Matrix.build(ring, size, size, entry)


class TestCanonicalUnionFind:

    def test_root_is_minimum(self):
        uf = CanonicalUnionFind([(3,), (1,), (2,)])
        assert uf.union((3,), (2,))
        assert uf.find((3,)) == (2,)
        assert uf.union((2,), (1,))
        assert uf.find((3,)) == (1,)
        assert not uf.union((1,), (3,))

    def test_groups(self):
        uf = CanonicalUnionFind([(0,), (1,), (2,), (3,)])
        uf.union((0,), (2,))
        groups = uf.groups()
        assert sorted(groups[(0,)]) == [(0,), (2,)]
        assert groups[(1,)] == [(1,)]
        assert len(groups) == 3


class TestGenerators:

    def test_row_neighbours_stay_unimodular(self):
        step = row_neighbours(3)
        neighbours = step((1, 0, 0))
        assert (1, 1, 0) in neighbours
        assert (1, 0, 2) in neighbours
        assert len(neighbours) == 12

    def test_congruence_moves_match_matrices(self):
        M = Matrix.from_rows(F3, [[0, 1, 2, 0], [-1, 0, 1, 1], [-2, -1, 0, 2], [0, -1, -2, 0]])
        t = encode_skew(M)
        expected = set()
        for i in range(4):
            for j in range(4):
                if i != j:
                    E = ElemWord(F3, BlockDecomposition.free(1, 1, 1, 1), [elementary(F3, 4, i, j, 1)]).eval()
                    expected.add(encode_skew(congruence(E, M)))
        assert set(congruence_neighbours(3, 4)(t)) == expected

    def test_pfaffian4(self):
        t = encode_skew(standard_form(F3, 'psi', 2))
        assert t == (1, 0, 0, 0, 0, 1)
        assert pfaffian4(t, 3) == 1
        assert pfaffian4(encode_skew(standard_form(F3, 'h', 2)), 3) == 2

    def test_decode_inverts_encode(self):
        M = decode_skew(F3, (1, 2, 0, 1, 1, 2))
        assert M.is_skew()
        assert encode_skew(M) == (1, 2, 0, 1, 1, 2)


class TestOrbits:

    def test_um3_over_f3(self):
        rows = orbits_um3(F3)
        assert rows.size == 26
        assert len(rows) == 1
        assert check_closed(rows, row_neighbours(3))

    def test_a4_over_f3(self):
        classes = orbits_a4(F3, stab_levels=0)
        assert classes.size == 234
        assert len(classes) == 1
        assert classes.stats['level0_orbits'] == 1
        assert check_closed(classes, congruence_neighbours(3, 4))

    def test_single_orbit_skips_level_one(self):
        classes = orbits_a4(F3, stab_levels=1)
        assert len(classes) == 1
        assert classes.stats['level1_states'] == 0
        assert not classes.stats['truncated']

    def test_outside_universe(self):
        classes = orbits_a4(F3, stab_levels=0)
        with pytest.raises(ValueError, match="not in the universe"):
            classes.orbit_index(encode_skew(standard_form(F3, 'h', 2)))

    def test_level_one_truncation(self):
        orbit = orbits_a4(F3, stab_levels=0).orbits[0]
        split = [orbit[:1], orbit[1:]]
        merged, truncated, visited = _merge_at_level_one(split, 3, 1)
        assert truncated
        assert visited == 1
        assert len(merged) == 2

    def test_level_one_merges_neighbouring_classes(self):
        orbit = orbits_a4(F3, stab_levels=0).orbits[0]
        rep = orbit[0]
        neighbour = min(t for t in congruence_neighbours(3, 4)(rep) if t != rep)
        split = [[t for t in orbit if t != neighbour], [neighbour]]
        merged, truncated, visited = _merge_at_level_one(split, 3, 50)
        assert truncated
        assert visited == 50
        assert merged == [orbit]

    def test_stab_levels(self):
        with pytest.raises(ValueError, match="stab_levels"):
            orbits_a4(F3, stab_levels=2)

    def test_unsupported_rings(self):
        with pytest.raises(Unsupported, match="2 is not a unit"):
            orbits_um3(ring_parse('Z/4'))
        with pytest.raises(Unsupported, match="finite ring"):
            orbits_um3(ring_parse('Z'))

    def test_size_limit(self):
        with pytest.raises(SizeLimit):
            orbits_um3(ring_parse('Z/11'))


class TestSymbolMap:

    def test_report_over_f3(self):
        report = symbol_map_report(F3)
        assert report.mapping == [0]
        assert report.verdict == 'bijective'
        assert report.well_defined is True
        assert report.summary() == "1 orbit / 1 class / bijective"

    def test_report_over_f5(self):
        report = symbol_map_report(ring_parse('F_5'))
        assert report.rows.size == 124
        assert report.well_defined is True
        assert report.summary() == "1 orbit / 1 class / bijective"

    def test_report_over_z9(self):
        report = symbol_map_report(ring_parse('Z/9'), stab_levels=0)
        assert report.rows.size == 702
        assert report.classes.stats['level0_orbits'] == 1
        assert report.well_defined is None
        assert report.summary() == "1 orbit / 1 class / bijective"

    def test_record(self):
        record = read_report(symbol_map_report(F3, stab_levels=0).to_record().dumps())
        assert record.get('rows') == '26'
        assert record.get('pfaffian_one_matrices') == '234'
        assert record.get_all('map') == ['0 -> 0']
        assert record.get('well_defined') == 'yes'
        assert record.get('note') is None


class TestRunOracle:

    def test_missing_ring(self):
        with pytest.raises(ValueError, match="Missing required parameter: ring"):
            validate_oracle_parameters({})

    def test_invalid_parameters(self):
        with pytest.raises(ValueError, match="max_states"):
            validate_oracle_parameters({'ring': 'F_3', 'max_states': 0})
        with pytest.raises(ValueError):
            validate_oracle_parameters({'ring': 'Z/1'})

    def test_writes_run_directory(self, tmp_path):
        report = run_oracle({'ring': 'F_3', 'output_dir': str(tmp_path)})
        run_dir = os.path.join(tmp_path, 'F_3')
        with open(os.path.join(run_dir, 'report.txt')) as f:
            record = read_report(f.read())
        with open(os.path.join(run_dir, 'parameters.json')) as f:
            params = json.load(f)
        assert record.get('summary') == report.summary()
        assert params['ring'] == 'F_3'

    def test_run_name(self, tmp_path):
        run_oracle({'ring': 'F_3', 'stab_levels': 0, 'output_dir': str(tmp_path), 'run_name': 'small'})
        assert os.path.exists(os.path.join(tmp_path, 'small', 'report.txt'))
