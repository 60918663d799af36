from __future__ import annotations

import struct

import numpy as np
import pytest

from hhg_oracle.cachefmt import read_table
from hhg_oracle.golden import make_dipole_record, make_g2_record, scenario_hash
from hhg_oracle.reference import (Scenario, build_tables, golden_dipole,
                                  golden_g2)

TINY = Scenario(n_cycles=2, n_t=33, n_v=24, v_lim=3.0)
TINY_SHIFTS = (0, 8, 16)


class TestDeterminism:
    def test_dipole_regeneration_identical(self):
        a = golden_dipole(TINY)
        b = golden_dipole(TINY)
        assert np.array_equal(a, b)

    def test_golden_files_bitwise_identical(self, tmp_path):
        rec1 = make_dipole_record(TINY)
        rec2 = make_dipole_record(TINY)
        p1 = rec1.write(tmp_path / "a")
        p2 = rec2.write(tmp_path / "b")
        assert p1.read_bytes() == p2.read_bytes()

    def test_g2_files_bitwise_identical(self, tmp_path):
        p1 = make_g2_record(TINY, orders=(11,), shifts=TINY_SHIFTS).write(tmp_path / "a")
        p2 = make_g2_record(TINY, orders=(11,), shifts=TINY_SHIFTS).write(tmp_path / "b")
        assert p1.read_bytes() == p2.read_bytes()

    def test_hash_tracks_scenario(self):
        assert scenario_hash(TINY) != scenario_hash(Scenario(n_cycles=2, n_t=33,
                                                             n_v=24, v_lim=5.0))


class TestPhysicsLimits:
    def test_zero_field_dipole_vanishes(self):
        sc = Scenario(e0=0.0, n_cycles=2, n_t=33, n_v=24)
        assert np.all(golden_dipole(sc) == 0.0)

    def test_fluctuation_free_g2_is_exactly_one(self):
        """Zeroed transition tables: the literal numerator collapses onto the
        coherent kernel, which is the same 4-D sum as the denominator."""
        tab = build_tables(TINY)
        tab.x[:] = 0.0
        tab.dx_dv[:] = 0.0
        d = golden_dipole(TINY)
        res = golden_g2(TINY, 11, TINY_SHIFTS, dipole=d, tables=tab)
        assert np.all(res["g2"] == 1.0)

    def test_zero_tables_zero_terms(self):
        tab = build_tables(TINY)
        tab.x[:] = 0.0
        tab.dx_dv[:] = 0.0
        d = golden_dipole(TINY)
        res = golden_g2(TINY, 11, TINY_SHIFTS, dipole=d, tables=tab)
        assert np.all(res["t_cross"] == 0.0)
        assert np.all(res["t_cc"] == 0.0)

    def test_numerator_real(self):
        res = golden_g2(TINY, 11, TINY_SHIFTS)
        total = res["t_coh"] + res["t_cross"] + res["t_cc"]
        assert np.max(np.abs(total.imag)) < 1e-9 * np.max(np.abs(total.real))


class TestGuards:
    def test_fine_window_refused(self):
        sc = Scenario(n_cycles=2, n_t=201, n_v=24)
        with pytest.raises(ValueError, match="guard"):
            golden_g2(sc, 11, (0,), dipole=np.zeros(201))

    def test_too_many_momenta_refused(self):
        sc = Scenario(n_cycles=2, n_t=33, n_v=64)
        with pytest.raises(ValueError, match="guard"):
            golden_g2(sc, 11, (0,), dipole=np.zeros(33))

    def test_dipole_coarse_guard(self):
        from hhg_oracle.golden import make_dipole_record
        with pytest.raises(ValueError, match="coarse"):
            make_dipole_record(Scenario(n_v=600))


class TestCacheFormat:
    def test_reads_handwritten_table(self, tmp_path):
        """Round-trip through a file laid out per the documented format."""
        n_v, n_t = 4, 3
        rng = np.random.default_rng(7)
        planes = [rng.standard_normal((n_v, n_t)) for _ in range(5)]
        path = tmp_path / "x.tab"
        with open(path, "wb") as fh:
            fh.write(b"HHGTAB1\n")
            fh.write(struct.pack("<II", 1, 0))
            fh.write(bytes.fromhex("ab" * 32))
            fh.write(struct.pack("<2Q", n_v, n_t))
            fh.write(struct.pack("<4d", -1.0, 1.0, 0.0, 2.0))
            for plane in planes:
                fh.write(np.asfortranarray(plane).tobytes(order="F"))
        tab = read_table(path)
        assert tab.config_hash == "ab" * 32
        assert np.array_equal(tab.d.real, planes[0])
        assert np.array_equal(tab.d.imag, planes[1])
        assert np.array_equal(tab.dr, planes[2])
        assert np.array_equal(tab.dv_d.real, planes[3])
        assert tab.v.shape == (n_v,) and tab.t.shape == (n_t,)

    def test_rejects_wrong_magic(self, tmp_path):
        path = tmp_path / "y.tab"
        path.write_bytes(b"NOTATAB\n" + b"\x00" * 64)
        with pytest.raises(ValueError, match="not a"):
            read_table(path)
