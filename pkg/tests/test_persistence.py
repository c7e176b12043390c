"""Binary space files: round trips, canonical bytes, corruption detection."""

import random
import struct

import numpy as np
import pytest

from driftspace import (
    BadMagicError,
    ChecksumError,
    ConfigError,
    SemanticSpace,
    SpaceConfig,
    SpaceFormatError,
    TruncatedFileError,
    VersionMismatchError,
    combine,
    load_space,
    save_space,
)
from driftspace.persistence import FORMAT_VERSION, MAGIC, write_space_tsv

from helpers import build_space, random_sentences

CFG = SpaceConfig(dim=32, window=5, order_span=2, global_seed=3, perm_seed=4)


@pytest.fixture
def space():
    rng = random.Random(71)
    vocab = [f"v{i:02d}" for i in range(12)] + ["naïve", "o'clock"]
    return build_space(CFG, "1987", random_sentences(rng, vocab, 40))


class TestRoundTrip:
    def test_load_restores_everything(self, space, tmp_path):
        path = save_space(space, tmp_path / "a.space")
        loaded = load_space(path)
        assert loaded == space
        assert loaded.epoch_label == "1987"
        assert loaded.config == CFG
        assert loaded.ingested_tokens == space.ingested_tokens
        assert loaded.float_dtype == np.dtype(np.float64)

    def test_resave_is_byte_identical(self, space, tmp_path):
        first = save_space(space, tmp_path / "a.space").read_bytes()
        second = save_space(load_space(tmp_path / "a.space"), tmp_path / "b.space").read_bytes()
        assert first == second

    def test_same_space_same_bytes(self, space, tmp_path):
        a = save_space(space, tmp_path / "a.space").read_bytes()
        b = save_space(space, tmp_path / "b.space").read_bytes()
        assert a == b

    def test_empty_space(self, tmp_path):
        empty = SemanticSpace(CFG, "void")
        loaded = load_space(save_space(empty, tmp_path / "e.space"))
        assert loaded == empty
        assert len(loaded) == 0

    def test_no_temp_file_left_behind(self, space, tmp_path):
        save_space(space, tmp_path / "a.space")
        assert [p.name for p in tmp_path.iterdir()] == ["a.space"]

    def test_combine_commutes_with_save_load(self, tmp_path):
        rng = random.Random(72)
        vocab = [f"v{i:02d}" for i in range(10)]
        s0 = build_space(CFG, "p0", random_sentences(rng, vocab, 30))
        s1 = build_space(CFG, "p1", random_sentences(rng, vocab, 30))
        save_space(combine([s0, s1]), tmp_path / "whole.space")
        r0 = load_space(save_space(s0, tmp_path / "s0.space"))
        r1 = load_space(save_space(s1, tmp_path / "s1.space"))
        save_space(combine([r0, r1]), tmp_path / "parts.space")
        whole = (tmp_path / "whole.space").read_bytes()
        parts = (tmp_path / "parts.space").read_bytes()
        assert whole == parts
        assert load_space(tmp_path / "parts.space") == combine([s0, s1])


class TestFloatWidth:
    def test_float32_round_trip(self, space, tmp_path):
        path = save_space(space, tmp_path / "narrow.space", float_width=32)
        loaded = load_space(path)
        assert loaded.float_dtype == np.dtype(np.float32)
        for term, entry in space.entries.items():
            narrow = loaded.entries[term]
            assert narrow.context.dtype == np.float32
            np.testing.assert_allclose(narrow.context, entry.context, rtol=1e-6)
            assert narrow.count == entry.count

    def test_float32_files_are_smaller(self, space, tmp_path):
        wide = save_space(space, tmp_path / "wide.space").stat().st_size
        narrow = save_space(space, tmp_path / "narrow.space", float_width=32).stat().st_size
        assert narrow < wide

    def test_mixed_width_combine_warns_and_upcasts(self, space, tmp_path):
        narrow = load_space(save_space(space, tmp_path / "n.space", float_width=32))
        wide = load_space(save_space(space, tmp_path / "w.space"))
        with pytest.warns(UserWarning, match="mixed float widths"):
            merged = combine([narrow, wide])
        assert merged.float_dtype == np.dtype(np.float64)

    def test_bad_width_rejected(self, space, tmp_path):
        with pytest.raises(ConfigError):
            save_space(space, tmp_path / "x.space", float_width=16)


def _flip_byte(data: bytes, index: int) -> bytes:
    out = bytearray(data)
    out[index] ^= 0xFF
    return bytes(out)


class TestCorruption:
    @pytest.fixture
    def blob(self, space, tmp_path):
        path = save_space(space, tmp_path / "a.space")
        return path.read_bytes(), tmp_path

    def test_bad_magic(self, blob, tmp_path):
        data, _ = blob
        bad = tmp_path / "bad.space"
        bad.write_bytes(b"NOTSPACE" + data[8:])
        with pytest.raises(BadMagicError):
            load_space(bad)

    def test_version_mismatch_suggests_rebuild(self, blob, tmp_path):
        data, _ = blob
        bumped = data[:8] + struct.pack("<I", FORMAT_VERSION + 1) + data[12:]
        bad = tmp_path / "bad.space"
        bad.write_bytes(bumped)
        with pytest.raises(VersionMismatchError, match="[Rr]ebuild"):
            load_space(bad)

    def test_truncation_reports_offset(self, blob, tmp_path):
        data, _ = blob
        cut = len(data) - 7
        bad = tmp_path / "bad.space"
        bad.write_bytes(data[:cut])
        with pytest.raises(TruncatedFileError) as err:
            load_space(bad)
        assert err.value.offset == cut
        assert err.value.expected > cut

    def test_truncated_header(self, blob, tmp_path):
        data, _ = blob
        bad = tmp_path / "bad.space"
        bad.write_bytes(data[:10])
        with pytest.raises(TruncatedFileError):
            load_space(bad)

    def test_header_checksum(self, blob, tmp_path):
        data, _ = blob
        # Corrupt the label byte region, keeping lengths intact.
        label_pos = struct.calcsize("<8sIIIIQQBBBB") + 4
        bad = tmp_path / "bad.space"
        bad.write_bytes(_flip_byte(data, label_pos))
        with pytest.raises(ChecksumError):
            load_space(bad)

    def test_record_checksum_names_the_term(self, blob, tmp_path):
        data, _ = blob
        bad = tmp_path / "bad.space"
        bad.write_bytes(_flip_byte(data, len(data) - 20))
        with pytest.raises(ChecksumError, match="record"):
            load_space(bad)

    def test_trailing_bytes(self, blob, tmp_path):
        data, _ = blob
        bad = tmp_path / "bad.space"
        bad.write_bytes(data + b"junk")
        with pytest.raises(SpaceFormatError, match="trailing"):
            load_space(bad)

    def test_unknown_weighting_code(self, blob, tmp_path):
        data, _ = blob
        offset = struct.calcsize("<8sIIIIQQ")
        patched = data[:offset] + bytes([9]) + data[offset + 1:]
        bad = tmp_path / "bad.space"
        bad.write_bytes(patched)
        with pytest.raises(SpaceFormatError, match="weighting"):
            load_space(bad)

    def test_unknown_hash_algorithm(self, blob, tmp_path):
        data, _ = blob
        offset = struct.calcsize("<8sIIIIQQB")
        patched = data[:offset] + bytes([9]) + data[offset + 1:]
        bad = tmp_path / "bad.space"
        bad.write_bytes(patched)
        with pytest.raises(SpaceFormatError, match="scheme"):
            load_space(bad)

    def test_magic_constant_pinned(self):
        assert MAGIC == b"DRIFTSPC"
        assert FORMAT_VERSION == 1


class TestTsvExport:
    def test_rows_sorted_with_norms(self, tmp_path):
        space = build_space(CFG, "e", [["b", "ctx"], ["a", "ctx"], ["a", "ctx"]])
        path = write_space_tsv(space, tmp_path / "out.tsv")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "term\tcount\tsquared_context_norm"
        terms = [line.split("\t")[0] for line in lines[1:]]
        assert terms == sorted(terms)
        row = dict(zip(["term", "count", "sq"], lines[1].split("\t")))
        assert row["term"] == "a"
        assert row["count"] == "2"
        assert float(row["sq"]) == pytest.approx(4.0, rel=1e-9)
